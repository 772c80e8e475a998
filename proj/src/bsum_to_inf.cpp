#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "analysis_common.hpp"

namespace quanta {

namespace {

struct Copy {
  SlaveIndex slave;
  StateId state;
  Integer partial;  // clamped to [-B, B]
  bool saturated;

  /// Order of the values this copy can still reach: saturated low copies
  /// below running ones, saturated high copies above.
  std::tuple<int, const Integer&> rank() const {
    int band = !saturated ? 1 : (partial < 0 ? 0 : 2);
    return {band, partial};
  }
  friend bool operator<(const Copy& a, const Copy& b) {
    return std::tie(a.slave, a.state, a.partial, a.saturated) <
           std::tie(b.slave, b.state, b.partial, b.saturated);
  }
};

using Config = std::pair<StateId, std::vector<Copy>>;

bool operator<(const Config& a, const Config& b) {
  if (a.first != b.first) return a.first < b.first;
  return std::lexicographical_compare(a.second.begin(), a.second.end(), b.second.begin(), b.second.end());
}

/// For every slave state, the lowest (Min) or highest (Max) prefix sum
/// reachable before acceptance; nullopt encodes an unbounded prefix sum.
std::vector<std::optional<Integer>> prefix_bound(const WeightedAutomaton& slave, Extremum dir) {
  std::size_t n = slave.num_states();
  int sign = dir == Extremum::Min ? 1 : -1;
  std::vector<Integer> d(n, Integer(0));
  auto relax = [&]() {
    std::vector<bool> changed(n, false);
    for (const auto& t : slave.transitions()) {
      if (slave.is_accepting(t.from)) continue;
      Integer tail = slave.is_accepting(t.to) ? Integer(0) : d[t.to];
      Integer cand = sign * t.label.value() + tail;
      if (cand < d[t.from]) {
        d[t.from] = cand;
        changed[t.from] = true;
      }
    }
    return changed;
  };
  for (std::size_t i = 0; i < n; ++i) relax();
  auto changed = relax();
  Adjacency pred(n);
  for (const auto& t : slave.transitions()) {
    if (!slave.is_accepting(t.from)) pred[t.to].push_back(t.from);
  }
  std::vector<std::size_t> seeds;
  for (StateId q = 0; q < n; ++q) {
    if (changed[q]) seeds.push_back(q);
  }
  auto unbounded = reachable_from(pred, seeds);
  std::vector<std::optional<Integer>> out(n);
  for (StateId q = 0; q < n; ++q) {
    if (seeds.empty() || !unbounded[q]) out[q] = Integer(sign * d[q]);
  }
  return out;
}

}  // namespace

WeightedAutomaton bsum_nwa_to_inf_wa(const NestedWeightedAutomaton& input, const InfWaOptions& options) {
  if (input.master_fn != InfValFn::Inf && input.master_fn != InfValFn::Sup) {
    throw Error(ErrorCode::InvalidArgument, "bsum_nwa_to_inf_wa needs an Inf or Sup master");
  }
  detail::require_deterministic(input);
  auto nwa = map_slaves(input, [](const WeightedAutomaton& s) {
    auto kind = s.finval().kind;
    if (kind == FinValFn::Kind::Min || kind == FinValFn::Kind::Max) return normalize_slave(s);
    if (kind != FinValFn::Kind::BSum) {
      throw Error(ErrorCode::InvalidArgument, "bsum_nwa_to_inf_wa needs BSum, Min or Max slaves");
    }
    return s;
  });
  Extremum dir = input.master_fn == InfValFn::Inf ? Extremum::Min : Extremum::Max;
  bool low = dir == Extremum::Min;

  std::vector<std::vector<std::optional<Integer>>> bound(nwa.slaves.size());
  if (options.prune_beyond) {
    for (SlaveIndex i = 0; i < nwa.slaves.size(); ++i) {
      if (!nwa.is_silent_launch(i)) bound[i] = prefix_bound(nwa.slaves[i], dir);
    }
  }
  // A copy is dropped once every value it can still produce is beyond the threshold.
  auto prunable = [&](const Copy& c) {
    if (!options.prune_beyond) return false;
    const Integer& b = nwa.slaves[c.slave].finval().bound;
    Integer reach = c.partial;
    if (!c.saturated) {
      const auto& future = bound[c.slave][c.state];
      if (!future) return false;
      reach = std::clamp(Integer(c.partial + *future), Integer(-b), b);
    }
    return low ? Rational(reach) > *options.prune_beyond : Rational(reach) < *options.prune_beyond;
  };

  WeightedAutomaton wa(input.alphabet(), input.master_fn, WordMode::Infinite);
  std::map<Config, StateId> ids;
  std::deque<Config> queue;
  auto intern = [&](Config cfg) {
    auto it = ids.find(cfg);
    if (it != ids.end()) return it->second;
    if (ids.size() >= options.state_limit) {
      throw Error(ErrorCode::ResourceLimit, "Inf automaton exceeds " + std::to_string(options.state_limit) + " states");
    }
    std::string name = nwa.master.state_name(cfg.first) + "{";
    for (std::size_t j = 0; j < cfg.second.size(); ++j) {
      const auto& c = cfg.second[j];
      if (j) name += ",";
      name += std::to_string(c.slave + 1) + ":" + nwa.slaves[c.slave].state_name(c.state) + ":" +
              c.partial.get_str() + (c.saturated ? "!" : "");
    }
    name += "}";
    StateId id = wa.add_state(name, nwa.master.is_accepting(cfg.first));
    ids.emplace(cfg, id);
    queue.push_back(std::move(cfg));
    return id;
  };
  intern({nwa.master.initial(), {}});

  while (!queue.empty()) {
    Config cfg = std::move(queue.front());
    queue.pop_front();
    StateId from = ids.at(cfg);
    for (LetterId a = 0; a < nwa.alphabet().size(); ++a) {
      const auto* mt = nwa.master.step(cfg.first, a);
      if (!mt) continue;
      std::vector<Copy> active = cfg.second;
      SlaveIndex launched = mt->label;
      if (!nwa.is_silent_launch(launched)) {
        active.push_back({launched, nwa.slaves[launched].initial(), Integer(0), false});
      }
      std::optional<Integer> emitted;
      bool stuck = false;
      std::vector<Copy> next;
      for (auto& c : active) {
        const auto& slave = nwa.slaves[c.slave];
        const auto* t = slave.step(c.state, a);
        if (!t) {
          stuck = true;
          break;
        }
        const Integer& b = slave.finval().bound;
        Integer sum = c.partial + t->label.value();
        if (!c.saturated && (sum > b || sum < -b)) {
          c.saturated = true;
          c.partial = sum > b ? b : Integer(-b);
        } else if (!c.saturated) {
          c.partial = sum;
        }
        c.state = t->to;
        if (slave.is_accepting(c.state)) {
          if (!emitted || (low ? c.partial < *emitted : c.partial > *emitted)) emitted = c.partial;
        } else if (!prunable(c)) {
          next.push_back(std::move(c));
        }
      }
      if (stuck) continue;
      // Keep one copy per (slave, state): the one whose value stays extremal.
      std::sort(next.begin(), next.end(), [&](const Copy& x, const Copy& y) {
        if (x.slave != y.slave || x.state != y.state) return std::tie(x.slave, x.state) < std::tie(y.slave, y.state);
        return low ? x.rank() < y.rank() : x.rank() > y.rank();
      });
      next.erase(std::unique(next.begin(), next.end(),
                             [](const Copy& x, const Copy& y) { return x.slave == y.slave && x.state == y.state; }),
                 next.end());
      StateId to = intern({mt->to, std::move(next)});
      wa.add_transition(from, a, to, emitted ? Weight(*emitted) : Weight::silent());
    }
  }
  return wa;
}

}  // namespace quanta
