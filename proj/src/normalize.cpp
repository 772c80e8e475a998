#include <deque>
#include <map>
#include <tuple>

#include "quanta/core.hpp"

namespace quanta {

WeightedAutomaton normalize_slave(const WeightedAutomaton& slave) {
  const auto& fn = slave.finval();
  if (fn.kind != FinValFn::Kind::Min && fn.kind != FinValFn::Kind::Max) {
    throw Error(ErrorCode::InvalidArgument, "normalize_slave expects a Min or Max slave");
  }
  slave.require_deterministic("slave");
  bool is_min = fn.kind == FinValFn::Kind::Min;

  Integer bound = 1;
  for (const auto& t : slave.transitions()) {
    if (!t.label.is_silent() && abs(t.label.value()) > bound) bound = abs(t.label.value());
  }

  // State: original state plus the extremum seen so far (none before the first weight).
  using Key = std::pair<StateId, std::optional<Integer>>;
  std::map<Key, StateId> ids;
  std::deque<Key> queue;
  WeightedAutomaton out(slave.alphabet(), FinValFn::bsum(bound), WordMode::Finite);
  auto intern = [&](const Key& key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::string label = slave.state_name(key.first) + "/" + (key.second ? key.second->get_str() : "-");
    StateId id = out.add_state(label, slave.is_accepting(key.first));
    ids.emplace(key, id);
    queue.push_back(key);
    return id;
  };
  intern({slave.initial(), std::nullopt});

  while (!queue.empty()) {
    Key key = queue.front();
    queue.pop_front();
    StateId from = ids.at(key);
    for (LetterId a = 0; a < slave.alphabet().size(); ++a) {
      const auto* t = slave.step(key.first, a);
      if (!t) continue;
      std::optional<Integer> ext = key.second;
      if (!t->label.is_silent()) {
        const Integer& w = t->label.value();
        if (!ext || (is_min ? w < *ext : w > *ext)) ext = w;
      }
      StateId to = intern({t->to, ext});
      // Partial sums equal the extremum inside accepting states and 0 elsewhere.
      Integer weight = 0;
      if (slave.is_accepting(t->to) && ext) weight += *ext;
      if (slave.is_accepting(key.first) && key.second) weight -= *key.second;
      out.add_transition(from, a, to, Weight(weight));
    }
  }
  return out;
}

namespace {

WeightedAutomaton bsum_to_sum(const WeightedAutomaton& slave) {
  const auto& fn = slave.finval();
  using Key = std::tuple<StateId, Integer, bool>;
  std::map<Key, StateId> ids;
  std::deque<Key> queue;
  WeightedAutomaton out(slave.alphabet(), FinValFn::sum(), WordMode::Finite);
  auto intern = [&](const Key& key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const auto& [q, partial, saturated] = key;
    std::string label = slave.state_name(q) + "/" + partial.get_str() + (saturated ? "!" : "");
    StateId id = out.add_state(label, slave.is_accepting(q));
    ids.emplace(key, id);
    queue.push_back(key);
    return id;
  };
  intern({slave.initial(), Integer(0), false});

  while (!queue.empty()) {
    Key key = queue.front();
    queue.pop_front();
    StateId from = ids.at(key);
    const auto& [q, partial, saturated] = key;
    for (LetterId a = 0; a < slave.alphabet().size(); ++a) {
      const auto* t = slave.step(q, a);
      if (!t) continue;
      Integer next = partial;
      bool next_saturated = saturated;
      if (!saturated && !t->label.is_silent()) {
        next += t->label.value();
        if (next > fn.bound) {
          next = fn.bound;
          next_saturated = true;
        } else if (next < -fn.bound) {
          next = -fn.bound;
          next_saturated = true;
        }
      }
      StateId to = intern({t->to, next, next_saturated});
      out.add_transition(from, a, to, Weight(Integer(next - partial)));
    }
  }
  return out;
}

}  // namespace

WeightedAutomaton to_sum_slave(const WeightedAutomaton& slave) {
  const auto& fn = slave.finval();
  switch (fn.kind) {
    case FinValFn::Kind::Sum:
      return slave;
    case FinValFn::Kind::SumPlus: {
      WeightedAutomaton out(slave.alphabet(), FinValFn::sum(), WordMode::Finite);
      for (StateId s = 0; s < slave.num_states(); ++s) out.add_state(slave.state_name(s), slave.is_accepting(s));
      out.set_initial(slave.initial());
      for (const auto& t : slave.transitions()) {
        out.add_transition(t.from, t.letter, t.to,
                           t.label.is_silent() ? t.label : Weight(abs(t.label.value())));
      }
      return out;
    }
    case FinValFn::Kind::Min:
    case FinValFn::Kind::Max:
      return bsum_to_sum(normalize_slave(slave));
    case FinValFn::Kind::BSum:
      return bsum_to_sum(slave);
  }
  return slave;
}

}  // namespace quanta
