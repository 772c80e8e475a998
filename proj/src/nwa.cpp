#include "quanta/nwa.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace quanta {

bool NestedWeightedAutomaton::is_dummy(SlaveIndex i) const {
  return std::binary_search(dummies.begin(), dummies.end(), i);
}

bool NestedWeightedAutomaton::is_silent_launch(SlaveIndex i) const {
  if (is_dummy(i)) return true;
  const auto& s = slaves.at(i);
  return s.num_states() == 0 || s.is_accepting(s.initial());
}

FinValFn NestedWeightedAutomaton::slave_fn() const {
  for (SlaveIndex i = 0; i < slaves.size(); ++i) {
    if (!is_silent_launch(i)) return slaves[i].finval();
  }
  return FinValFn::sum();
}

ValidationReport validate_nwa(const NestedWeightedAutomaton& nwa) {
  ValidationReport report;
  const auto& master = nwa.master;
  if (master.num_states() == 0) {
    report.error("empty", "master has no states");
    return report;
  }
  if (!master.is_deterministic()) report.error("nondeterministic", "master is not deterministic");
  const std::size_t k = nwa.slaves.size();
  for (const auto& t : master.transitions()) {
    if (t.label >= k) {
      report.error("label-range", "master transition from '" + master.state_name(t.from) +
                                      "' uses slave " + std::to_string(t.label + 1) +
                                      " but only " + std::to_string(k) + " slaves exist");
    }
  }
  for (SlaveIndex d : nwa.dummies) {
    if (d >= k) {
      report.error("label-range", "dummy index " + std::to_string(d + 1) + " out of range");
      continue;
    }
    const auto& s = nwa.slaves[d];
    if (s.num_states() == 0 || !s.is_accepting(s.initial()) || !s.transitions().empty()) {
      report.error("dummy-shape", "dummy slave " + std::to_string(d + 1) +
                                      " must have an accepting initial state and no transitions");
    }
  }
  std::optional<FinValFn> common;
  for (SlaveIndex i = 0; i < k; ++i) {
    const auto& s = nwa.slaves[i];
    std::string label = "slave " + std::to_string(i + 1);
    if (!(s.alphabet() == master.alphabet())) report.error("alphabet", label + " uses a different alphabet");
    validate_slave(s, label, report);
    if (s.num_states() == 0 || nwa.is_silent_launch(i)) continue;
    if (const auto* fn = std::get_if<FinValFn>(&s.value_function())) {
      if (!common) common = *fn;
      else if (!(*common == *fn)) report.error("mixed-value-functions", label + " uses " + name(*fn) +
                                                   " but another slave uses " + name(*common));
    }
  }
  return report;
}

NwaRunner::NwaRunner(const NestedWeightedAutomaton& nwa) : nwa_(&nwa), master_(nwa.master.initial()) {}

StepEvents NwaRunner::step(LetterId letter) {
  StepEvents events;
  if (dead_) {
    events.death = Death::MasterStuck;
    return events;
  }
  const std::size_t pos = position_++;
  const auto* t = nwa_->master.step(master_, letter);
  if (!t) {
    dead_ = true;
    events.death = Death::MasterStuck;
    return events;
  }
  master_ = t->to;
  if (nwa_->is_silent_launch(t->label)) {
    events.completed.push_back({pos, pos, ExtValue::bottom()});
  } else {
    const auto& slave = nwa_->slaves[t->label];
    active_.push_back({pos, t->label, slave.initial(), FinValAccumulator(slave.finval())});
  }
  std::vector<ActiveSlave> still;
  still.reserve(active_.size());
  for (auto& a : active_) {
    const auto& slave = nwa_->slaves[a.slave];
    const auto* st = slave.step(a.state, letter);
    if (!st) {
      dead_ = true;
      events.completed.clear();
      events.death = Death::SlaveRejected;
      events.detail = a.launch;
      active_.clear();
      return events;
    }
    a.state = st->to;
    if (!st->label.is_silent()) a.acc.push(st->label.value());
    if (slave.is_accepting(a.state)) events.completed.push_back({a.launch, pos, a.acc.value()});
    else still.push_back(std::move(a));
  }
  active_ = std::move(still);
  return events;
}

std::vector<std::size_t> NwaRunner::pending() const {
  std::vector<std::size_t> out;
  for (const auto& a : active_) out.push_back(a.launch);
  std::sort(out.begin(), out.end());
  return out;
}

PrefixTrace simulate_nwa_prefix(const NestedWeightedAutomaton& nwa, const Word& word,
                                TruncationPolicy policy) {
  PrefixTrace trace;
  NwaRunner runner(nwa);
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto events = runner.step(word[i]);
    if (events.death != Death::None) {
      trace.death = events.death;
      trace.death_step = i;
      trace.death_detail = events.detail;
      return trace;
    }
    trace.max_active = std::max(trace.max_active, runner.active());
    for (auto& c : events.completed) trace.completed.push_back(std::move(c));
  }
  if (policy == TruncationPolicy::ReportRunning) trace.pending = runner.pending();
  return trace;
}

WidthResult check_width_bound(const NestedWeightedAutomaton& nwa, std::size_t k) {
  using Config = std::pair<StateId, std::vector<std::pair<SlaveIndex, StateId>>>;
  struct Node {
    Config config;
    std::size_t parent;
    LetterId letter;
  };
  std::vector<Node> nodes;
  std::map<Config, std::size_t> seen;
  std::deque<std::size_t> queue;
  Config start{nwa.master.initial(), {}};
  nodes.push_back({start, 0, 0});
  seen.emplace(start, 0);
  queue.push_back(0);

  auto witness_of = [&](std::size_t node, LetterId last) {
    Word w{last};
    for (std::size_t n = node; n != 0; n = nodes[n].parent) w.push_back(nodes[n].letter);
    std::reverse(w.begin(), w.end());
    return w;
  };

  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    const Config config = nodes[cur].config;
    for (LetterId a = 0; a < nwa.alphabet().size(); ++a) {
      const auto* t = nwa.master.step(config.first, a);
      if (!t) continue;
      auto active = config.second;
      if (!nwa.is_silent_launch(t->label)) active.emplace_back(t->label, nwa.slaves[t->label].initial());
      std::vector<std::pair<SlaveIndex, StateId>> next;
      bool stuck = false;
      for (const auto& [i, q] : active) {
        const auto* st = nwa.slaves[i].step(q, a);
        if (!st) {
          stuck = true;
          break;
        }
        if (!nwa.slaves[i].is_accepting(st->to)) next.emplace_back(i, st->to);
      }
      if (stuck) continue;
      if (next.size() > k) return {false, k, witness_of(cur, a)};
      std::sort(next.begin(), next.end());
      Config succ{t->to, std::move(next)};
      if (seen.count(succ)) continue;
      seen.emplace(succ, nodes.size());
      queue.push_back(nodes.size());
      nodes.push_back({std::move(succ), cur, a});
    }
  }
  return {true, k, {}};
}

NestedWeightedAutomaton dualize(const NestedWeightedAutomaton& nwa) {
  NestedWeightedAutomaton out = nwa;
  out.master_fn = swap_direction(nwa.master_fn);
  for (SlaveIndex i = 0; i < out.slaves.size(); ++i) {
    if (!nwa.is_silent_launch(i)) out.slaves[i] = dualize(nwa.slaves[i]);
  }
  return out;
}

Integer automaton_size(const NestedWeightedAutomaton& nwa) {
  Integer n = static_cast<unsigned long>(nwa.master.num_states());
  for (const auto& s : nwa.slaves) {
    n += static_cast<unsigned long>(s.num_states());
    for (const auto& t : s.transitions()) {
      if (!t.label.is_silent()) n += abs(t.label.value());
    }
  }
  return n;
}

}  // namespace quanta
