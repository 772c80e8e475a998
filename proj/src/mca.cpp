#include "quanta/mca.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace quanta {

ValidationReport validate_mca(const MonitorCounterAutomaton& mca) {
  ValidationReport report;
  if (mca.num_states() == 0) {
    report.error("empty", "automaton has no states");
    return report;
  }
  if (!mca.is_deterministic()) report.error("nondeterministic", "automaton is not deterministic");
  const std::size_t n = mca.counters();
  bool shapes_ok = true;
  for (const auto& t : mca.transitions()) {
    std::string where = "transition '" + mca.state_name(t.from) + "' -" +
                        mca.alphabet().letter(t.letter) + "->";
    if (t.label.size() != n) {
      report.error("instruction-length", where + " has " + std::to_string(t.label.size()) +
                                             " instructions for " + std::to_string(n) + " counters");
      shapes_ok = false;
      continue;
    }
    auto starts = std::count_if(t.label.begin(), t.label.end(), [](const CounterInstruction& c) {
      return c.op == CounterInstruction::Op::Start;
    });
    if (starts > 1) report.error("multiple-start", where + " starts more than one counter");
  }
  if (!shapes_ok || n > 24) return report;

  // Reachability over (state, set of active counters).
  using Key = std::pair<StateId, std::uint32_t>;
  std::set<Key> seen;
  std::deque<Key> queue;
  std::vector<bool> ever_started(n, false);
  std::set<std::pair<std::size_t, std::string>> flagged;
  auto flag = [&](std::size_t counter, const std::string& code, const std::string& msg) {
    if (flagged.emplace(counter, code).second) report.warning(code, msg);
  };
  seen.insert({mca.initial(), 0});
  queue.push_back({mca.initial(), 0});
  std::vector<std::pair<std::size_t, const Transition<InstructionVector>*>> nonzero_adds;
  while (!queue.empty()) {
    auto [q, mask] = queue.front();
    queue.pop_front();
    for (LetterId a = 0; a < mca.alphabet().size(); ++a) {
      const auto* t = mca.step(q, a);
      if (!t) continue;
      std::uint32_t next = mask;
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        bool active = mask & (1u << j);
        const auto& ins = t->label[j];
        std::string c = "counter " + std::to_string(j + 1);
        switch (ins.op) {
          case CounterInstruction::Op::Start:
            ever_started[j] = true;
            if (active) {
              flag(j, "start-active", c + " may be started while active");
              ok = false;
            }
            next |= 1u << j;
            break;
          case CounterInstruction::Op::Terminate:
            if (!active) {
              flag(j, "terminate-inactive", c + " may be terminated while inactive");
              ok = false;
            }
            next &= ~(1u << j);
            break;
          case CounterInstruction::Op::Add:
            if (!active && ins.amount != 0) {
              flag(j, "add-inactive", c + " may receive a non-zero add while inactive");
              ok = false;
            }
            break;
        }
      }
      if (ok && seen.insert({t->to, next}).second) queue.push_back({t->to, next});
    }
  }
  for (const auto& t : mca.transitions()) {
    for (std::size_t j = 0; j < n; ++j) {
      if (t.label[j].op == CounterInstruction::Op::Add && t.label[j].amount != 0 && !ever_started[j]) {
        flag(j, "add-never-started", "counter " + std::to_string(j + 1) +
                                         " receives adds but is never started on any path");
      }
    }
  }
  return report;
}

McaRunner::McaRunner(const MonitorCounterAutomaton& mca)
    : mca_(&mca), state_(mca.initial()), counters_(mca.counters()) {}

StepEvents McaRunner::step(LetterId letter) {
  StepEvents events;
  if (dead_) {
    events.death = Death::MasterStuck;
    return events;
  }
  const std::size_t pos = position_++;
  const auto* t = mca_->step(state_, letter);
  if (!t) {
    dead_ = true;
    events.death = Death::MasterStuck;
    return events;
  }
  bool started = false;
  for (std::size_t j = 0; j < counters_.size(); ++j) {
    auto& c = counters_[j];
    const auto& ins = t->label.at(j);
    bool misuse = false;
    switch (ins.op) {
      case CounterInstruction::Op::Start:
        if (c.active) misuse = true;
        else {
          c = {true, 0, pos};
          started = true;
        }
        break;
      case CounterInstruction::Op::Terminate:
        if (!c.active) misuse = true;
        else {
          events.completed.push_back({c.activation, pos, ExtValue(c.value)});
          c.active = false;
        }
        break;
      case CounterInstruction::Op::Add:
        if (c.active) c.value += ins.amount;
        else if (ins.amount != 0) misuse = true;
        break;
    }
    if (misuse) {
      dead_ = true;
      events.completed.clear();
      events.death = Death::InstructionError;
      events.detail = j;
      return events;
    }
  }
  if (!started) events.completed.push_back({pos, pos, ExtValue::bottom()});
  state_ = t->to;
  return events;
}

std::size_t McaRunner::active() const {
  return static_cast<std::size_t>(
      std::count_if(counters_.begin(), counters_.end(), [](const Counter& c) { return c.active; }));
}

std::vector<std::size_t> McaRunner::pending() const {
  std::vector<std::size_t> out;
  for (const auto& c : counters_) {
    if (c.active) out.push_back(c.activation);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PrefixTrace simulate_mca_prefix(const MonitorCounterAutomaton& mca, const Word& word) {
  PrefixTrace trace;
  McaRunner runner(mca);
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto events = runner.step(word[i]);
    if (events.death != Death::None) {
      trace.death = events.death;
      trace.death_step = i;
      trace.death_detail = events.detail;
      return trace;
    }
    trace.max_active = std::max(trace.max_active, runner.active());
    for (auto& c : events.completed) {
      if (!c.value.is_bottom()) trace.completed.push_back(std::move(c));
    }
  }
  trace.pending = runner.pending();
  return trace;
}

}  // namespace quanta
