#pragma once

#include <cstdint>
#include <vector>

#include "quanta/core.hpp"
#include "quanta/trace.hpp"

namespace quanta {

struct CounterInstruction {
  enum class Op : std::uint8_t { Add, Start, Terminate };
  Op op = Op::Add;
  Integer amount;  // Add only

  static CounterInstruction add(Integer amount) { return {Op::Add, std::move(amount)}; }
  static CounterInstruction start() { return {Op::Start, 0}; }
  static CounterInstruction terminate() { return {Op::Terminate, 0}; }

  friend bool operator==(const CounterInstruction& a, const CounterInstruction& b) {
    return a.op == b.op && (a.op != Op::Add || a.amount == b.amount);
  }
};

using InstructionVector = std::vector<CounterInstruction>;

class MonitorCounterAutomaton : public LabeledAutomaton<InstructionVector> {
 public:
  MonitorCounterAutomaton() = default;
  MonitorCounterAutomaton(Alphabet alphabet, InfValFn fn, std::size_t counters)
      : LabeledAutomaton<InstructionVector>(std::move(alphabet)), fn_(fn), counters_(counters) {}

  InfValFn value_function() const { return fn_; }
  std::size_t counters() const { return counters_; }

 private:
  InfValFn fn_ = InfValFn::Sup;
  std::size_t counters_ = 0;
};

/// Determinism, instruction-vector length and the single-Start rule as
/// errors; misuse reachable in the counter-activity abstraction as warnings.
/// Adding 0 to an inactive counter is not misuse.
ValidationReport validate_mca(const MonitorCounterAutomaton& mca);

class McaRunner {
 public:
  explicit McaRunner(const MonitorCounterAutomaton& mca);

  StepEvents step(LetterId letter);
  bool dead() const { return dead_; }
  std::size_t position() const { return position_; }
  std::size_t active() const;
  std::vector<std::size_t> pending() const;

 private:
  struct Counter {
    bool active = false;
    Integer value;
    std::size_t activation = 0;
  };

  const MonitorCounterAutomaton* mca_;
  StateId state_;
  std::vector<Counter> counters_;
  std::size_t position_ = 0;
  bool dead_ = false;
};

/// Runs the word; Start on an active counter, or Terminate/non-zero Add on
/// an inactive one, ends the trace with Death::InstructionError.
PrefixTrace simulate_mca_prefix(const MonitorCounterAutomaton& mca, const Word& word);

}  // namespace quanta
