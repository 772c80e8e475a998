#pragma once

#include <cstdint>
#include <vector>

#include "quanta/core.hpp"
#include "quanta/trace.hpp"

namespace quanta {

using SlaveIndex = std::uint32_t;
/// Master automaton; labels are 0-based slave indices.
using MasterAutomaton = LabeledAutomaton<SlaveIndex>;

struct NestedWeightedAutomaton {
  MasterAutomaton master;
  InfValFn master_fn = InfValFn::LimAvg;
  std::vector<WeightedAutomaton> slaves;
  /// 0-based, sorted.
  std::vector<SlaveIndex> dummies;

  const Alphabet& alphabet() const { return master.alphabet(); }
  bool is_dummy(SlaveIndex i) const;
  /// A launch of this slave contributes Bottom: a dummy, or any slave whose
  /// initial state is accepting.
  bool is_silent_launch(SlaveIndex i) const;
  /// Value function shared by the non-silent slaves (Sum when there are none).
  FinValFn slave_fn() const;
};

ValidationReport validate_nwa(const NestedWeightedAutomaton& nwa);

/// Steps an NWA one letter at a time.
class NwaRunner {
 public:
  explicit NwaRunner(const NestedWeightedAutomaton& nwa);

  StepEvents step(LetterId letter);
  bool dead() const { return dead_; }
  std::size_t position() const { return position_; }
  std::size_t active() const { return active_.size(); }
  std::vector<std::size_t> pending() const;
  StateId master_state() const { return master_; }

 private:
  struct ActiveSlave {
    std::size_t launch;
    SlaveIndex slave;
    StateId state;
    FinValAccumulator acc;
  };

  const NestedWeightedAutomaton* nwa_;
  StateId master_;
  std::vector<ActiveSlave> active_;
  std::size_t position_ = 0;
  bool dead_ = false;
};

enum class TruncationPolicy : std::uint8_t { ReportRunning, DropRunning };

PrefixTrace simulate_nwa_prefix(const NestedWeightedAutomaton& nwa, const Word& word,
                                TruncationPolicy policy = TruncationPolicy::ReportRunning);

struct WidthResult {
  bool bounded = true;
  std::size_t k = 0;
  /// Shortest word (lexicographic tie-break) reaching k+1 active slaves.
  Word witness;
};

WidthResult check_width_bound(const NestedWeightedAutomaton& nwa, std::size_t k);

NestedWeightedAutomaton dualize(const NestedWeightedAutomaton& nwa);

/// Replaces every non-silent slave by the result of a transformation.
template <class F>
NestedWeightedAutomaton map_slaves(const NestedWeightedAutomaton& nwa, F&& f) {
  NestedWeightedAutomaton out = nwa;
  for (SlaveIndex i = 0; i < out.slaves.size(); ++i) {
    if (!nwa.is_silent_launch(i)) out.slaves[i] = f(nwa.slaves[i]);
  }
  return out;
}

/// Unary size: master states + slave states + sum of absolute slave weights.
Integer automaton_size(const NestedWeightedAutomaton& nwa);

}  // namespace quanta
