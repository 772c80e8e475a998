#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "quanta/markov.hpp"
#include "quanta/mca.hpp"
#include "quanta/nwa.hpp"

namespace quanta {

/// Generator for one sample, keyed by (seed, index) only.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

/// Follows positive-probability edges from the initial state.
Word sample_word(const LabeledMarkovChain& m, std::size_t length, std::uint64_t seed, std::uint64_t index);

struct MonteCarloOptions {
  std::size_t horizon = 1000;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  /// Completions at earlier positions are ignored. Default: horizon/10 for
  /// limit value functions, 0 for Inf and Sup.
  std::optional<std::size_t> burn_in;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct MonteCarloResult {
  double mean = 0;
  double variance = 0;  // unbiased sample variance of the per-sample values
  double rejection_rate = 0;
  std::size_t samples = 0;
  std::size_t accepted = 0;
  std::size_t burn_in = 0;
  /// Per-sample values in index order; nullopt for rejected samples.
  std::vector<std::optional<double>> values;

  double standard_error() const;
};

/// Per sample: run the prefix, drop completions before the burn-in, fold the
/// rest through the master value function. Samples whose run dies or that
/// produce no value count as rejected.
MonteCarloResult monte_carlo_estimate(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options);
MonteCarloResult monte_carlo_estimate(const MonitorCounterAutomaton& mca, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options);
/// Infinite-word weighted automaton; silent weights are skipped.
MonteCarloResult monte_carlo_estimate(const WeightedAutomaton& wa, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options);

/// Value of one prefix through the generic runner, for cross-checking the
/// compiled simulator. nullopt if the run dies or nothing survives.
std::optional<Rational> prefix_estimate(const NestedWeightedAutomaton& nwa, const Word& word,
                                        std::size_t burn_in);

struct PrefixExpectation {
  /// Σ probability · value over runs that complete within the depth.
  Rational expectation;
  Rational completed_mass;
  Rational silent_mass;    // launches that return Bottom
  Rational rejected_mass;  // slave got stuck
  Rational residual_mass;  // still running at the depth
};

inline constexpr std::size_t kDefaultDepthCap = 24;

/// Slave launched at the chain's initial state. Throws DepthCap.
PrefixExpectation exhaustive_prefix_expectation(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                                std::size_t depth, std::size_t cap = kDefaultDepthCap);

struct PrefixExtremum {
  /// Running extremum of completed values at the depth (nullopt: none yet) with its mass.
  std::vector<std::pair<std::optional<ExtValue>, Rational>> outcomes;
  Rational rejected_mass;
};

/// Every chain path of the given length through an Inf or Sup NWA: the
/// extremum of the values completed so far. Throws DepthCap.
PrefixExtremum exhaustive_prefix_extremum(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                          std::size_t depth, std::size_t cap = kDefaultDepthCap);

/// Something that produces per-position values on finite words.
using Simulable = std::variant<const NestedWeightedAutomaton*, const MonitorCounterAutomaton*,
                               const WeightedAutomaton*>;

enum class CompareMode : std::uint8_t {
  /// Same value for every position; completion steps may differ by the lag.
  PerPosition,
  /// Same running minimum (or maximum) of completed values after every step.
  RunningMin,
  RunningMax,
};

struct EquivalenceOptions {
  CompareMode mode = CompareMode::PerPosition;
  std::size_t lag = 2;
};

struct EquivalenceResult {
  bool equivalent = true;
  Word counterexample;
  std::string reason;
  std::size_t words_checked = 0;
};

/// Explores every word up to max_len. Both sides must die at the same step.
EquivalenceResult check_equivalence_on_prefixes(Simulable a, Simulable b, const Alphabet& alphabet,
                                                std::size_t max_len, const EquivalenceOptions& options = {});

}  // namespace quanta
