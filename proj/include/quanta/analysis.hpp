#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quanta/markov.hpp"
#include "quanta/nwa.hpp"

namespace quanta {

struct PointMass {
  ExtValue value;
  Rational mass;
};

struct DiscreteDistribution {
  /// Sorted by value, strictly increasing, positive masses.
  std::vector<PointMass> points;
  Rational rejection_mass;

  /// Sorts, merges equal values and drops zero masses.
  static DiscreteDistribution from_points(std::vector<PointMass> points);
  /// Probability of a value at most lambda.
  Rational cdf(const ExtValue& lambda) const;
  /// Throws UndefinedExpected if both infinities carry mass.
  ExtValue expectation() const;
};

enum class Method : std::uint8_t { LimInfScc, InfExact, InfApprox, LimAvgProduct, WaDirect };
std::string method_tag(Method method);

struct AnalysisReport {
  std::optional<ExtValue> expected;
  std::optional<DiscreteDistribution> distribution;
  /// Smallest lambda with D(lambda) = 1.
  std::optional<ExtValue> almost_sure_witness;
  Method method = Method::WaDirect;
  bool exact = true;
  /// The distribution is exact only for values up to this bound.
  std::optional<Rational> distribution_exact_up_to;
  std::map<std::string, std::string> params;
};

/// Negated report: values negated, masses kept.
AnalysisReport negate(const AnalysisReport& report);

struct AcceptanceReport {
  bool almost_sure = false;
  std::vector<std::string> diagnostics;
  /// Mass of the rejecting sink plus end SCCs that cannot accept.
  Rational rejecting_mass;
};

AcceptanceReport almost_sure_acceptance(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m);

/// First chain move of a launch: the slave reads this letter while the chain
/// moves to `next`.
struct LaunchEdge {
  LetterId letter;
  StateId next;
};

/// Extremal value the slave can return on positive-probability words from
/// the given chain state (optionally conditioned on the first move).
/// Throws NoAcceptingPath if it never accepts.
ExtValue min_achievable_slave_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                    StateId start, std::optional<LaunchEdge> first = std::nullopt);
ExtValue max_achievable_slave_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                    StateId start, std::optional<LaunchEdge> first = std::nullopt);

/// Expected slave value; Bottom for a slave that accepts immediately.
/// Throws NotAlmostSurelyTerminating.
ExtValue slave_expected_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                              StateId start, std::optional<LaunchEdge> first = std::nullopt);

AnalysisReport analyze_liminf_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m);

struct InfWaOptions {
  /// Drop slaves whose value is provably beyond this bound (above it for
  /// Inf, below it for Sup). Valid only when the word value is almost surely
  /// on the other side; changes values on a null set of words.
  std::optional<Rational> prune_beyond;
  std::size_t state_limit = 2'000'000;
};

WeightedAutomaton bsum_nwa_to_inf_wa(const NestedWeightedAutomaton& nwa, const InfWaOptions& options = {});

AnalysisReport analyze_deterministic_wa(const WeightedAutomaton& wa, const LabeledMarkovChain& m);

/// For (Sup;SumPlus) only the distribution up to `lambda` is available.
AnalysisReport analyze_inf_exact(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                 std::optional<Rational> lambda = std::nullopt);

/// Cutoff for the approximation: ceil((n/p^n)·|log2((n²/p^n)·epsilon)|), at least n+1.
Integer approximation_bound(const Integer& n, const Rational& p, const Rational& epsilon);

AnalysisReport approx_inf_sum(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                              const Rational& epsilon);

AnalysisReport analyze_limavg_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m);

/// Picks the analysis matching the master value function.
AnalysisReport analyze_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                           std::optional<Rational> lambda = std::nullopt);

}  // namespace quanta
