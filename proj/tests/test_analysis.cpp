#include <gtest/gtest.h>

#include <functional>

#include "quanta/analysis.hpp"
#include "quanta/gen.hpp"
#include "quanta/sim.hpp"
#include "oracles.hpp"
#include "random_instances.hpp"

using namespace quanta;
namespace qt = quanta::testing;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

/// Launches at every letter a slave that loops on 'a' with weight −1 and
/// accepts on 'b'.
NestedWeightedAutomaton negative_loop_nwa(InfValFn fn) {
  Alphabet sigma({"a", "b"});
  NestedWeightedAutomaton nwa;
  nwa.master = MasterAutomaton(sigma);
  StateId q = nwa.master.add_state("q", true);
  nwa.master.add_transition(q, 0, q, 0);
  nwa.master.add_transition(q, 1, q, 0);
  nwa.master_fn = fn;
  WeightedAutomaton slave(sigma, FinValFn::sum(), WordMode::Finite);
  StateId s = slave.add_state("s");
  StateId f = slave.add_state("f", true);
  slave.add_transition(s, 0, s, Weight(-1));
  slave.add_transition(s, 1, f, Weight(0));
  nwa.slaves.push_back(slave);
  return nwa;
}

NestedWeightedAutomaton all_dummy(const Alphabet& sigma, InfValFn fn) {
  NestedWeightedAutomaton nwa;
  nwa.master = MasterAutomaton(sigma);
  StateId q = nwa.master.add_state("q", true);
  for (LetterId a = 0; a < sigma.size(); ++a) nwa.master.add_transition(q, a, q, 0);
  nwa.master_fn = fn;
  WeightedAutomaton d(sigma, FinValFn::sum(), WordMode::Finite);
  d.add_state("d", true);
  nwa.slaves.push_back(d);
  nwa.dummies = {0};
  return nwa;
}

/// Transient state moving to x on a (1/3) or y on b (2/3); the slave returns 1 on a and 4 on b.
std::pair<NestedWeightedAutomaton, LabeledMarkovChain> split_instance() {
  Alphabet sigma({"a", "b"});
  LabeledMarkovChain m(sigma);
  StateId s = m.add_state("s");
  StateId x = m.add_state("x");
  StateId y = m.add_state("y");
  m.add_edge(s, 0, x, Rational(1, 3));
  m.add_edge(s, 1, y, Rational(2, 3));
  m.add_edge(x, 0, x, Rational(1));
  m.add_edge(y, 1, y, Rational(1));
  auto nwa = qt::letter_valued_nwa(InfValFn::LimAvg);
  auto& slave = nwa.slaves[0];
  WeightedAutomaton one(sigma, FinValFn::sum(), WordMode::Finite);
  StateId p = one.add_state("p");
  StateId f = one.add_state("f", true);
  one.add_transition(p, 0, f, Weight(1));
  one.add_transition(p, 1, f, Weight(4));
  slave = one;
  return {nwa, m};
}

Dfa dfa(std::size_t states, std::vector<std::tuple<StateId, LetterId, StateId>> moves, std::vector<StateId> accepting) {
  Dfa d(Alphabet({"a", "b"}));
  for (std::size_t i = 0; i < states; ++i) d.add_state("d" + std::to_string(i));
  for (auto s : accepting) d.set_accepting(s);
  for (auto [from, letter, to] : moves) d.add_transition(from, letter, to, {});
  return d;
}

void expect_points(const AnalysisReport& r, std::vector<std::pair<ExtValue, Rational>> expected) {
  ASSERT_TRUE(r.distribution.has_value());
  ASSERT_EQ(r.distribution->points.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(r.distribution->points[i].value, expected[i].first);
    EXPECT_EQ(r.distribution->points[i].mass, expected[i].second);
  }
}

void expect_consistent(const AnalysisReport& r) {
  ASSERT_TRUE(r.distribution.has_value());
  const auto& d = *r.distribution;
  Rational total = d.rejection_mass;
  bool finite = true;
  Rational weighted = 0;
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    EXPECT_GT(d.points[i].mass, 0);
    if (i > 0) EXPECT_LT(d.points[i - 1].value, d.points[i].value);
    total += d.points[i].mass;
    if (d.points[i].value.is_finite()) weighted += d.points[i].value.rational() * d.points[i].mass;
    else finite = false;
  }
  EXPECT_EQ(total, Rational(1));
  Rational last = 0;
  for (const auto& p : d.points) {
    auto c = d.cdf(p.value);
    EXPECT_GE(c, last);
    last = c;
  }
  if (!d.points.empty()) EXPECT_EQ(d.cdf(d.points.back().value), Rational(1));
  if (finite && r.expected) EXPECT_EQ(*r.expected, ExtValue(weighted));
}

}  // namespace

TEST(DiscreteDistribution, MergesAndSorts) {
  auto d = DiscreteDistribution::from_points({{ExtValue(3), Rational(1, 4)},
                                              {ExtValue(1), Rational(1, 4)},
                                              {ExtValue(3), Rational(1, 4)},
                                              {ExtValue(7), Rational(0)},
                                              {ExtValue::minus_infinity(), Rational(1, 4)}});
  ASSERT_EQ(d.points.size(), 3u);
  EXPECT_EQ(d.points[2].mass, Rational(1, 2));
  EXPECT_EQ(d.cdf(ExtValue(2)), Rational(1, 2));
  EXPECT_EQ(d.expectation(), ExtValue::minus_infinity());
  auto both = DiscreteDistribution::from_points(
      {{ExtValue::minus_infinity(), Rational(1, 2)}, {ExtValue::plus_infinity(), Rational(1, 2)}});
  EXPECT_EQ(code_of([&] { both.expectation(); }), ErrorCode::UndefinedExpected);
}

TEST(AlmostSureAcceptance, ResponseTimeWithRequestGrant) {
  auto r = almost_sure_acceptance(build_art(2), request_grant_chain(Rational(1, 2)));
  EXPECT_TRUE(r.almost_sure);
  EXPECT_EQ(r.rejecting_mass, Rational(0));
}

TEST(AlmostSureAcceptance, ResponseTimeWithUniformChain) {
  auto art = build_art(2);
  auto r = almost_sure_acceptance(art, uniform_chain(art.alphabet()));
  EXPECT_FALSE(r.almost_sure);
  EXPECT_GE(r.rejecting_mass, Rational(2, 3));
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(AlmostSureAcceptance, DummyOnlyLaunches) {
  Alphabet sigma({"a", "b"});
  auto r = almost_sure_acceptance(all_dummy(sigma, InfValFn::LimAvg), uniform_chain(sigma));
  EXPECT_FALSE(r.almost_sure);
}

TEST(AlmostSureAcceptance, RandomCompleteInstances) {
  qt::Rng rng(2);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 20; ++round) {
    auto nwa = qt::random_nwa(rng, sigma, InfValFn::LimInf, FinValFn::sum(), {});
    auto m = qt::random_full_chain(rng, sigma, 2);
    EXPECT_TRUE(almost_sure_acceptance(nwa, m).almost_sure);
  }
}

TEST(SlaveMetrics, ResponseTimeSlave) {
  auto art = build_art(2);
  auto m = request_grant_chain(Rational(1, 2));
  LaunchEdge first{0, 1};
  EXPECT_EQ(min_achievable_slave_value(art.slaves[1], m, 0, first), ExtValue(1));
  EXPECT_EQ(max_achievable_slave_value(art.slaves[1], m, 0, first), ExtValue::plus_infinity());
  EXPECT_EQ(slave_expected_value(art.slaves[1], m, 0, first), ExtValue(2));
  EXPECT_TRUE(slave_expected_value(art.slaves[0], m, 0, first).is_bottom());
}

TEST(SlaveMetrics, GeometricClosedForm) {
  auto art = build_art(1);
  for (auto p : {Rational(1, 3), Rational(3, 4), Rational(1)}) {
    auto m = request_grant_chain(p);
    EXPECT_EQ(slave_expected_value(art.slaves[1], m, 0, LaunchEdge{0, 1}), ExtValue(1 / p));
  }
}

TEST(SlaveMetrics, NegativeCycleAndNonNegativeWeights) {
  auto nwa = negative_loop_nwa(InfValFn::LimInf);
  auto m = uniform_chain(nwa.alphabet());
  EXPECT_EQ(min_achievable_slave_value(nwa.slaves[0], m, 0), ExtValue::minus_infinity());
  EXPECT_EQ(max_achievable_slave_value(nwa.slaves[0], m, 0), ExtValue(0));
  auto plus = with_value_function(nwa.slaves[0], FinValFn::sum_plus());
  EXPECT_EQ(min_achievable_slave_value(plus, m, 0), ExtValue(0));
  EXPECT_EQ(max_achievable_slave_value(plus, m, 0), ExtValue::plus_infinity());
  auto bounded = with_value_function(nwa.slaves[0], FinValFn::bsum(3));
  EXPECT_EQ(min_achievable_slave_value(bounded, m, 0), ExtValue(-3));
}

TEST(SlaveMetrics, NoAcceptanceRaises) {
  Alphabet sigma({"a"});
  WeightedAutomaton s(sigma, FinValFn::sum(), WordMode::Finite);
  StateId q = s.add_state("q");
  s.add_state("f", true);
  s.add_transition(q, 0, q, Weight(1));
  auto m = uniform_chain(sigma);
  EXPECT_EQ(code_of([&] { min_achievable_slave_value(s, m, 0); }), ErrorCode::NoAcceptingPath);
  EXPECT_EQ(code_of([&] { slave_expected_value(s, m, 0); }), ErrorCode::NotAlmostSurelyTerminating);
}

TEST(SlaveMetrics, MinimumMatchesWordEnumeration) {
  qt::Rng rng(40);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 60; ++round) {
    auto fn = std::vector<FinValFn>{FinValFn::min(), FinValFn::max(), FinValFn::sum_plus(), FinValFn::bsum(2)}[round % 4];
    auto slave = qt::random_slave(rng, sigma, 3, fn, -2, 2);
    LabeledMarkovChain m(sigma);
    m.add_state("x");
    m.add_state("y");
    m.add_edge(0, 0, 1, Rational(1, 2));
    m.add_edge(0, 1, 0, Rational(1, 2));
    m.add_edge(1, 0, 0, Rational(1, 3));
    m.add_edge(1, 1, 1, Rational(2, 3));
    std::optional<ExtValue> best_min, best_max;
    std::function<void(StateId, Word&)> rec = [&](StateId s, Word& w) {
      if (!w.empty()) {
        if (auto v = run_slave(slave, w)) {
          if (!best_min || *v < *best_min) best_min = *v;
          if (!best_max || *best_max < *v) best_max = *v;
          return;
        }
      }
      if (w.size() == 12) return;
      for (auto e : m.out(s)) {
        w.push_back(m.edges()[e].letter);
        rec(m.edges()[e].to, w);
        w.pop_back();
      }
    };
    Word w;
    rec(0, w);
    ASSERT_TRUE(best_min.has_value());
    EXPECT_EQ(min_achievable_slave_value(slave, m, 0), *best_min);
    auto high = max_achievable_slave_value(slave, m, 0);
    if (high == ExtValue::plus_infinity()) {
      EXPECT_EQ(fn.kind, FinValFn::Kind::SumPlus);
    } else {
      EXPECT_EQ(high, *best_max);
    }
  }
}

TEST(LimInfAnalysis, LetterValued) {
  auto m = uniform_chain(Alphabet({"a", "b"}));
  auto low = analyze_liminf_nwa(qt::letter_valued_nwa(InfValFn::LimInf), m);
  EXPECT_EQ(*low.expected, ExtValue(1));
  expect_points(low, {{ExtValue(1), Rational(1)}});
  EXPECT_EQ(low.method, Method::LimInfScc);
  auto high = analyze_liminf_nwa(qt::letter_valued_nwa(InfValFn::LimSup), m);
  EXPECT_EQ(*high.expected, ExtValue(2));
  expect_points(high, {{ExtValue(2), Rational(1)}});
}

TEST(LimInfAnalysis, NegativeCycle) {
  auto nwa = negative_loop_nwa(InfValFn::LimInf);
  auto r = analyze_liminf_nwa(nwa, uniform_chain(nwa.alphabet()));
  EXPECT_EQ(*r.expected, ExtValue::minus_infinity());
  expect_points(r, {{ExtValue::minus_infinity(), Rational(1)}});
}

TEST(LimInfAnalysis, ZeroOneLawOnStronglyConnectedInstances) {
  qt::Rng rng(50);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 30; ++round) {
    auto nwa = qt::random_nwa(rng, sigma, InfValFn::LimInf, FinValFn::sum(), {});
    auto m = qt::random_full_chain(rng, sigma, 2);
    auto r = analyze_liminf_nwa(nwa, m);
    ASSERT_EQ(r.distribution->points.size(), 1u);
    expect_consistent(r);
    // The product of a complete master with a full-support chain is one SCC here.
    std::optional<ExtValue> low;
    for (const auto& t : nwa.master.transitions()) {
      if (nwa.is_silent_launch(t.label)) continue;
      for (StateId s = 0; s < m.num_states(); ++s) {
        for (auto e : m.out(s)) {
          const auto& edge = m.edges()[e];
          if (edge.letter != t.letter) continue;
          auto v = min_achievable_slave_value(nwa.slaves[t.label], m, s, LaunchEdge{edge.letter, edge.to});
          if (!low || v < *low) low = v;
        }
      }
    }
    EXPECT_EQ(r.distribution->points[0].value, *low);
  }
}

TEST(DeterministicWa, Examples) {
  Alphabet sigma({"a", "b"});
  auto m = uniform_chain(sigma);
  WeightedAutomaton inf(sigma, InfValFn::Inf, WordMode::Infinite);
  StateId q = inf.add_state("q", true);
  inf.add_transition(q, 0, q, Weight(0));
  inf.add_transition(q, 1, q, Weight(1));
  auto r = analyze_deterministic_wa(inf, m);
  expect_points(r, {{ExtValue(0), Rational(1)}});
  EXPECT_EQ(*r.expected, ExtValue(0));
  auto avg = analyze_deterministic_wa(with_value_function(inf, InfValFn::LimAvg), m);
  EXPECT_EQ(*avg.expected, ExtValue(Rational(1, 2)));

  LabeledMarkovChain split(sigma);
  StateId s = split.add_state("s");
  StateId x = split.add_state("x");
  StateId y = split.add_state("y");
  split.add_edge(s, 0, x, Rational(1, 2));
  split.add_edge(s, 1, y, Rational(1, 2));
  split.add_edge(x, 0, x, Rational(1));
  split.add_edge(y, 1, y, Rational(1));
  WeightedAutomaton lim(sigma, InfValFn::LimInf, WordMode::Infinite);
  StateId p = lim.add_state("p", true);
  lim.add_transition(p, 0, p, Weight(1));
  lim.add_transition(p, 1, p, Weight(3));
  auto rl = analyze_deterministic_wa(lim, split);
  expect_points(rl, {{ExtValue(1), Rational(1, 2)}, {ExtValue(3), Rational(1, 2)}});
  EXPECT_EQ(*rl.expected, ExtValue(2));
}

TEST(DeterministicWa, RejectionMassRaises) {
  Alphabet sigma({"a", "b"});
  WeightedAutomaton wa(sigma, InfValFn::Inf, WordMode::Infinite);
  StateId q = wa.add_state("q", true);
  wa.add_transition(q, 0, q, Weight(0));
  EXPECT_EQ(code_of([&] { analyze_deterministic_wa(wa, uniform_chain(sigma)); }), ErrorCode::RejectionMassPositive);
}

TEST(DeterministicWa, ExtremumMatchesOracle) {
  qt::Rng rng(60);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 80; ++round) {
    auto fn = round % 2 ? InfValFn::Inf : InfValFn::Sup;
    std::size_t n = static_cast<std::size_t>(qt::uniform_int(rng, 1, 3));
    WeightedAutomaton wa(sigma, fn, WordMode::Infinite);
    for (std::size_t i = 0; i < n; ++i) wa.add_state("q" + std::to_string(i), true);
    for (StateId q = 0; q < n; ++q) {
      for (LetterId a = 0; a < 2; ++a) {
        wa.add_transition(q, a, static_cast<StateId>(qt::uniform_int(rng, 0, static_cast<int>(n) - 1)),
                          Weight(qt::uniform_int(rng, 0, 2)));
      }
    }
    auto m = qt::random_full_chain(rng, sigma, static_cast<std::size_t>(qt::uniform_int(rng, 1, 2)));
    auto r = analyze_deterministic_wa(wa, m);
    auto oracle = qt::extremum_wa_oracle(wa, m);
    ASSERT_EQ(r.distribution->points.size(), oracle.values.size());
    std::size_t i = 0;
    for (const auto& [v, mass] : oracle.values) {
      EXPECT_EQ(r.distribution->points[i].value, ExtValue(Rational(v)));
      EXPECT_EQ(r.distribution->points[i].mass, mass);
      ++i;
    }
    expect_consistent(r);
  }
}

TEST(BsumToInf, MatchesNwaOnAllPrefixes) {
  qt::Rng rng(70);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 30; ++round) {
    auto fn = round % 2 ? InfValFn::Inf : InfValFn::Sup;
    auto slave_fn = std::vector<FinValFn>{FinValFn::min(), FinValFn::max(), FinValFn::bsum(2)}[round % 3];
    qt::NwaShape shape;
    shape.dummy = round % 4 == 0;
    auto nwa = qt::random_nwa(rng, sigma, fn, slave_fn, shape);
    auto wa = bsum_nwa_to_inf_wa(nwa);
    EXPECT_TRUE(wa.is_deterministic());
    EquivalenceOptions opts;
    opts.mode = fn == InfValFn::Inf ? CompareMode::RunningMin : CompareMode::RunningMax;
    auto eq = check_equivalence_on_prefixes(&nwa, &wa, sigma, 8, opts);
    EXPECT_TRUE(eq.equivalent) << eq.reason << " on " << sigma.format(eq.counterexample);
  }
}

TEST(BsumToInf, KeepsOneCopyPerSlaveState) {
  // Each launch starts a copy that may wait forever; copies in the same
  // state are merged, so the construction stays finite.
  Alphabet sigma({"a", "b"});
  NestedWeightedAutomaton nwa;
  nwa.master = MasterAutomaton(sigma);
  StateId q = nwa.master.add_state("q", true);
  nwa.master.add_transition(q, 0, q, 0);
  nwa.master.add_transition(q, 1, q, 0);
  nwa.master_fn = InfValFn::Inf;
  WeightedAutomaton slave(sigma, FinValFn::min(), WordMode::Finite);
  StateId s0 = slave.add_state("s0");
  StateId s1 = slave.add_state("s1");
  StateId f = slave.add_state("f", true);
  slave.add_transition(s0, 0, s1, Weight(1));
  slave.add_transition(s0, 1, s1, Weight(3));
  slave.add_transition(s1, 0, s1, Weight(5));
  slave.add_transition(s1, 1, f, Weight(5));
  nwa.slaves.push_back(slave);
  auto wa = bsum_nwa_to_inf_wa(nwa);
  EXPECT_LE(wa.num_states(), 8u);
  // After "ab", the copies launched at 'a' (value 1) and at 'b' (value 3) meet in s1.
  std::optional<Integer> low;
  StateId at = wa.initial();
  for (LetterId a : Word{0, 1, 1}) {
    const auto* t = wa.step(at, a);
    ASSERT_NE(t, nullptr);
    if (!t->label.is_silent()) low = low ? std::min(*low, t->label.value()) : t->label.value();
    at = t->to;
  }
  EXPECT_EQ(low, std::optional<Integer>(1));
}

TEST(InfExact, CnfExamples) {
  auto m = uniform_chain(Alphabet({"0", "1"}));
  auto run = [&](Cnf cnf) { return analyze_inf_exact(cnf_to_nwa(cnf), m); };
  auto r1 = run({2, {{1, 2}}});
  EXPECT_EQ(*r1.expected, ExtValue(Rational(3, 4)));
  EXPECT_EQ(1 - r1.distribution->cdf(ExtValue(0)), Rational(3, 4));
  EXPECT_EQ(*run({1, {{1}}}).expected, ExtValue(Rational(1, 2)));
  auto r3 = run({1, {{1}, {-1}}});
  EXPECT_EQ(*r3.expected, ExtValue(0));
  EXPECT_EQ(r3.distribution->cdf(ExtValue(0)), Rational(1));
}

TEST(InfExact, IntersectionAgainstPrefixEnumeration) {
  // Words ending in b, and words with an even number of a.
  auto ends_b = dfa(2, {{0, 0, 0}, {0, 1, 1}, {1, 0, 0}, {1, 1, 1}}, {1});
  auto even_a = dfa(2, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}}, {0});
  auto nwa = intersection_to_nwa({ends_b, even_a});
  auto m = uniform_chain(nwa.alphabet());
  auto exact = analyze_inf_exact(nwa, m);
  expect_consistent(exact);
  Rational zero = exact.distribution->cdf(ExtValue(0));
  std::size_t depth = 10;
  auto brute = exhaustive_prefix_extremum(nwa, m, depth);
  EXPECT_EQ(brute.rejected_mass, Rational(0));
  Rational zero_by_depth = 0;
  for (const auto& [v, mass] : brute.outcomes) {
    if (v && *v == ExtValue(0)) zero_by_depth += mass;
  }
  // Both slaves have finished once a # follows the two-letter prefix.
  Rational open = 1;
  for (std::size_t i = 2; i < depth; ++i) open *= Rational(2, 3);
  EXPECT_LE(zero_by_depth, zero);
  EXPECT_LE(zero, zero_by_depth + open);

  auto ends_a = dfa(2, {{0, 0, 1}, {0, 1, 0}, {1, 0, 1}, {1, 1, 0}}, {1});
  auto disjoint = intersection_to_nwa({ends_b, ends_a});
  EXPECT_EQ(*analyze_inf_exact(disjoint, m).expected, ExtValue(0));
  auto same = intersection_to_nwa({ends_b, ends_b});
  auto trace = simulate_nwa_prefix(same, same.alphabet().parse_word("aaab#"));
  for (const auto& c : trace.completed) EXPECT_EQ(c.value, ExtValue(1));
}

TEST(InfExact, SupSumPlusMatchesBoundedSum) {
  qt::Rng rng(80);
  Alphabet sigma({"a", "b"});
  auto m = uniform_chain(sigma);
  auto letters = qt::letter_valued_nwa(InfValFn::Sup);
  letters.slaves[0] = with_value_function(letters.slaves[0], FinValFn::sum_plus());
  std::vector<NestedWeightedAutomaton> cases{letters};
  for (int i = 0; i < 8; ++i) {
    qt::NwaShape shape;
    shape.wmin = 0;
    shape.wmax = 2;
    cases.push_back(qt::random_nwa(rng, sigma, InfValFn::Sup, FinValFn::sum_plus(), shape));
  }
  for (const auto& nwa : cases) {
    auto open = analyze_inf_exact(nwa, m, Rational(5));
    EXPECT_FALSE(open.expected.has_value());
    EXPECT_EQ(open.distribution_exact_up_to, std::optional<Rational>(Rational(5)));
    auto clipped = analyze_inf_exact(map_slaves(nwa, [](const WeightedAutomaton& s) {
                                       return with_value_function(s, FinValFn::bsum(6));
                                     }),
                                     m);
    ASSERT_EQ(open.distribution->points.size(), clipped.distribution->points.size());
    for (std::size_t i = 0; i < open.distribution->points.size(); ++i) {
      EXPECT_EQ(open.distribution->points[i].value, clipped.distribution->points[i].value);
      EXPECT_EQ(open.distribution->points[i].mass, clipped.distribution->points[i].mass);
    }
  }
  EXPECT_EQ(code_of([&] { analyze_inf_exact(letters, m); }), ErrorCode::OpenProblem);
}

TEST(InfExact, UnboundedBelowRaises) {
  auto nwa = negative_loop_nwa(InfValFn::Inf);
  auto m = uniform_chain(nwa.alphabet());
  try {
    analyze_inf_exact(nwa, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SumUnboundedBelow);
    EXPECT_NE(std::string(e.what()).find("--approx"), std::string::npos);
  }
}

TEST(InfExact, NonDeterministicRaises) {
  auto nwa = qt::letter_valued_nwa(InfValFn::Inf);
  nwa.master.add_transition(0, 0, 0, 0);
  EXPECT_EQ(code_of([&] { analyze_inf_exact(nwa, uniform_chain(nwa.alphabet())); }), ErrorCode::NonDeterministic);
}

TEST(InfApprox, ApproximationBound) {
  EXPECT_GE(approximation_bound(3, Rational(1, 2), Rational(1, 100)), Integer(4));
  EXPECT_LE(approximation_bound(3, Rational(1, 2), Rational(1, 100)),
            approximation_bound(3, Rational(1, 2), Rational(1, 1000)));
  EXPECT_THROW(approximation_bound(400, Rational(1, 2), Rational(1, 100)), Error);
}

TEST(InfApprox, UnboundedVariantIsReturned) {
  auto nwa = negative_loop_nwa(InfValFn::Inf);
  auto r = approx_inf_sum(nwa, uniform_chain(nwa.alphabet()), Rational(1, 100));
  EXPECT_EQ(*r.expected, ExtValue::minus_infinity());
}

TEST(InfApprox, CloseToExactWhenBoundedBelow) {
  qt::Rng rng(90);
  Alphabet sigma({"a", "b"});
  int tested = 0;
  for (int round = 0; round < 30 && tested < 8; ++round) {
    qt::NwaShape shape;
    shape.master_states = 2;
    shape.slave_states = 2;
    auto nwa = qt::random_nwa(rng, sigma, InfValFn::Inf, FinValFn::sum(), shape);
    auto m = qt::random_full_chain(rng, sigma, 1);
    AnalysisReport exact;
    try {
      exact = analyze_inf_exact(nwa, m);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::SumUnboundedBelow);
      continue;
    }
    ++tested;
    for (auto eps : {Rational(1, 100), Rational(10)}) {
      auto approx = approx_inf_sum(nwa, m, eps);
      EXPECT_FALSE(approx.exact);
      EXPECT_EQ(approx.method, Method::InfApprox);
      EXPECT_LE(abs(approx.expected->rational() - exact.expected->rational()), eps);
    }
  }
  EXPECT_GT(tested, 2);
}

TEST(LimAvgAnalysis, ResponseTime) {
  auto r = analyze_limavg_nwa(build_art(2), request_grant_chain(Rational(1, 2)));
  EXPECT_EQ(*r.expected, ExtValue(2));
  expect_points(r, {{ExtValue(2), Rational(1)}});
  EXPECT_EQ(r.method, Method::LimAvgProduct);
  EXPECT_TRUE(r.exact);
}

TEST(LimAvgAnalysis, MixtureOfComponents) {
  auto [nwa, m] = split_instance();
  auto r = analyze_limavg_nwa(nwa, m);
  EXPECT_EQ(*r.expected, ExtValue(3));
  expect_points(r, {{ExtValue(1), Rational(1, 3)}, {ExtValue(4), Rational(2, 3)}});
}

TEST(LimAvgAnalysis, DummyOnlyIsRejected) {
  Alphabet sigma({"a", "b"});
  EXPECT_EQ(code_of([&] { analyze_limavg_nwa(all_dummy(sigma, InfValFn::LimAvg), uniform_chain(sigma)); }),
            ErrorCode::NotAlmostSureAccepting);
}

TEST(LimAvgAnalysis, RandomReportsAreConsistent) {
  qt::Rng rng(100);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 15; ++round) {
    qt::NwaShape shape;
    shape.dummy = round % 2 == 0;
    auto nwa = qt::random_nwa(rng, sigma, InfValFn::LimAvg, FinValFn::sum(), shape);
    auto m = qt::random_full_chain(rng, sigma, 2);
    expect_consistent(analyze_limavg_nwa(nwa, m));
  }
}

TEST(Duality, ReportsNegate) {
  qt::Rng rng(110);
  Alphabet sigma({"a", "b"});
  std::vector<std::pair<InfValFn, FinValFn>> kinds{{InfValFn::Inf, FinValFn::min()},
                                                   {InfValFn::Sup, FinValFn::max()},
                                                   {InfValFn::Inf, FinValFn::bsum(2)},
                                                   {InfValFn::LimInf, FinValFn::sum()},
                                                   {InfValFn::LimSup, FinValFn::sum()}};
  for (int round = 0; round < 20; ++round) {
    auto [fn, slave_fn] = kinds[static_cast<std::size_t>(round) % kinds.size()];
    auto nwa = qt::random_nwa(rng, sigma, fn, slave_fn, {});
    auto m = qt::random_full_chain(rng, sigma, 2);
    auto r = analyze_nwa(nwa, m);
    auto d = analyze_nwa(dualize(nwa), m);
    auto neg = negate(r);
    ASSERT_EQ(neg.distribution->points.size(), d.distribution->points.size());
    for (std::size_t i = 0; i < d.distribution->points.size(); ++i) {
      EXPECT_EQ(neg.distribution->points[i].value, d.distribution->points[i].value);
      EXPECT_EQ(neg.distribution->points[i].mass, d.distribution->points[i].mass);
    }
    EXPECT_EQ(*d.expected, -*r.expected);
    expect_consistent(r);
  }
}

TEST(AnalyzeNwa, Dispatch) {
  auto m = uniform_chain(Alphabet({"a", "b"}));
  EXPECT_EQ(analyze_nwa(qt::letter_valued_nwa(InfValFn::LimInf), m).method, Method::LimInfScc);
  EXPECT_EQ(analyze_nwa(qt::letter_valued_nwa(InfValFn::Inf), m).method, Method::InfExact);
  EXPECT_EQ(analyze_nwa(qt::letter_valued_nwa(InfValFn::LimAvg), m).method, Method::LimAvgProduct);
  EXPECT_EQ(*analyze_nwa(qt::letter_valued_nwa(InfValFn::LimAvg), m).expected, ExtValue(Rational(3, 2)));
  EXPECT_EQ(*analyze_nwa(qt::letter_valued_nwa(InfValFn::Sup), m).expected, ExtValue(2));
}
