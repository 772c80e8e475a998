#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "quanta/core.hpp"
#include "random_instances.hpp"

using namespace quanta;
namespace qt = quanta::testing;

namespace {

std::vector<Integer> ints(std::initializer_list<long> xs) {
  std::vector<Integer> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

/// Calls f on every word over the alphabet up to the given length.
void for_all_words(std::size_t letters, std::size_t max_len, const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> rec = [&]() {
    f(w);
    if (w.size() == max_len) return;
    for (LetterId a = 0; a < letters; ++a) {
      w.push_back(a);
      rec();
      w.pop_back();
    }
  };
  rec();
}

}  // namespace

TEST(Rational, CanonicalTextAlwaysHasDenominator) {
  EXPECT_EQ(to_string(Rational(2)), "2/1");
  EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
  EXPECT_EQ(to_string(parse_rational("-3")), "-3/1");
  EXPECT_EQ(to_string(parse_rational("2/-4")), "-1/2");
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("0.5"), Error);
}

TEST(ExtValue, OrderAndArithmetic) {
  auto minus = ExtValue::minus_infinity();
  auto plus = ExtValue::plus_infinity();
  EXPECT_LT(minus, ExtValue(-1000));
  EXPECT_LT(ExtValue(Rational(1, 3)), ExtValue(Rational(1, 2)));
  EXPECT_LT(ExtValue(5), plus);
  EXPECT_EQ(ExtValue::bottom() <=> ExtValue(0), std::partial_ordering::unordered);
  EXPECT_EQ(ExtValue(2) + ExtValue(3), ExtValue(5));
  EXPECT_EQ(minus + ExtValue(3), minus);
  EXPECT_THROW(minus + plus, Error);
  EXPECT_EQ(-plus, minus);
  for (const char* text : {"3/4", "+inf", "-inf", "bottom", "-2/1"}) {
    EXPECT_EQ(ExtValue::parse(text).to_string(), text);
  }
}

TEST(ApplyFinval, Examples) {
  EXPECT_EQ(apply_finval(FinValFn::sum(), ints({1, -2, 3})), ExtValue(2));
  EXPECT_EQ(apply_finval(FinValFn::bsum(2), ints({1, 1, 1})), ExtValue(2));
  EXPECT_TRUE(apply_finval(FinValFn::min(), {}).is_bottom());
  EXPECT_EQ(apply_finval(FinValFn::sum_plus(), ints({1, -2})), ExtValue(3));
  EXPECT_EQ(apply_finval(FinValFn::max(), ints({1, 5, -2})), ExtValue(5));
  EXPECT_EQ(apply_finval(FinValFn::min(), ints({1, 5, -2})), ExtValue(-2));
}

TEST(ApplyFinval, BoundedSumKeepsFirstExceededBound) {
  EXPECT_EQ(apply_finval(FinValFn::bsum(2), ints({-3, 5})), ExtValue(-2));
  EXPECT_EQ(apply_finval(FinValFn::bsum(2), ints({2, -4})), ExtValue(-2));
  EXPECT_EQ(apply_finval(FinValFn::bsum(2), ints({2, -1})), ExtValue(1));
}

TEST(ApplyFinval, PropertiesOnRandomSequences) {
  qt::Rng rng(11);
  for (int round = 0; round < 500; ++round) {
    std::vector<Integer> seq;
    int len = qt::uniform_int(rng, 1, 8);
    for (int i = 0; i < len; ++i) seq.emplace_back(qt::uniform_int(rng, -4, 4));
    int b = qt::uniform_int(rng, 1, 5);
    auto bs = apply_finval(FinValFn::bsum(b), seq).rational();
    EXPECT_LE(bs, b);
    EXPECT_GE(bs, -b);
    auto sp = apply_finval(FinValFn::sum_plus(), seq).rational();
    auto s = apply_finval(FinValFn::sum(), seq).rational();
    EXPECT_GE(sp, abs(s));
    EXPECT_GE(sp, 0);
  }
}

TEST(EstimateInfval, Examples) {
  std::vector<ExtValue> a{ExtValue(1), ExtValue::bottom(), ExtValue(3)};
  EXPECT_EQ(estimate_infval(InfValFn::LimAvg, a, 0), Rational(2));
  std::vector<ExtValue> b{ExtValue(5), ExtValue(2), ExtValue(9)};
  EXPECT_EQ(estimate_infval(InfValFn::Inf, b, 0), Rational(2));
  EXPECT_EQ(estimate_infval(InfValFn::Sup, b, 0), Rational(9));
  std::vector<ExtValue> c{ExtValue(9), ExtValue(1), ExtValue(1), ExtValue(1)};
  EXPECT_EQ(estimate_infval(InfValFn::LimInf, c, 1), Rational(1));
  std::vector<ExtValue> d{ExtValue(4), ExtValue::bottom()};
  try {
    estimate_infval(InfValFn::LimAvg, d, 1);
    FAIL() << "expected EmptyAfterFilter";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyAfterFilter);
  }
}

namespace {

WeightedAutomaton loop_then_hash() {
  WeightedAutomaton wa(Alphabet({"a", "#"}), FinValFn::sum(), WordMode::Finite);
  StateId q = wa.add_state("q");
  StateId f = wa.add_state("f", true);
  wa.add_transition(q, 0, q, Weight(1));
  wa.add_transition(q, 1, f, Weight(0));
  return wa;
}

}  // namespace

TEST(RunWeightedFinite, Examples) {
  auto wa = loop_then_hash();
  EXPECT_EQ(run_weighted_finite(wa, wa.alphabet().parse_word("aa#")), ExtValue(2));
  EXPECT_EQ(run_weighted_finite(wa, wa.alphabet().parse_word("a#a")), ExtValue::plus_infinity());
  EXPECT_EQ(run_weighted_finite(wa, wa.alphabet().parse_word("aa")), ExtValue::plus_infinity());
  WeightedAutomaton one(Alphabet({"a"}), FinValFn::sum(), WordMode::Finite);
  one.add_state("q", true);
  EXPECT_TRUE(run_weighted_finite(one, {}).is_bottom());
}

TEST(RunSlave, HaltsAtFirstAcceptance) {
  auto wa = loop_then_hash();
  EXPECT_EQ(*run_slave(wa, wa.alphabet().parse_word("a#aaa")), ExtValue(1));
  EXPECT_FALSE(run_slave(wa, wa.alphabet().parse_word("aaa")).has_value());
}

TEST(Alphabet, WordsAndValidation) {
  Alphabet single({"a", "b"});
  EXPECT_EQ(single.format(single.parse_word("abba")), "abba");
  Alphabet multi({"req", "gnt"});
  EXPECT_EQ(multi.parse_word("req gnt req").size(), 3u);
  EXPECT_THROW(Alphabet({"a", "a"}), Error);
  EXPECT_THROW(Alphabet(std::vector<std::string>{}), Error);
  EXPECT_THROW(single.parse_word("abc"), Error);
}

TEST(Automaton, DuplicateKeyMarksNondeterminism) {
  WeightedAutomaton wa(Alphabet({"a"}), FinValFn::sum(), WordMode::Finite);
  StateId q = wa.add_state("q");
  wa.add_transition(q, 0, q, Weight(1));
  EXPECT_TRUE(wa.is_deterministic());
  wa.add_transition(q, 0, q, Weight(2));
  EXPECT_FALSE(wa.is_deterministic());
  try {
    wa.require_deterministic("slave");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonDeterministic);
    EXPECT_NE(std::string(e.what()).find("undecidable"), std::string::npos);
  }
}

TEST(Dualize, NegatesValuesAndIsInvolution) {
  qt::Rng rng(3);
  Alphabet sigma({"a", "b"});
  for (auto fn : {FinValFn::min(), FinValFn::max(), FinValFn::sum(), FinValFn::bsum(3)}) {
    for (int round = 0; round < 10; ++round) {
      auto wa = qt::random_slave(rng, sigma, 3, fn, -3, 3);
      auto dual = dualize(wa);
      auto back = dualize(dual);
      ASSERT_EQ(back.value_function(), wa.value_function());
      for (std::size_t i = 0; i < wa.transitions().size(); ++i) {
        EXPECT_EQ(back.transitions()[i].label, wa.transitions()[i].label);
      }
      for_all_words(2, 8, [&](const Word& w) {
        auto v = run_weighted_finite(wa, w);
        if (v.kind() == ExtValue::Kind::PlusInfinity || v.is_bottom()) return;
        EXPECT_EQ(run_weighted_finite(dual, w), -v);
      });
    }
  }
  auto sp = qt::random_slave(rng, sigma, 2, FinValFn::sum_plus(), 0, 2);
  EXPECT_THROW(dualize(sp), Error);
}

TEST(Dualize, MinSlaveOnAb) {
  WeightedAutomaton s(Alphabet({"a", "b"}), FinValFn::min(), WordMode::Finite);
  StateId q0 = s.add_state("q0");
  StateId q1 = s.add_state("q1");
  StateId f = s.add_state("f", true);
  s.add_transition(q0, 0, q1, Weight(5));
  s.add_transition(q1, 1, f, Weight(3));
  Word ab{0, 1};
  EXPECT_EQ(run_weighted_finite(s, ab), ExtValue(3));
  auto d = dualize(s);
  EXPECT_EQ(std::get<FinValFn>(d.value_function()), FinValFn::max());
  EXPECT_EQ(run_weighted_finite(d, ab), ExtValue(-3));
}

TEST(NormalizeSlave, ExhaustiveEquivalence) {
  qt::Rng rng(5);
  Alphabet sigma({"a", "b"});
  for (int round = 0; round < 40; ++round) {
    auto fn = round % 2 ? FinValFn::min() : FinValFn::max();
    auto states = static_cast<std::size_t>(qt::uniform_int(rng, 2, 4));
    auto wa = qt::random_slave(rng, sigma, states, fn, -3, 3);
    if (round % 3 == 0) {
      // Non-prefix-free variant: an accepting state with an outgoing edge.
      wa.add_transition(static_cast<StateId>(states - 1), 0, 0, Weight(2));
    }
    auto norm = normalize_slave(wa);
    EXPECT_EQ(norm.finval().kind, FinValFn::Kind::BSum);
    std::set<Integer> distinct;
    Integer bound = 0;
    for (const auto& t : wa.transitions()) {
      distinct.insert(t.label.value());
      bound = std::max(bound, abs(t.label.value()));
    }
    EXPECT_EQ(norm.finval().bound, std::max(bound, Integer(1)));
    EXPECT_LE(norm.num_states(), wa.num_states() * distinct.size() + 1);
    for_all_words(2, 6, [&](const Word& w) {
      EXPECT_EQ(run_weighted_finite(norm, w), run_weighted_finite(wa, w)) << sigma.format(w);
      EXPECT_EQ(run_slave(norm, w), run_slave(wa, w)) << sigma.format(w);
    });
  }
}

TEST(NormalizeSlave, SingleTransition) {
  WeightedAutomaton s(Alphabet({"a"}), FinValFn::max(), WordMode::Finite);
  StateId q = s.add_state("q");
  StateId f = s.add_state("f", true);
  s.add_transition(q, 0, f, Weight(7));
  EXPECT_EQ(run_weighted_finite(normalize_slave(s), Word{0}), ExtValue(7));
}

TEST(NormalizeSlave, PicksMinimumOverPath) {
  WeightedAutomaton s(Alphabet({"a", "b", "#"}), FinValFn::min(), WordMode::Finite);
  StateId q = s.add_state("q");
  StateId f = s.add_state("f", true);
  s.add_transition(q, 0, q, Weight(1));
  s.add_transition(q, 1, q, Weight(5));
  s.add_transition(q, 2, f, Weight(5));
  auto norm = normalize_slave(s);
  EXPECT_EQ(run_weighted_finite(norm, s.alphabet().parse_word("ba#")), ExtValue(1));
  EXPECT_EQ(run_weighted_finite(norm, s.alphabet().parse_word("bb#")), ExtValue(5));
}

TEST(ToSumSlave, ExhaustiveEquivalence) {
  qt::Rng rng(9);
  Alphabet sigma({"a", "b"});
  for (auto fn : {FinValFn::min(), FinValFn::max(), FinValFn::sum_plus(), FinValFn::bsum(2), FinValFn::sum()}) {
    for (int round = 0; round < 10; ++round) {
      auto wa = qt::random_slave(rng, sigma, 3, fn, -2, 2);
      auto sum = to_sum_slave(wa);
      EXPECT_EQ(sum.finval().kind, FinValFn::Kind::Sum);
      for_all_words(2, 6, [&](const Word& w) { EXPECT_EQ(run_slave(sum, w), run_slave(wa, w)); });
    }
  }
}

TEST(ValidateSlave, FlagsAcceptingOutgoing) {
  auto wa = loop_then_hash();
  ValidationReport r;
  validate_slave(wa, "slave", r);
  EXPECT_TRUE(r.ok());
  wa.add_transition(1, 0, 0, Weight(0));
  ValidationReport r2;
  validate_slave(wa, "slave", r2);
  EXPECT_TRUE(r2.ok());
  EXPECT_TRUE(r2.has("prefix-free"));
}

TEST(ValueFunctionNames, ParseRoundTrip) {
  for (const char* n : {"Min", "Max", "Sum", "SumPlus", "Sup", "Inf", "LimSup", "LimInf", "LimAvg"}) {
    auto fn = parse_value_function(n, std::nullopt);
    std::string back = std::visit([](const auto& f) { return name(f); }, fn);
    EXPECT_EQ(back, n);
  }
  auto b = parse_value_function("BSum", Integer(4));
  EXPECT_EQ(std::get<FinValFn>(b), FinValFn::bsum(4));
  EXPECT_THROW(parse_value_function("BSum", std::nullopt), Error);
  EXPECT_THROW(parse_value_function("Avg", std::nullopt), Error);
}
