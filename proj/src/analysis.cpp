#include <algorithm>
#include <cmath>
#include <map>

#include "analysis_common.hpp"
#include "slave_graph.hpp"

namespace quanta {

DiscreteDistribution DiscreteDistribution::from_points(std::vector<PointMass> points) {
  for (const auto& p : points) {
    if (p.value.is_bottom()) throw Error(ErrorCode::InvalidArgument, "distribution point cannot be bottom");
    if (p.mass < 0) throw Error(ErrorCode::InvalidArgument, "negative probability mass");
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const PointMass& a, const PointMass& b) { return a.value < b.value; });
  DiscreteDistribution d;
  for (auto& p : points) {
    if (p.mass == 0) continue;
    if (!d.points.empty() && d.points.back().value == p.value) d.points.back().mass += p.mass;
    else d.points.push_back(std::move(p));
  }
  return d;
}

Rational DiscreteDistribution::cdf(const ExtValue& lambda) const {
  Rational total;
  for (const auto& p : points) {
    if (p.value <= lambda) total += p.mass;
  }
  return total;
}

ExtValue DiscreteDistribution::expectation() const {
  if (points.empty()) throw Error(ErrorCode::UndefinedExpected, "distribution carries no mass");
  bool low = points.front().value.kind() == ExtValue::Kind::MinusInfinity;
  bool high = points.back().value.kind() == ExtValue::Kind::PlusInfinity;
  if (low && high) throw Error(ErrorCode::UndefinedExpected, "both infinities carry positive mass");
  if (low) return ExtValue::minus_infinity();
  if (high) return ExtValue::plus_infinity();
  Rational total;
  for (const auto& p : points) total += p.mass * p.value.rational();
  return ExtValue(total);
}

std::string method_tag(Method method) {
  switch (method) {
    case Method::LimInfScc: return "liminf-scc";
    case Method::InfExact: return "inf-exact";
    case Method::InfApprox: return "inf-approx";
    case Method::LimAvgProduct: return "limavg-product";
    case Method::WaDirect: return "wa-direct";
  }
  return "unknown";
}

AnalysisReport negate(const AnalysisReport& report) {
  AnalysisReport out = report;
  if (out.expected && !out.expected->is_bottom()) out.expected = -*out.expected;
  if (out.distribution) {
    auto points = out.distribution->points;
    for (auto& p : points) p.value = -p.value;
    auto rejection = out.distribution->rejection_mass;
    out.distribution = DiscreteDistribution::from_points(std::move(points));
    out.distribution->rejection_mass = rejection;
  }
  out.almost_sure_witness.reset();
  detail::finish_report(out);
  return out;
}

namespace {

void require_master(const NestedWeightedAutomaton& nwa, std::initializer_list<InfValFn> allowed,
                    const char* what) {
  if (std::find(allowed.begin(), allowed.end(), nwa.master_fn) == allowed.end()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " does not apply to a " +
                                                name(nwa.master_fn) + " master");
  }
}

ExtValue pick(Extremum dir, const std::optional<ExtValue>& acc, const ExtValue& v) {
  if (!acc) return v;
  return dir == Extremum::Min ? (v < *acc ? v : *acc) : (v > *acc ? v : *acc);
}

/// Per launch (slave, chain edge) results, computed once per slave conversion.
class LaunchTable {
 public:
  LaunchTable(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) : nwa_(nwa), m_(m) {
    converted_.resize(nwa.slaves.size());
  }

  detail::SlaveGraph graph(SlaveIndex i, std::size_t chain_edge) {
    auto& sum = converted_[i];
    if (!sum) sum = to_sum_slave(nwa_.slaves[i]);
    const auto& e = m_.edges()[chain_edge];
    return detail::build_slave_graph(*sum, m_, e.from, LaunchEdge{e.letter, e.to});
  }

  ExtValue extremal(SlaveIndex i, std::size_t chain_edge, Extremum dir) {
    auto key = std::make_tuple(i, chain_edge, dir);
    auto it = extremal_.find(key);
    if (it != extremal_.end()) return it->second;
    ExtValue v = detail::extremal_sum(graph(i, chain_edge), dir);
    extremal_.emplace(key, v);
    return v;
  }

  Rational expected(SlaveIndex i, std::size_t chain_edge) {
    auto key = std::make_pair(i, chain_edge);
    auto it = expected_.find(key);
    if (it != expected_.end()) return it->second;
    auto g = graph(i, chain_edge);
    if (!detail::almost_surely_accepts(g)) {
      throw Error(ErrorCode::NotAlmostSurelyTerminating,
                  "slave " + std::to_string(i + 1) + " does not terminate almost surely");
    }
    Rational v = detail::expected_sum(g);
    expected_.emplace(key, v);
    return v;
  }

 private:
  const NestedWeightedAutomaton& nwa_;
  const LabeledMarkovChain& m_;
  std::vector<std::optional<WeightedAutomaton>> converted_;
  std::map<std::tuple<SlaveIndex, std::size_t, Extremum>, ExtValue> extremal_;
  std::map<std::pair<SlaveIndex, std::size_t>, Rational> expected_;
};

NestedWeightedAutomaton with_master_fn(NestedWeightedAutomaton nwa, InfValFn fn) {
  nwa.master_fn = fn;
  return nwa;
}

NestedWeightedAutomaton with_slave_fn(const NestedWeightedAutomaton& nwa, const FinValFn& fn) {
  return map_slaves(nwa, [&](const WeightedAutomaton& s) { return with_value_function(s, fn); });
}

/// Point value bounding the word value almost surely: the largest LimInf
/// value for Inf, the smallest LimSup value for Sup.
ExtValue threshold(const AnalysisReport& liminf, bool low) {
  const auto& pts = liminf.distribution->points;
  return low ? pts.back().value : pts.front().value;
}

long double log2_of(const Rational& x) {
  auto log2_int = [](const Integer& v) {
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return static_cast<long double>(std::log2(mant)) + exp;
  };
  return log2_int(x.get_num()) - log2_int(x.get_den());
}

}  // namespace

AnalysisReport analyze_liminf_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) {
  require_master(nwa, {InfValFn::LimInf, InfValFn::LimSup}, "analyze_liminf_nwa");
  detail::require_deterministic(nwa);
  detail::require_almost_sure(nwa, m);
  Extremum dir = nwa.master_fn == InfValFn::LimInf ? Extremum::Min : Extremum::Max;
  auto p = detail::master_product(nwa, m);
  auto sccs = reachable_end_sccs(p.chain);
  LaunchTable table(nwa, m);
  std::vector<PointMass> points;
  auto reach = reach_probabilities(p.chain, sccs);
  for (std::size_t j = 0; j < sccs.size(); ++j) {
    std::optional<ExtValue> value;
    for (std::size_t e : detail::edges_inside(p.chain, sccs[j])) {
      SlaveIndex i = *p.labels[e];
      if (nwa.is_silent_launch(i)) continue;
      value = pick(dir, value, table.extremal(i, *p.chain_edge[e], dir));
    }
    points.push_back({*value, reach[j]});
  }
  AnalysisReport report;
  report.method = Method::LimInfScc;
  report.distribution = DiscreteDistribution::from_points(std::move(points));
  report.expected = report.distribution->expectation();
  report.params["end_sccs"] = std::to_string(sccs.size());
  detail::finish_report(report);
  return report;
}

namespace {

/// `known_threshold` is the limit-variant value when the caller already has it.
AnalysisReport inf_exact(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                         std::optional<Rational> lambda, std::optional<ExtValue> known_threshold) {
  require_master(nwa, {InfValFn::Inf, InfValFn::Sup}, "analyze_inf_exact");
  detail::require_deterministic(nwa);
  detail::require_almost_sure(nwa, m);
  bool low = nwa.master_fn == InfValFn::Inf;
  InfValFn lim = low ? InfValFn::LimInf : InfValFn::LimSup;
  FinValFn g = nwa.slave_fn();

  NestedWeightedAutomaton clipped = nwa;
  std::optional<Integer> bound;
  std::optional<Rational> exact_up_to;
  switch (g.kind) {
    case FinValFn::Kind::Min:
    case FinValFn::Kind::Max:
    case FinValFn::Kind::BSum:
      break;
    case FinValFn::Kind::Sum:
    case FinValFn::Kind::SumPlus: {
      auto summed = map_slaves(nwa, [](const WeightedAutomaton& s) { return to_sum_slave(s); });
      if (g.kind == FinValFn::Kind::SumPlus && !low) {
        if (!lambda) {
          throw Error(ErrorCode::OpenProblem,
                      "the expected value of Sup over SumPlus slaves is an open problem; ask for a distribution point");
        }
        bound = std::max(Integer(1), Integer(floor(*lambda) + 1));
        exact_up_to = lambda;
      } else {
        for (SlaveIndex i = 0; i < summed.slaves.size(); ++i) {
          if (summed.is_silent_launch(i)) continue;
          if (detail::has_unbounded_cycle(summed.slaves[i], low ? Extremum::Min : Extremum::Max)) {
            throw Error(ErrorCode::SumUnboundedBelow,
                        std::string("slave ") + std::to_string(i + 1) + " is unbounded " +
                            (low ? "below" : "above") + "; the exact question is undecidable, use --approx");
          }
        }
        // Clipping must stay beyond every end-SCC value so those are kept intact.
        Integer b = automaton_size(summed);
        ExtValue t = threshold(analyze_liminf_nwa(with_master_fn(summed, lim), m), low);
        if (t.is_finite()) b = std::max(b, Integer(floor(abs(t.rational())) + 1));
        bound = b;
      }
      clipped = with_slave_fn(summed, FinValFn::bsum(*bound));
      break;
    }
  }

  InfWaOptions options;
  ExtValue t = known_threshold ? *known_threshold : threshold(analyze_liminf_nwa(with_master_fn(clipped, lim), m), low);
  if (t.is_finite()) options.prune_beyond = t.rational();
  auto wa = bsum_nwa_to_inf_wa(clipped, options);
  auto report = analyze_deterministic_wa(wa, m);
  report.method = Method::InfExact;
  report.params["wa_states"] = std::to_string(wa.num_states());
  if (bound) report.params["B"] = bound->get_str();
  if (exact_up_to) {
    report.expected.reset();
    report.distribution_exact_up_to = exact_up_to;
    report.almost_sure_witness.reset();
  }
  return report;
}

}  // namespace

AnalysisReport analyze_inf_exact(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                 std::optional<Rational> lambda) {
  return inf_exact(nwa, m, std::move(lambda), std::nullopt);
}

Integer approximation_bound(const Integer& n, const Rational& p, const Rational& epsilon) {
  if (n <= 0 || p <= 0 || p > 1 || epsilon <= 0) {
    throw Error(ErrorCode::InvalidArgument, "approximation bound needs n > 0, p in (0,1] and epsilon > 0");
  }
  long double ln = log2_of(Rational(n));
  long double lp = log2_of(p);
  long double nd = n.get_d();
  long double scale_log = ln - nd * lp;
  long double inner = std::fabs(2 * ln - nd * lp + log2_of(epsilon));
  long double value = std::exp2(scale_log) * inner;
  if (!std::isfinite(value) || value > 4e18L) {
    throw Error(ErrorCode::ResourceLimit, "clipping bound is too large to analyze");
  }
  Integer b(static_cast<unsigned long>(std::ceil(value * (1 + 1e-12L))));
  return std::max(b, Integer(n + 1));
}

AnalysisReport approx_inf_sum(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                              const Rational& epsilon) {
  require_master(nwa, {InfValFn::Inf, InfValFn::Sup}, "approx_inf_sum");
  if (nwa.slave_fn().kind != FinValFn::Kind::Sum) {
    throw Error(ErrorCode::InvalidArgument, "approx_inf_sum needs Sum slaves");
  }
  if (epsilon <= 0) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  detail::require_deterministic(nwa);
  detail::require_almost_sure(nwa, m);
  bool low = nwa.master_fn == InfValFn::Inf;
  auto lim = analyze_liminf_nwa(with_master_fn(nwa, low ? InfValFn::LimInf : InfValFn::LimSup), m);
  auto unbounded = low ? ExtValue::minus_infinity() : ExtValue::plus_infinity();
  if (*lim.expected == unbounded) {
    AnalysisReport report;
    report.method = Method::InfApprox;
    report.expected = unbounded;
    report.exact = false;
    report.params["epsilon"] = to_string(epsilon);
    return report;
  }
  Integer n = automaton_size(nwa);
  Rational p = m.min_positive_probability();
  Integer b = approximation_bound(n, p, epsilon);
  // Above the automaton size no prefix reaches the lower clip without a
  // cycle that the finite limit value rules out, so the threshold carries over.
  auto report = inf_exact(with_slave_fn(nwa, FinValFn::bsum(b)), m, std::nullopt, threshold(lim, low));
  report.method = Method::InfApprox;
  report.exact = false;
  report.params["B"] = b.get_str();
  report.params["epsilon"] = to_string(epsilon);
  report.params["n"] = n.get_str();
  report.params["p"] = to_string(p);
  return report;
}

AnalysisReport analyze_limavg_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) {
  require_master(nwa, {InfValFn::LimAvg}, "analyze_limavg_nwa");
  detail::require_deterministic(nwa);
  detail::require_almost_sure(nwa, m);
  auto p = detail::master_product(nwa, m);
  LaunchTable table(nwa, m);
  std::vector<std::optional<Rational>> rewards(p.chain.edges().size());
  for (std::size_t e = 0; e < rewards.size(); ++e) {
    if (!p.labels[e] || nwa.is_silent_launch(*p.labels[e])) continue;
    rewards[e] = table.expected(*p.labels[e], *p.chain_edge[e]);
  }
  auto r = limavg_with_rewards(p.chain, rewards);
  std::vector<PointMass> points;
  for (std::size_t j = 0; j < r.per_end_scc.size(); ++j) {
    points.push_back({ExtValue(r.per_end_scc[j].second), r.reach[j]});
  }
  AnalysisReport report;
  report.method = Method::LimAvgProduct;
  report.expected = r.overall;
  report.distribution = DiscreteDistribution::from_points(std::move(points));
  report.params["product_states"] = std::to_string(p.chain.num_states());
  detail::finish_report(report);
  return report;
}

AnalysisReport analyze_nwa(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                           std::optional<Rational> lambda) {
  switch (nwa.master_fn) {
    case InfValFn::LimInf:
    case InfValFn::LimSup: return analyze_liminf_nwa(nwa, m);
    case InfValFn::LimAvg: return analyze_limavg_nwa(nwa, m);
    case InfValFn::Inf:
    case InfValFn::Sup: return analyze_inf_exact(nwa, m, lambda);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown master value function");
}

}  // namespace quanta
