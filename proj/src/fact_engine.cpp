#include <deque>
#include <map>

#include "analysis_common.hpp"

namespace quanta {

namespace {

bool better(Extremum dir, const Integer& a, const Integer& b) {
  return dir == Extremum::Min ? a < b : a > b;
}

std::optional<Integer> combine(Extremum dir, const std::optional<Integer>& acc, const Weight& w) {
  if (w.is_silent()) return acc;
  if (!acc || better(dir, w.value(), *acc)) return w.value();
  return acc;
}

/// Extremum of the non-silent weights on edges leaving the given states.
std::optional<Integer> scc_extremum(const LabeledMarkovChain& chain, const std::vector<StateId>& scc,
                                    Extremum dir) {
  std::optional<Integer> out;
  for (std::size_t e : detail::edges_inside(chain, scc)) out = combine(dir, out, chain.edges()[e].weight);
  return out;
}

DiscreteDistribution grouped(const LabeledMarkovChain& chain, const std::vector<std::vector<StateId>>& sccs,
                             const std::vector<ExtValue>& values) {
  auto reach = reach_probabilities(chain, sccs);
  std::vector<PointMass> points;
  for (std::size_t j = 0; j < sccs.size(); ++j) points.push_back({values[j], reach[j]});
  return DiscreteDistribution::from_points(std::move(points));
}

/// Product states extended with the extremum of the weights seen so far.
DiscreteDistribution running_extremum(const ProductChain& p, Extremum dir) {
  const auto& base = p.chain;
  LabeledMarkovChain aug(base.alphabet());
  std::vector<std::pair<StateId, std::optional<Integer>>> origin;
  std::map<std::pair<StateId, std::optional<Integer>>, StateId> ids;
  std::deque<StateId> queue;
  auto intern = [&](StateId s, const std::optional<Integer>& ext) {
    auto key = std::make_pair(s, ext);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    StateId id = aug.add_state(base.state_name(s) + "|" + (ext ? ext->get_str() : "none"));
    ids.emplace(key, id);
    origin.push_back(key);
    queue.push_back(id);
    return id;
  };
  aug.set_initial(intern(base.initial(), std::nullopt));
  while (!queue.empty()) {
    StateId id = queue.front();
    queue.pop_front();
    auto [s, ext] = origin[id];
    for (std::size_t e : base.out(s)) {
      const auto& edge = base.edges()[e];
      StateId to = intern(edge.to, combine(dir, ext, edge.weight));
      aug.add_edge(id, edge.letter, to, edge.prob, edge.weight);
    }
  }
  auto sccs = reachable_end_sccs(aug);
  std::vector<ExtValue> values;
  for (const auto& scc : sccs) {
    auto ext = origin[scc.front()].second;
    auto inner = scc_extremum(aug, scc, dir);
    if (inner) ext = combine(dir, ext, Weight(*inner));
    values.emplace_back(*ext);
  }
  return grouped(aug, sccs, values);
}

}  // namespace

AnalysisReport analyze_deterministic_wa(const WeightedAutomaton& wa, const LabeledMarkovChain& m) {
  wa.require_deterministic("weighted automaton");
  if (wa.word_mode() != WordMode::Infinite) {
    throw Error(ErrorCode::InvalidArgument, "analysis needs an infinite-word automaton");
  }
  InfValFn fn = wa.infval();
  auto p = product_chain(wa, m);

  auto sccs = reachable_end_sccs(p.chain);
  std::vector<std::vector<StateId>> bad;
  for (const auto& scc : sccs) {
    bool accepting = false;
    for (StateId s : scc) accepting = accepting || p.accepting[s];
    if (!accepting || !scc_extremum(p.chain, scc, Extremum::Min)) bad.push_back(scc);
  }
  if (!bad.empty()) {
    Rational mass;
    for (const auto& r : reach_probabilities(p.chain, bad)) mass += r;
    if (mass > 0) {
      throw Error(ErrorCode::RejectionMassPositive,
                  "runs are rejected with probability " + to_string(mass));
    }
  }

  AnalysisReport report;
  report.method = Method::WaDirect;
  report.exact = true;
  DiscreteDistribution dist;
  switch (fn) {
    case InfValFn::LimInf:
    case InfValFn::LimSup: {
      Extremum dir = is_lower(fn) ? Extremum::Min : Extremum::Max;
      std::vector<ExtValue> values;
      for (const auto& scc : sccs) values.emplace_back(*scc_extremum(p.chain, scc, dir));
      dist = grouped(p.chain, sccs, values);
      break;
    }
    case InfValFn::LimAvg: {
      auto r = limavg_of_chain(p.chain);
      std::vector<PointMass> points;
      for (std::size_t j = 0; j < r.per_end_scc.size(); ++j) {
        points.push_back({ExtValue(r.per_end_scc[j].second), r.reach[j]});
      }
      dist = DiscreteDistribution::from_points(std::move(points));
      break;
    }
    case InfValFn::Inf:
    case InfValFn::Sup:
      dist = running_extremum(p, is_lower(fn) ? Extremum::Min : Extremum::Max);
      break;
  }
  report.expected = dist.expectation();
  report.distribution = std::move(dist);
  report.params["states"] = std::to_string(p.chain.num_states());
  detail::finish_report(report);
  return report;
}

}  // namespace quanta
