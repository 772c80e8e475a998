#include <map>
#include <sstream>

#include "analysis_common.hpp"
#include "slave_graph.hpp"

namespace quanta::detail {

MasterProduct master_product(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) {
  return make_product(nwa.master, m, [](SlaveIndex, const Weight&) { return Weight::silent(); });
}

std::vector<std::size_t> edges_inside(const LabeledMarkovChain& chain, const std::vector<StateId>& scc) {
  std::vector<std::size_t> out;
  for (StateId s : scc) {
    for (std::size_t e : chain.out(s)) {
      if (chain.edges()[e].prob > 0) out.push_back(e);
    }
  }
  return out;
}

std::string scc_name(const LabeledMarkovChain& chain, const std::vector<StateId>& scc) {
  std::string out = "{";
  for (std::size_t i = 0; i < scc.size(); ++i) {
    if (i) out += ", ";
    out += chain.state_name(scc[i]);
  }
  return out + "}";
}

void require_deterministic(const NestedWeightedAutomaton& nwa) {
  nwa.master.require_deterministic("master automaton");
  for (SlaveIndex i = 0; i < nwa.slaves.size(); ++i) {
    nwa.slaves[i].require_deterministic("slave " + std::to_string(i + 1));
  }
}

void require_almost_sure(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) {
  auto report = almost_sure_acceptance(nwa, m);
  if (report.almost_sure) return;
  std::string message = "not almost surely accepting";
  for (const auto& d : report.diagnostics) message += "; " + d;
  throw Error(ErrorCode::NotAlmostSureAccepting, message);
}

void finish_report(AnalysisReport& report) {
  if (report.distribution && !report.distribution->points.empty() &&
      report.distribution->rejection_mass == 0) {
    report.almost_sure_witness = report.distribution->points.back().value;
  }
}

}  // namespace quanta::detail

namespace quanta {

AcceptanceReport almost_sure_acceptance(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m) {
  detail::require_deterministic(nwa);
  auto p = detail::master_product(nwa, m);
  AcceptanceReport report;

  std::vector<std::vector<StateId>> bad;
  if (p.sink) bad.push_back({*p.sink});
  for (const auto& scc : reachable_end_sccs(p.chain)) {
    if (p.sink && scc.front() == *p.sink) continue;
    bool accepting = false;
    for (StateId s : scc) accepting = accepting || p.accepting[s];
    bool launches = false;
    for (std::size_t e : detail::edges_inside(p.chain, scc)) {
      launches = launches || !nwa.is_silent_launch(*p.labels[e]);
    }
    if (!accepting) report.diagnostics.push_back("end SCC " + detail::scc_name(p.chain, scc) + " has no accepting state");
    if (!launches) report.diagnostics.push_back("end SCC " + detail::scc_name(p.chain, scc) + " launches no non-silent slave");
    if (!accepting || !launches) bad.push_back(scc);
  }
  if (!bad.empty()) {
    for (const auto& mass : reach_probabilities(p.chain, bad)) report.rejecting_mass += mass;
  }
  if (p.sink && report.rejecting_mass > 0) {
    auto sink_mass = reach_probabilities(p.chain, {{*p.sink}}).front();
    if (sink_mass > 0) {
      report.diagnostics.push_back("master gets stuck with probability " + to_string(sink_mass));
    }
  }

  std::map<std::pair<SlaveIndex, std::size_t>, bool> checked;
  for (std::size_t e = 0; e < p.chain.edges().size(); ++e) {
    if (!p.labels[e] || !p.chain_edge[e]) continue;
    SlaveIndex i = *p.labels[e];
    if (nwa.is_silent_launch(i)) continue;
    std::size_t ce = *p.chain_edge[e];
    if (checked.count({i, ce})) continue;
    const auto& edge = m.edges()[ce];
    auto g = detail::build_slave_graph(nwa.slaves[i], m, edge.from, LaunchEdge{edge.letter, edge.to});
    bool ok = detail::almost_surely_accepts(g);
    checked[{i, ce}] = ok;
    if (!ok) {
      report.diagnostics.push_back("slave " + std::to_string(i + 1) + " launched on '" +
                                   m.alphabet().letter(edge.letter) + "' from chain state " +
                                   m.state_name(edge.from) + " may fail to accept");
    }
  }
  report.almost_sure = report.diagnostics.empty();
  return report;
}

}  // namespace quanta
