#pragma once

#include <string>

#include "quanta/analysis.hpp"

namespace quanta::detail {

using MasterProduct = Product<SlaveIndex>;

MasterProduct master_product(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m);

/// Product edges (positive probability) leaving the states of an end SCC.
std::vector<std::size_t> edges_inside(const LabeledMarkovChain& chain, const std::vector<StateId>& scc);

/// Throws NotAlmostSureAccepting listing the diagnostics.
void require_almost_sure(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m);

void require_deterministic(const NestedWeightedAutomaton& nwa);

std::string scc_name(const LabeledMarkovChain& chain, const std::vector<StateId>& scc);

/// Fills the witness from the distribution.
void finish_report(AnalysisReport& report);

}  // namespace quanta::detail
