#pragma once

#include "quanta/mca.hpp"
#include "quanta/nwa.hpp"

namespace quanta {

/// One slave per (counter, start state) pair plus a trailing dummy; the
/// master copies the graph and launches the slave matching each Start.
NestedWeightedAutomaton mca_to_nwa(const MonitorCounterAutomaton& mca);

/// Product of the master with slots holding running slaves. Slaves are first
/// turned into Sum slaves. A counter cannot add and terminate in one step, so
/// a slave whose first or last transition carries a non-zero weight keeps that
/// weight in its slot and terminates one or two steps after accepting. Throws
/// WidthExceeded if more than k slaves can run at once.
MonitorCounterAutomaton nwa_to_mca(const NestedWeightedAutomaton& nwa, std::size_t k);

}  // namespace quanta
