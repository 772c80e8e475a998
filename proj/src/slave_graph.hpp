#pragma once

#include <optional>
#include <vector>

#include "quanta/analysis.hpp"

namespace quanta::detail {

/// Slave × chain configurations reachable from a launch. Configurations with
/// an accepting slave state collapse into `accept`; missing slave moves lead
/// to `reject`.
struct SlaveGraph {
  struct Arc {
    std::size_t to;
    Rational prob;
    Integer weight;
  };
  enum class Start : std::uint8_t { Node, Accepted, Rejected, Silent };

  std::vector<std::vector<Arc>> arcs;  // indexed by node; accept and reject have none
  std::size_t accept = 0;
  std::size_t reject = 0;
  Start start_kind = Start::Node;
  std::size_t start = 0;
  Integer offset;  // weight collected before reaching `start`

  std::size_t size() const { return arcs.size(); }
  Adjacency adjacency() const;
};

/// Weights are read as plain integers; convert with to_sum_slave first when
/// values matter.
SlaveGraph build_slave_graph(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                             StateId start, std::optional<LaunchEdge> first);

bool almost_surely_accepts(const SlaveGraph& g);

/// Min (or max) total weight over start → accept paths.
ExtValue extremal_sum(const SlaveGraph& g, Extremum which);

/// Expected total weight to absorption; requires almost_surely_accepts.
Rational expected_sum(const SlaveGraph& g);

/// True if some cycle with negative (positive for Max) total weight lies on
/// a path from the initial state to an accepting state of the slave alone.
bool has_unbounded_cycle(const WeightedAutomaton& slave, Extremum which);

}  // namespace quanta::detail
