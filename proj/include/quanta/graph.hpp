#pragma once

#include <cstddef>
#include <vector>

namespace quanta {

using Adjacency = std::vector<std::vector<std::size_t>>;

struct SccDecomposition {
  /// Component id per vertex.
  std::vector<std::size_t> component;
  /// Components in reverse topological order: every edge leaving a
  /// component points to one listed earlier.
  std::vector<std::vector<std::size_t>> members;
};

SccDecomposition strongly_connected_components(const Adjacency& succ);

/// Vertices reachable from the sources (sources included).
std::vector<bool> reachable_from(const Adjacency& succ, const std::vector<std::size_t>& sources);

/// Vertices from which some target is reachable (targets included).
std::vector<bool> can_reach(const Adjacency& succ, const std::vector<bool>& targets);

}  // namespace quanta
