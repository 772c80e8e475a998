#include "quanta/graph.hpp"

#include <algorithm>
#include <limits>

namespace quanta {

SccDecomposition strongly_connected_components(const Adjacency& succ) {
  const std::size_t n = succ.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  SccDecomposition out;
  out.component.assign(n, unvisited);
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < succ[f.v].size()) {
        std::size_t w = succ[f.v][f.next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component[w] = out.members.size();
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.members.push_back(std::move(comp));
      }
    }
  }
  return out;
}

std::vector<bool> reachable_from(const Adjacency& succ, const std::vector<std::size_t>& sources) {
  std::vector<bool> seen(succ.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : succ[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<bool> can_reach(const Adjacency& succ, const std::vector<bool>& targets) {
  Adjacency pred(succ.size());
  for (std::size_t v = 0; v < succ.size(); ++v) {
    for (std::size_t w : succ[v]) pred[w].push_back(v);
  }
  std::vector<std::size_t> sources;
  for (std::size_t v = 0; v < targets.size(); ++v) {
    if (targets[v]) sources.push_back(v);
  }
  return reachable_from(pred, sources);
}

}  // namespace quanta
