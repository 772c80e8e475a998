#include <deque>
#include <map>

#include "quanta/linalg.hpp"
#include "slave_graph.hpp"

namespace quanta::detail {

namespace {

Integer weight_value(const Weight& w) { return w.is_silent() ? Integer(0) : w.value(); }

}  // namespace

Adjacency SlaveGraph::adjacency() const {
  Adjacency succ(arcs.size());
  for (std::size_t v = 0; v < arcs.size(); ++v) {
    for (const auto& a : arcs[v]) succ[v].push_back(a.to);
  }
  return succ;
}

SlaveGraph build_slave_graph(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                             StateId start, std::optional<LaunchEdge> first) {
  SlaveGraph g;
  g.accept = 0;
  g.reject = 1;
  g.arcs.resize(2);
  g.offset = 0;
  StateId q0 = slave.initial();
  if (slave.is_accepting(q0)) {
    g.start_kind = SlaveGraph::Start::Silent;
    return g;
  }
  StateId s0 = start;
  if (first) {
    const auto* t = slave.step(q0, first->letter);
    if (!t) {
      g.start_kind = SlaveGraph::Start::Rejected;
      g.start = g.reject;
      return g;
    }
    g.offset = weight_value(t->label);
    if (slave.is_accepting(t->to)) {
      g.start_kind = SlaveGraph::Start::Accepted;
      g.start = g.accept;
      return g;
    }
    q0 = t->to;
    s0 = first->next;
  }

  std::map<std::pair<StateId, StateId>, std::size_t> ids;
  std::deque<std::pair<StateId, StateId>> queue;
  auto intern = [&](StateId q, StateId s) {
    auto [it, fresh] = ids.emplace(std::make_pair(q, s), g.arcs.size());
    if (fresh) {
      g.arcs.emplace_back();
      queue.emplace_back(q, s);
    }
    return it->second;
  };
  g.start = intern(q0, s0);
  while (!queue.empty()) {
    auto [q, s] = queue.front();
    queue.pop_front();
    std::size_t from = ids.at({q, s});
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      const auto* t = slave.step(q, edge.letter);
      SlaveGraph::Arc arc{g.reject, edge.prob, 0};
      if (t) {
        arc.weight = weight_value(t->label);
        arc.to = slave.is_accepting(t->to) ? g.accept : intern(t->to, edge.to);
      }
      g.arcs[from].push_back(std::move(arc));
    }
  }
  return g;
}

bool almost_surely_accepts(const SlaveGraph& g) {
  switch (g.start_kind) {
    case SlaveGraph::Start::Silent:
    case SlaveGraph::Start::Accepted: return true;
    case SlaveGraph::Start::Rejected: return false;
    case SlaveGraph::Start::Node: break;
  }
  auto succ = g.adjacency();
  auto reach = reachable_from(succ, {g.start});
  if (reach[g.reject]) return false;
  std::vector<bool> target(g.size(), false);
  target[g.accept] = true;
  auto co = can_reach(succ, target);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (reach[v] && !co[v]) return false;
  }
  return true;
}

ExtValue extremal_sum(const SlaveGraph& g, Extremum which) {
  switch (g.start_kind) {
    case SlaveGraph::Start::Silent: return ExtValue::bottom();
    case SlaveGraph::Start::Accepted: return ExtValue(g.offset);
    case SlaveGraph::Start::Rejected:
      throw Error(ErrorCode::NoAcceptingPath, "slave rejects on its first letter");
    case SlaveGraph::Start::Node: break;
  }
  auto succ = g.adjacency();
  auto reach = reachable_from(succ, {g.start});
  std::vector<bool> target(g.size(), false);
  target[g.accept] = true;
  auto co = can_reach(succ, target);
  if (!co[g.start]) throw Error(ErrorCode::NoAcceptingPath, "slave cannot accept on any generated word");
  std::vector<bool> live(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) live[v] = reach[v] && co[v];

  // Shortest paths on sign-adjusted weights.
  int sign = which == Extremum::Min ? 1 : -1;
  std::vector<std::optional<Integer>> dist(g.size());
  dist[g.start] = Integer(0);
  auto relax_all = [&]() {
    bool changed = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!live[v] || !dist[v]) continue;
      for (const auto& a : g.arcs[v]) {
        if (!live[a.to]) continue;
        Integer d = *dist[v] + sign * a.weight;
        if (!dist[a.to] || d < *dist[a.to]) {
          dist[a.to] = d;
          changed = true;
        }
      }
    }
    return changed;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!relax_all()) break;
  }
  if (relax_all()) {
    return which == Extremum::Min ? ExtValue::minus_infinity() : ExtValue::plus_infinity();
  }
  return ExtValue(Integer(g.offset + sign * *dist[g.accept]));
}

Rational expected_sum(const SlaveGraph& g) {
  if (g.start_kind == SlaveGraph::Start::Accepted) return Rational(g.offset);
  if (g.start_kind != SlaveGraph::Start::Node) {
    throw Error(ErrorCode::InvalidArgument, "expected_sum needs a launched, terminating slave");
  }
  auto reach = reachable_from(g.adjacency(), {g.start});
  std::vector<std::size_t> var(g.size(), static_cast<std::size_t>(-1));
  std::size_t n = 0;
  for (std::size_t v = 2; v < g.size(); ++v) {
    if (reach[v]) var[v] = n++;
  }
  SparseSystem sys(n);
  for (std::size_t v = 2; v < g.size(); ++v) {
    if (!reach[v]) continue;
    std::size_t row = var[v];
    sys.add(row, row, Rational(1));
    for (const auto& a : g.arcs[v]) {
      sys.rhs[row][0] += a.prob * a.weight;
      if (a.to != g.accept) sys.add(row, var[a.to], -a.prob);
    }
  }
  auto x = solve(sys);
  return g.offset + x[var[g.start]][0];
}

bool has_unbounded_cycle(const WeightedAutomaton& slave, Extremum which) {
  std::size_t n = slave.num_states();
  Adjacency succ(n);
  for (const auto& t : slave.transitions()) {
    if (!slave.is_accepting(t.from)) succ[t.from].push_back(t.to);
  }
  auto reach = reachable_from(succ, {slave.initial()});
  std::vector<bool> acc(n);
  for (StateId q = 0; q < n; ++q) acc[q] = slave.is_accepting(q);
  auto co = can_reach(succ, acc);
  auto scc = strongly_connected_components(succ);
  int sign = which == Extremum::Min ? 1 : -1;
  // Bellman-Ford per component restricted to live states.
  for (const auto& members : scc.members) {
    std::size_t c = scc.component[members.front()];
    if (!reach[members.front()] || !co[members.front()]) continue;
    std::map<std::size_t, Integer> dist;
    for (auto v : members) dist[v] = 0;
    bool changed = true;
    for (std::size_t i = 0; i <= members.size() && changed; ++i) {
      changed = false;
      for (const auto& t : slave.transitions()) {
        if (slave.is_accepting(t.from) || scc.component[t.from] != c || scc.component[t.to] != c) continue;
        Integer d = dist[t.from] + sign * weight_value(t.label);
        if (d < dist[t.to]) {
          dist[t.to] = d;
          changed = true;
        }
      }
    }
    if (changed) return true;
  }
  return false;
}

}  // namespace quanta::detail

namespace quanta {

namespace {

ExtValue achievable(const WeightedAutomaton& slave, const LabeledMarkovChain& m, StateId start,
                    std::optional<LaunchEdge> first, Extremum which) {
  if (slave.is_accepting(slave.initial())) return ExtValue::bottom();
  auto g = detail::build_slave_graph(to_sum_slave(slave), m, start, first);
  return detail::extremal_sum(g, which);
}

}  // namespace

ExtValue min_achievable_slave_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                    StateId start, std::optional<LaunchEdge> first) {
  return achievable(slave, m, start, first, Extremum::Min);
}

ExtValue max_achievable_slave_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                    StateId start, std::optional<LaunchEdge> first) {
  return achievable(slave, m, start, first, Extremum::Max);
}

ExtValue slave_expected_value(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                              StateId start, std::optional<LaunchEdge> first) {
  if (slave.is_accepting(slave.initial())) return ExtValue::bottom();
  auto g = detail::build_slave_graph(to_sum_slave(slave), m, start, first);
  if (!detail::almost_surely_accepts(g)) {
    throw Error(ErrorCode::NotAlmostSurelyTerminating,
                "slave does not terminate almost surely from chain state " + m.state_name(start));
  }
  return ExtValue(detail::expected_sum(g));
}

}  // namespace quanta
