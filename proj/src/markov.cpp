#include "quanta/markov.hpp"

#include <algorithm>

#include "quanta/linalg.hpp"

namespace quanta {

StateId LabeledMarkovChain::add_state(std::string name) {
  names_.push_back(std::move(name));
  out_.emplace_back();
  return static_cast<StateId>(names_.size() - 1);
}

std::size_t LabeledMarkovChain::add_edge(StateId from, LetterId letter, StateId to, Rational prob,
                                         Weight weight) {
  if (from >= names_.size() || to >= names_.size()) {
    throw Error(ErrorCode::InvalidArgument, "chain edge uses an unknown state");
  }
  if (letter >= alphabet_.size()) throw Error(ErrorCode::InvalidArgument, "chain edge uses an unknown letter");
  prob.canonicalize();
  edges_.push_back({from, letter, to, std::move(prob), std::move(weight)});
  out_[from].push_back(edges_.size() - 1);
  return edges_.size() - 1;
}

std::optional<StateId> LabeledMarkovChain::find_state(std::string_view name) const {
  for (StateId s = 0; s < names_.size(); ++s) {
    if (names_[s] == name) return s;
  }
  return std::nullopt;
}

Adjacency LabeledMarkovChain::support() const {
  Adjacency succ(names_.size());
  for (const auto& e : edges_) {
    if (e.prob > 0) succ[e.from].push_back(e.to);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return succ;
}

Rational LabeledMarkovChain::min_positive_probability() const {
  std::optional<Rational> best;
  for (const auto& e : edges_) {
    if (e.prob > 0 && (!best || e.prob < *best)) best = e.prob;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "chain has no positive-probability edge");
  return *best;
}

ValidationReport validate_chain(const LabeledMarkovChain& m) {
  ValidationReport report;
  if (m.num_states() == 0) {
    report.error("empty", "chain has no states");
    return report;
  }
  if (m.initial() >= m.num_states()) report.error("initial", "initial state out of range");
  for (const auto& e : m.edges()) {
    if (e.prob < 0 || e.prob > 1) {
      report.error("probability-range", "edge from '" + m.state_name(e.from) + "' has probability " +
                                            to_string(e.prob));
    }
  }
  for (StateId s = 0; s < m.num_states(); ++s) {
    Rational total;
    std::map<std::pair<LetterId, StateId>, int> keys;
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      total += edge.prob;
      if (++keys[{edge.letter, edge.to}] == 2) {
        report.error("duplicate-edge", "state '" + m.state_name(s) + "' repeats an edge on letter '" +
                                           m.alphabet().letter(edge.letter) + "'");
      }
    }
    if (total != 1) {
      report.error("row-sum", "outgoing probabilities of '" + m.state_name(s) + "' sum to " +
                                  to_string(total));
    }
  }
  return report;
}

Rational word_prefix_probability(const LabeledMarkovChain& m, const Word& word) {
  std::vector<Rational> dist(m.num_states());
  dist[m.initial()] = 1;
  for (LetterId a : word) {
    std::vector<Rational> next(m.num_states());
    for (const auto& e : m.edges()) {
      if (e.letter == a && dist[e.from] != 0) next[e.to] += dist[e.from] * e.prob;
    }
    dist = std::move(next);
  }
  Rational total;
  for (const auto& p : dist) total += p;
  return total;
}

ProductChain product_chain(const WeightedAutomaton& a, const LabeledMarkovChain& m) {
  return make_product(a, m, [](const Weight& automaton, const Weight& chain) {
    if (automaton.is_silent()) return chain;
    if (chain.is_silent()) return automaton;
    return Weight(Integer(automaton.value() + chain.value()));
  });
}

namespace {

std::vector<std::vector<StateId>> end_sccs_of(const Adjacency& succ, const std::vector<bool>* within) {
  auto dec = strongly_connected_components(succ);
  std::vector<std::vector<StateId>> out;
  for (std::size_t c = 0; c < dec.members.size(); ++c) {
    const auto& members = dec.members[c];
    if (within && !(*within)[members.front()]) continue;
    bool closed = true;
    for (std::size_t v : members) {
      for (std::size_t w : succ[v]) closed = closed && dec.component[w] == c;
    }
    if (!closed) continue;
    std::vector<StateId> scc(members.begin(), members.end());
    out.push_back(std::move(scc));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<StateId>> end_sccs(const LabeledMarkovChain& m) {
  return end_sccs_of(m.support(), nullptr);
}

std::vector<std::vector<StateId>> reachable_end_sccs(const LabeledMarkovChain& m) {
  auto succ = m.support();
  auto reach = reachable_from(succ, {m.initial()});
  return end_sccs_of(succ, &reach);
}

std::vector<Rational> absorption_probabilities(const LabeledMarkovChain& m,
                                               const std::vector<std::optional<std::size_t>>& group_of,
                                               std::size_t groups) {
  const std::size_t n = m.num_states();
  auto succ = m.support();
  auto reach = reachable_from(succ, {m.initial()});
  // Restrict the decomposition to reachable states.
  Adjacency restricted(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (reach[v]) restricted[v] = succ[v];
  }
  auto dec = strongly_connected_components(restricted);
  std::vector<std::vector<Rational>> x(n);
  std::vector<std::size_t> local(n, 0);
  for (std::size_t c = 0; c < dec.members.size(); ++c) {
    const auto& members = dec.members[c];
    if (!reach[members.front()]) continue;
    if (group_of[members.front()]) {
      for (std::size_t v : members) {
        x[v].assign(groups, Rational(0));
        x[v][*group_of[v]] = 1;
      }
      continue;
    }
    bool closed = true;
    for (std::size_t v : members) {
      for (std::size_t w : succ[v]) closed = closed && dec.component[w] == c;
    }
    if (closed) {
      for (std::size_t v : members) x[v].assign(groups, Rational(0));
      continue;
    }
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
    SparseSystem sys(members.size(), groups);
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::size_t v = members[i];
      sys.add(i, i, Rational(1));
      for (std::size_t e : m.out(static_cast<StateId>(v))) {
        const auto& edge = m.edges()[e];
        if (edge.prob == 0) continue;
        if (dec.component[edge.to] == c) {
          sys.add(i, local[edge.to], -edge.prob);
        } else {
          for (std::size_t g = 0; g < groups; ++g) sys.rhs[i][g] += edge.prob * x[edge.to][g];
        }
      }
    }
    auto sol = solve(sys);
    for (std::size_t i = 0; i < members.size(); ++i) x[members[i]] = std::move(sol[i]);
  }
  return x[m.initial()];
}

std::vector<Rational> reach_probabilities(const LabeledMarkovChain& m,
                                          const std::vector<std::vector<StateId>>& targets) {
  std::vector<std::optional<std::size_t>> group_of(m.num_states());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    for (StateId s : targets[j]) {
      if (group_of[s]) throw Error(ErrorCode::InvalidArgument, "target sets overlap");
      group_of[s] = j;
    }
  }
  auto succ = m.support();
  for (std::size_t j = 0; j < targets.size(); ++j) {
    for (StateId s : targets[j]) {
      for (std::size_t w : succ[s]) {
        if (group_of[w] != j) throw Error(ErrorCode::InvalidArgument, "target set is not closed");
      }
    }
  }
  return absorption_probabilities(m, group_of, targets.size());
}

std::map<StateId, Rational> stationary_distribution(const LabeledMarkovChain& m,
                                                    const std::vector<StateId>& scc) {
  if (scc.empty()) throw Error(ErrorCode::NotIrreducible, "empty state set");
  std::map<StateId, std::size_t> local;
  for (std::size_t i = 0; i < scc.size(); ++i) local[scc[i]] = i;
  Adjacency succ(scc.size());
  for (StateId s : scc) {
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      auto it = local.find(edge.to);
      if (it == local.end()) throw Error(ErrorCode::NotIrreducible, "state set is not closed");
      succ[local[s]].push_back(it->second);
    }
  }
  if (strongly_connected_components(succ).members.size() != 1) {
    throw Error(ErrorCode::NotIrreducible, "state set is not strongly connected");
  }
  const std::size_t n = scc.size();
  // Balance equations for all but the last state, then normalization.
  SparseSystem sys(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) sys.add(i, i, Rational(-1));
  }
  for (StateId s : scc) {
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      std::size_t row = local[edge.to];
      if (row + 1 < n) sys.add(row, local[s], edge.prob);
    }
  }
  for (std::size_t i = 0; i < n; ++i) sys.add(n - 1, i, Rational(1));
  sys.rhs[n - 1][0] = 1;
  auto sol = solve(sys);
  std::map<StateId, Rational> out;
  for (std::size_t i = 0; i < n; ++i) out[scc[i]] = sol[i][0];
  return out;
}

LimAvgResult limavg_with_rewards(const LabeledMarkovChain& m,
                                 const std::vector<std::optional<Rational>>& rewards) {
  LimAvgResult result;
  auto sccs = reachable_end_sccs(m);
  auto reach = reach_probabilities(m, sccs);
  Rational overall;
  for (std::size_t j = 0; j < sccs.size(); ++j) {
    if (reach[j] == 0) continue;
    auto pi = stationary_distribution(m, sccs[j]);
    Rational weighted, mass;
    for (StateId s : sccs[j]) {
      for (std::size_t e : m.out(s)) {
        const auto& edge = m.edges()[e];
        if (edge.prob == 0 || !rewards[e]) continue;
        Rational freq = pi.at(s) * edge.prob;
        weighted += freq * *rewards[e];
        mass += freq;
      }
    }
    if (mass == 0) {
      throw Error(ErrorCode::AllSilentEndScc,
                  "end SCC containing '" + m.state_name(sccs[j].front()) + "' has only silent edges");
    }
    Rational value = weighted / mass;
    overall += reach[j] * value;
    result.per_end_scc.emplace_back(sccs[j], value);
    result.reach.push_back(reach[j]);
  }
  result.overall = ExtValue(overall);
  return result;
}

LimAvgResult limavg_of_chain(const LabeledMarkovChain& m) {
  std::vector<std::optional<Rational>> rewards;
  rewards.reserve(m.edges().size());
  for (const auto& e : m.edges()) {
    if (e.weight.is_silent()) rewards.emplace_back(std::nullopt);
    else rewards.emplace_back(Rational(e.weight.value()));
  }
  return limavg_with_rewards(m, rewards);
}

}  // namespace quanta
