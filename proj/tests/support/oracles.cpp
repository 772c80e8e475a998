#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace quanta::testing {

std::vector<Rational> dense_solve(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::runtime_error("oracle: singular system");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    Rational inv = 1 / a[c][c];
    for (auto& x : a[c]) x *= inv;
    b[c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  return b;
}

OracleDistribution extremum_wa_oracle(const WeightedAutomaton& wa, const LabeledMarkovChain& m) {
  bool low = wa.infval() == InfValFn::Inf;
  struct Node {
    StateId q;  // kNoState: rejected
    StateId s;
    std::optional<Integer> ext;
    bool operator<(const Node& o) const { return std::tie(q, s, ext) < std::tie(o.q, o.s, o.ext); }
  };
  std::map<Node, std::size_t> ids;
  std::vector<Node> nodes;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> succ;
  std::deque<std::size_t> queue;
  auto id = [&](const Node& n) {
    auto [it, fresh] = ids.emplace(n, nodes.size());
    if (fresh) {
      nodes.push_back(n);
      succ.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  id({wa.initial(), m.initial(), std::nullopt});
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    Node n = nodes[v];
    if (n.q == kNoState) {
      succ[v].push_back({v, Rational(1)});
      continue;
    }
    for (std::size_t e : m.out(n.s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      const auto* t = wa.step(n.q, edge.letter);
      Node next{kNoState, kNoState, std::nullopt};
      if (t) {
        auto ext = n.ext;
        if (!t->label.is_silent()) {
          const Integer& w = t->label.value();
          if (!ext || (low ? w < *ext : w > *ext)) ext = w;
        }
        next = {t->to, edge.to, ext};
      }
      std::size_t to = id(next);
      succ[v].push_back({to, edge.prob});
    }
  }
  std::size_t n = nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    reach[v][v] = true;
    for (auto& [to, p] : succ[v]) reach[v][to] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  // Bottom: every state reachable from v reaches v back.
  std::vector<bool> bottom(n, true);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      if (reach[v][u] && !reach[u][v]) bottom[v] = false;
    }
  }
  // Outcome of each bottom state: value or rejection.
  auto outcome = [&](std::size_t v) -> std::optional<Integer> {
    const Node& node = nodes[v];
    if (node.q == kNoState) return std::nullopt;
    bool accepting = false;
    bool weighted = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (!reach[v][u]) continue;
      accepting = accepting || wa.is_accepting(nodes[u].q);
      for (std::size_t e : m.out(nodes[u].s)) {
        const auto& edge = m.edges()[e];
        const auto* t = edge.prob > 0 ? wa.step(nodes[u].q, edge.letter) : nullptr;
        weighted = weighted || (t && !t->label.is_silent());
      }
    }
    if (!accepting || !weighted) return std::nullopt;
    return node.ext;
  };
  std::map<std::optional<Integer>, std::vector<bool>> groups;
  for (std::size_t v = 0; v < n; ++v) {
    if (!bottom[v]) continue;
    auto o = outcome(v);
    auto& g = groups[o];
    g.resize(n, false);
    g[v] = true;
  }
  OracleDistribution out;
  std::vector<std::size_t> transient;
  std::vector<std::size_t> index(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!bottom[v]) {
      index[v] = transient.size();
      transient.push_back(v);
    }
  }
  for (const auto& [o, members] : groups) {
    Rational mass;
    if (bottom[0]) {
      mass = members[0] ? 1 : 0;
    } else {
      std::size_t t = transient.size();
      std::vector<std::vector<Rational>> a(t, std::vector<Rational>(t));
      std::vector<Rational> b(t);
      for (std::size_t i = 0; i < t; ++i) {
        a[i][i] = 1;
        for (auto& [to, p] : succ[transient[i]]) {
          if (members[to]) b[i] += p;
          else if (!bottom[to]) a[i][index[to]] -= p;
        }
      }
      mass = dense_solve(a, b)[index[0]];
    }
    if (mass == 0) continue;
    if (o) out.values[*o] += mass;
    else out.rejected += mass;
  }
  return out;
}

std::size_t brute_force_models(const Cnf& cnf) {
  std::size_t count = 0;
  for (std::size_t v = 0; v < (std::size_t{1} << cnf.variables); ++v) {
    bool ok = std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const std::vector<int>& c) {
      return std::any_of(c.begin(), c.end(), [&](int lit) {
        bool x = (v >> (std::abs(lit) - 1)) & 1U;
        return lit > 0 ? x : !x;
      });
    });
    count += ok;
  }
  return count;
}

double truncated_reach(const LabeledMarkovChain& m, const std::vector<bool>& target, std::size_t depth) {
  std::vector<double> mass(m.num_states(), 0.0);
  mass[m.initial()] = 1.0;
  double hit = 0;
  for (std::size_t step = 0; step <= depth; ++step) {
    std::vector<double> next(m.num_states(), 0.0);
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (mass[s] == 0) continue;
      if (target[s]) {
        hit += mass[s];
        continue;
      }
      for (std::size_t e : m.out(s)) next[m.edges()[e].to] += mass[s] * m.edges()[e].prob.get_d();
    }
    mass = std::move(next);
  }
  return hit;
}

std::vector<double> power_iteration(const LabeledMarkovChain& m, const std::vector<StateId>& scc,
                                    std::size_t rounds) {
  std::vector<double> x(m.num_states(), 0.0);
  for (auto s : scc) x[s] = 1.0 / static_cast<double>(scc.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<double> y(m.num_states(), 0.0);
    for (auto s : scc) {
      for (std::size_t e : m.out(s)) y[m.edges()[e].to] += x[s] * m.edges()[e].prob.get_d();
    }
    // Lazy averaging handles periodic chains.
    for (auto s : scc) x[s] = 0.5 * x[s] + 0.5 * y[s];
  }
  std::vector<double> out;
  for (auto s : scc) out.push_back(x[s]);
  return out;
}

}  // namespace quanta::testing
