#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quanta/core.hpp"
#include "quanta/graph.hpp"

namespace quanta {

struct ChainEdge {
  StateId from;
  LetterId letter;
  StateId to;
  Rational prob;
  Weight weight;  // silent when the chain carries no weight on this edge
};

class LabeledMarkovChain {
 public:
  LabeledMarkovChain() = default;
  explicit LabeledMarkovChain(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  StateId add_state(std::string name);
  void set_initial(StateId s) { initial_ = s; }
  std::size_t add_edge(StateId from, LetterId letter, StateId to, Rational prob,
                       Weight weight = Weight::silent());

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const;
  StateId initial() const { return initial_; }
  const std::vector<ChainEdge>& edges() const { return edges_; }
  /// Edge indices leaving a state, including zero-probability ones.
  const std::vector<std::size_t>& out(StateId s) const { return out_.at(s); }
  /// Successor lists over positive-probability edges.
  Adjacency support() const;
  Rational min_positive_probability() const;

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  StateId initial_ = 0;
  std::vector<ChainEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

ValidationReport validate_chain(const LabeledMarkovChain& m);

Rational word_prefix_probability(const LabeledMarkovChain& m, const Word& word);

/// Automaton × chain restricted to the part reachable from the initial pair.
/// Chain moves the automaton cannot follow lead to a single rejecting sink.
template <class Label>
struct Product {
  LabeledMarkovChain chain;
  std::vector<std::pair<StateId, StateId>> origin;  // (automaton, chain); sink maps to kNoState
  std::vector<bool> accepting;
  std::optional<StateId> sink;
  /// Per product edge: the automaton label taken, or nullopt for sink edges.
  std::vector<std::optional<Label>> labels;
  /// Per product edge: the chain edge it follows (sink self-loop: none).
  std::vector<std::optional<std::size_t>> chain_edge;
};

template <class Label, class WeightOf>
Product<Label> make_product(const LabeledAutomaton<Label>& a, const LabeledMarkovChain& m,
                            WeightOf weight_of) {
  if (!(a.alphabet() == m.alphabet())) {
    throw Error(ErrorCode::InvalidArgument, "automaton and chain use different alphabets");
  }
  a.require_deterministic("automaton");
  Product<Label> p;
  p.chain = LabeledMarkovChain(m.alphabet());
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::deque<std::pair<StateId, StateId>> queue;
  auto intern = [&](StateId q, StateId s) {
    auto it = ids.find({q, s});
    if (it != ids.end()) return it->second;
    StateId id = p.chain.add_state(a.state_name(q) + "|" + m.state_name(s));
    ids.emplace(std::make_pair(q, s), id);
    p.origin.emplace_back(q, s);
    p.accepting.push_back(a.is_accepting(q));
    queue.emplace_back(q, s);
    return id;
  };
  auto sink = [&]() {
    if (!p.sink) {
      p.sink = p.chain.add_state("reject");
      p.origin.emplace_back(kNoState, kNoState);
      p.accepting.push_back(false);
    }
    return *p.sink;
  };
  p.chain.set_initial(intern(a.initial(), m.initial()));
  while (!queue.empty()) {
    auto [q, s] = queue.front();
    queue.pop_front();
    StateId from = ids.at({q, s});
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      const auto* t = a.step(q, edge.letter);
      if (!t) {
        p.chain.add_edge(from, edge.letter, sink(), edge.prob);
        p.labels.emplace_back(std::nullopt);
      } else {
        StateId to = intern(t->to, edge.to);
        p.chain.add_edge(from, edge.letter, to, edge.prob, weight_of(t->label, edge.weight));
        p.labels.emplace_back(t->label);
      }
      p.chain_edge.emplace_back(e);
    }
  }
  if (p.sink) {
    p.chain.add_edge(*p.sink, 0, *p.sink, Rational(1));
    p.labels.emplace_back(std::nullopt);
    p.chain_edge.emplace_back(std::nullopt);
  }
  return p;
}

using ProductChain = Product<Weight>;

/// Product weight is the automaton weight plus the chain weight; silent
/// operands are neutral and two silent operands give a silent weight.
ProductChain product_chain(const WeightedAutomaton& a, const LabeledMarkovChain& m);

/// End SCCs over all states, each sorted.
std::vector<std::vector<StateId>> end_sccs(const LabeledMarkovChain& m);
/// End SCCs reachable from the initial state.
std::vector<std::vector<StateId>> reachable_end_sccs(const LabeledMarkovChain& m);

/// Probability of being absorbed into each group, from the initial state.
/// group_of[s] names the group of every state inside a closed target set;
/// other states carry nullopt. Mass absorbed elsewhere is not counted.
std::vector<Rational> absorption_probabilities(const LabeledMarkovChain& m,
                                               const std::vector<std::optional<std::size_t>>& group_of,
                                               std::size_t groups);

std::vector<Rational> reach_probabilities(const LabeledMarkovChain& m,
                                          const std::vector<std::vector<StateId>>& targets);

/// Throws NotIrreducible unless the states form a closed strongly connected set.
std::map<StateId, Rational> stationary_distribution(const LabeledMarkovChain& m,
                                                    const std::vector<StateId>& scc);

struct LimAvgResult {
  ExtValue overall;
  std::vector<std::pair<std::vector<StateId>, Rational>> per_end_scc;
  std::vector<Rational> reach;  // aligned with per_end_scc
};

LimAvgResult limavg_of_chain(const LabeledMarkovChain& m);
/// Same with per-edge rational rewards (nullopt = silent) replacing the weights.
LimAvgResult limavg_with_rewards(const LabeledMarkovChain& m,
                                 const std::vector<std::optional<Rational>>& rewards);

}  // namespace quanta
