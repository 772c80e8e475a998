#pragma once

#include <variant>
#include <vector>

#include "quanta/markov.hpp"
#include "quanta/mca.hpp"
#include "quanta/nwa.hpp"

namespace quanta {

/// Sup automaton over {a,#} with two counters: on blocks ##a^k#a^m# the two
/// counters end at k−m and m−k.
MonitorCounterAutomaton build_blocks_diff();

/// (LimAvg;Sum) average response time over {r,g,#}, at most k pending
/// requests. Slave 1 is the dummy, slave 2 counts letters up to the grant.
NestedWeightedAutomaton build_art(std::size_t k);

/// Emits r, then # with probability 1−p until a grant (probability p).
LabeledMarkovChain request_grant_chain(const Rational& p);

/// One state; every letter with probability 1/|alphabet|.
LabeledMarkovChain uniform_chain(const Alphabet& alphabet);

struct Cnf {
  std::size_t variables = 0;
  /// DIMACS literals: v for x_v, −v for its negation.
  std::vector<std::vector<int>> clauses;
};

std::size_t count_satisfying(const Cnf& cnf);

/// (Inf;Min) over {0,1}. Slave i waits until the whole m-letter prefix has
/// been read, then reads an n-letter assignment and returns 1 if it satisfies
/// clause i, else 0. Afterwards the master launches a slave of value 1 at
/// every position.
NestedWeightedAutomaton cnf_to_nwa(const Cnf& cnf);

/// Deterministic finite automaton over {a,b}; missing moves reject.
using Dfa = LabeledAutomaton<std::monostate>;

/// (Inf;Min) over {a,b,#}. After an m-letter prefix, slave i runs automaton
/// i up to the first # and returns 1 if it accepts there, else 0.
NestedWeightedAutomaton intersection_to_nwa(const std::vector<Dfa>& automata);

}  // namespace quanta
