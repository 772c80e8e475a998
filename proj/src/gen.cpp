#include "quanta/gen.hpp"

#include <array>
#include <cstdlib>

namespace quanta {

MonitorCounterAutomaton build_blocks_diff() {
  MonitorCounterAutomaton a(Alphabet({"a", "#"}), InfValFn::Sup, 2);
  LetterId la = 0;
  LetterId hash = 1;
  StateId q0 = a.add_state("q0", true);
  StateId q1 = a.add_state("q1");
  StateId q2 = a.add_state("q2");
  StateId q3 = a.add_state("q3");
  using I = CounterInstruction;
  a.add_transition(q0, hash, q1, {I::start(), I::add(0)});
  a.add_transition(q1, hash, q2, {I::add(0), I::start()});
  a.add_transition(q2, la, q2, {I::add(1), I::add(-1)});
  a.add_transition(q2, hash, q3, {I::add(0), I::add(0)});
  a.add_transition(q3, la, q3, {I::add(-1), I::add(1)});
  a.add_transition(q3, hash, q0, {I::terminate(), I::terminate()});
  return a;
}

NestedWeightedAutomaton build_art(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "ART needs k >= 1");
  Alphabet sigma({"r", "g", "#"});
  LetterId r = 0, g = 1, hash = 2;
  NestedWeightedAutomaton nwa;
  nwa.master = MasterAutomaton(sigma);
  nwa.master_fn = InfValFn::LimAvg;
  std::vector<StateId> q;
  for (std::size_t i = 0; i <= k; ++i) q.push_back(nwa.master.add_state("q" + std::to_string(i), i == 0));
  constexpr SlaveIndex dummy = 0;
  constexpr SlaveIndex counter = 1;
  nwa.master.add_transition(q[0], r, q[1], counter);
  for (std::size_t i = 1; i <= k; ++i) {
    if (i < k) nwa.master.add_transition(q[i], r, q[i + 1], counter);
    nwa.master.add_transition(q[i], hash, q[i], dummy);
    nwa.master.add_transition(q[i], g, q[0], dummy);
  }

  WeightedAutomaton b1(sigma, FinValFn::sum(), WordMode::Finite);
  b1.add_state("q0", true);
  WeightedAutomaton b2(sigma, FinValFn::sum(), WordMode::Finite);
  StateId wait = b2.add_state("q0");
  StateId done = b2.add_state("q1", true);
  b2.add_transition(wait, hash, wait, Weight(1));
  b2.add_transition(wait, r, wait, Weight(1));
  b2.add_transition(wait, g, done, Weight(0));
  nwa.slaves = {std::move(b1), std::move(b2)};
  nwa.dummies = {dummy};
  return nwa;
}

LabeledMarkovChain request_grant_chain(const Rational& p) {
  if (p <= 0 || p > 1) throw Error(ErrorCode::InvalidArgument, "grant probability must lie in (0,1]");
  LabeledMarkovChain m(Alphabet({"r", "g", "#"}));
  StateId s0 = m.add_state("s0");
  StateId s1 = m.add_state("s1");
  m.set_initial(s0);
  m.add_edge(s0, 0, s1, Rational(1));
  if (p < 1) m.add_edge(s1, 2, s1, 1 - p);
  m.add_edge(s1, 1, s0, p);
  return m;
}

LabeledMarkovChain uniform_chain(const Alphabet& alphabet) {
  if (alphabet.size() == 0) throw Error(ErrorCode::InvalidArgument, "uniform chain needs letters");
  LabeledMarkovChain m(alphabet);
  StateId s = m.add_state("s");
  m.set_initial(s);
  Rational p(1, static_cast<unsigned long>(alphabet.size()));
  for (LetterId a = 0; a < alphabet.size(); ++a) m.add_edge(s, a, s, p);
  return m;
}

namespace {

bool satisfies(const std::vector<int>& clause, std::size_t assignment) {
  for (int lit : clause) {
    bool value = (assignment >> (std::abs(lit) - 1)) & 1U;
    if (value == (lit > 0)) return true;
  }
  return false;
}

void check_cnf(const Cnf& cnf) {
  if (cnf.variables < 1 || cnf.clauses.empty()) {
    throw Error(ErrorCode::InvalidArgument, "CNF needs at least one variable and one clause");
  }
  if (cnf.variables > 20) throw Error(ErrorCode::InvalidArgument, "CNF has too many variables to enumerate");
  for (const auto& c : cnf.clauses) {
    for (int lit : c) {
      if (lit == 0 || static_cast<std::size_t>(std::abs(lit)) > cnf.variables) {
        throw Error(ErrorCode::InvalidArgument, "literal out of range: " + std::to_string(lit));
      }
    }
  }
}

/// Slave of value 1 that reads one letter.
WeightedAutomaton constant_one(const Alphabet& sigma) {
  WeightedAutomaton s(sigma, FinValFn::min(), WordMode::Finite);
  StateId a = s.add_state("wait");
  StateId b = s.add_state("done", true);
  for (LetterId l = 0; l < sigma.size(); ++l) s.add_transition(a, l, b, Weight(1));
  return s;
}

/// Master launching slaves 1..m at positions 0..m−1, then slave m+1 forever.
MasterAutomaton staggered_master(const Alphabet& sigma, std::size_t m) {
  MasterAutomaton master(sigma);
  std::vector<StateId> p;
  for (std::size_t i = 0; i < m; ++i) p.push_back(master.add_state("p" + std::to_string(i + 1)));
  StateId tail = master.add_state("tail", true);
  p.push_back(tail);
  for (std::size_t i = 0; i < m; ++i) {
    for (LetterId l = 0; l < sigma.size(); ++l) master.add_transition(p[i], l, p[i + 1], static_cast<SlaveIndex>(i));
  }
  for (LetterId l = 0; l < sigma.size(); ++l) master.add_transition(tail, l, tail, static_cast<SlaveIndex>(m));
  return master;
}

}  // namespace

std::size_t count_satisfying(const Cnf& cnf) {
  check_cnf(cnf);
  std::size_t count = 0;
  for (std::size_t v = 0; v < (std::size_t{1} << cnf.variables); ++v) {
    bool all = true;
    for (const auto& c : cnf.clauses) all = all && satisfies(c, v);
    count += all;
  }
  return count;
}

NestedWeightedAutomaton cnf_to_nwa(const Cnf& cnf) {
  check_cnf(cnf);
  Alphabet sigma({"0", "1"});
  std::size_t m = cnf.clauses.size();
  std::size_t n = cnf.variables;
  NestedWeightedAutomaton nwa;
  nwa.master = staggered_master(sigma, m);
  nwa.master_fn = InfValFn::Inf;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& clause = cnf.clauses[i];
    WeightedAutomaton s(sigma, FinValFn::min(), WordMode::Finite);
    std::size_t skip = m - i;
    std::vector<StateId> wait;
    for (std::size_t j = 0; j < skip; ++j) wait.push_back(s.add_state("skip" + std::to_string(j)));
    // read[j][sat]: j assignment letters read, clause satisfied so far?
    std::vector<std::array<StateId, 2>> read;
    for (std::size_t j = 0; j < n; ++j) {
      read.push_back({s.add_state("x" + std::to_string(j + 1) + "-open"),
                      s.add_state("x" + std::to_string(j + 1) + "-sat")});
    }
    StateId done = s.add_state("done", true);
    for (std::size_t j = 0; j < skip; ++j) {
      StateId to = j + 1 < skip ? wait[j + 1] : read[0][0];
      for (LetterId l = 0; l < 2; ++l) s.add_transition(wait[j], l, to, Weight(1));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (int sat = 0; sat < 2; ++sat) {
        for (LetterId l = 0; l < 2; ++l) {
          bool now = sat;
          for (int lit : clause) {
            if (static_cast<std::size_t>(std::abs(lit)) == j + 1 && (l == 1) == (lit > 0)) now = true;
          }
          if (j + 1 < n) s.add_transition(read[j][sat], l, read[j + 1][now], Weight(1));
          else s.add_transition(read[j][sat], l, done, Weight(now ? 1 : 0));
        }
      }
    }
    nwa.slaves.push_back(std::move(s));
  }
  nwa.slaves.push_back(constant_one(sigma));
  return nwa;
}

NestedWeightedAutomaton intersection_to_nwa(const std::vector<Dfa>& automata) {
  if (automata.empty()) throw Error(ErrorCode::InvalidArgument, "intersection needs at least one automaton");
  Alphabet ab({"a", "b"});
  Alphabet sigma({"a", "b", "#"});
  LetterId hash = 2;
  std::size_t m = automata.size();
  NestedWeightedAutomaton nwa;
  nwa.master = staggered_master(sigma, m);
  nwa.master_fn = InfValFn::Inf;
  for (std::size_t i = 0; i < m; ++i) {
    const Dfa& d = automata[i];
    if (!(d.alphabet() == ab)) throw Error(ErrorCode::InvalidArgument, "intersection automata must use the alphabet {a,b}");
    d.require_deterministic("automaton " + std::to_string(i + 1));
    WeightedAutomaton s(sigma, FinValFn::min(), WordMode::Finite);
    std::size_t skip = m - i;
    std::vector<StateId> wait;
    for (std::size_t j = 0; j < skip; ++j) wait.push_back(s.add_state("skip" + std::to_string(j)));
    std::vector<StateId> run;
    for (StateId q = 0; q < d.num_states(); ++q) run.push_back(s.add_state("run-" + d.state_name(q)));
    StateId dead = s.add_state("dead");
    StateId done = s.add_state("done", true);
    for (std::size_t j = 0; j < skip; ++j) {
      StateId to = j + 1 < skip ? wait[j + 1] : run[d.initial()];
      for (LetterId l = 0; l < sigma.size(); ++l) s.add_transition(wait[j], l, to, Weight(1));
    }
    for (StateId q = 0; q < d.num_states(); ++q) {
      for (LetterId l = 0; l < 2; ++l) {
        const auto* t = d.step(q, l);
        s.add_transition(run[q], l, t ? run[t->to] : dead, Weight(1));
      }
      s.add_transition(run[q], hash, done, Weight(d.is_accepting(q) ? 1 : 0));
    }
    for (LetterId l = 0; l < 2; ++l) s.add_transition(dead, l, dead, Weight(1));
    s.add_transition(dead, hash, done, Weight(0));
    nwa.slaves.push_back(std::move(s));
  }
  nwa.slaves.push_back(constant_one(sigma));
  return nwa;
}

}  // namespace quanta
