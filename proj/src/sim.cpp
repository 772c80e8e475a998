#include "quanta/sim.hpp"

#include <functional>
#include <map>

namespace quanta {

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Word sample_word(const LabeledMarkovChain& m, std::size_t length, std::uint64_t seed, std::uint64_t index) {
  SampleRng rng(seed, index);
  Word word;
  word.reserve(length);
  StateId s = m.initial();
  for (std::size_t i = 0; i < length; ++i) {
    double u = rng.uniform();
    double acc = 0;
    const ChainEdge* chosen = nullptr;
    for (std::size_t e : m.out(s)) {
      const auto& edge = m.edges()[e];
      if (edge.prob == 0) continue;
      chosen = &edge;
      acc += edge.prob.get_d();
      if (u < acc) break;
    }
    if (!chosen) throw Error(ErrorCode::InvalidArgument, "chain state " + m.state_name(s) + " has no successor");
    word.push_back(chosen->letter);
    s = chosen->to;
  }
  return word;
}

std::optional<Rational> prefix_estimate(const NestedWeightedAutomaton& nwa, const Word& word,
                                        std::size_t burn_in) {
  auto trace = simulate_nwa_prefix(nwa, word, TruncationPolicy::DropRunning);
  if (trace.death != Death::None) return std::nullopt;
  std::vector<ExtValue> seq;
  for (const auto& c : trace.completed) {
    if (c.position >= burn_in) seq.push_back(c.value);
  }
  try {
    return estimate_infval(nwa.master_fn, seq, 0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyAfterFilter) return std::nullopt;
    throw;
  }
}

PrefixExpectation exhaustive_prefix_expectation(const WeightedAutomaton& slave, const LabeledMarkovChain& m,
                                                std::size_t depth, std::size_t cap) {
  if (depth > cap) throw Error(ErrorCode::DepthCap, "depth exceeds the cap of " + std::to_string(cap));
  PrefixExpectation out;
  if (slave.is_accepting(slave.initial())) {
    out.silent_mass = 1;
    return out;
  }
  const FinValFn& fn = slave.finval();
  struct Key {
    StateId chain;
    StateId state;
    FinValAccumulator acc;
    bool operator<(const Key& o) const {
      if (chain != o.chain) return chain < o.chain;
      if (state != o.state) return state < o.state;
      if (acc.empty() != o.acc.empty()) return acc.empty();
      if (acc.saturated() != o.acc.saturated()) return o.acc.saturated();
      return acc.partial() < o.acc.partial();
    }
  };
  std::map<Key, Rational> layer{{Key{m.initial(), slave.initial(), FinValAccumulator(fn)}, Rational(1)}};
  for (std::size_t step = 0; step < depth && !layer.empty(); ++step) {
    std::map<Key, Rational> next;
    for (const auto& [key, mass] : layer) {
      for (std::size_t e : m.out(key.chain)) {
        const auto& edge = m.edges()[e];
        if (edge.prob == 0) continue;
        Rational p = mass * edge.prob;
        const auto* t = slave.step(key.state, edge.letter);
        if (!t) {
          out.rejected_mass += p;
          continue;
        }
        FinValAccumulator acc = key.acc;
        acc.push(t->label.value());
        if (slave.is_accepting(t->to)) {
          out.completed_mass += p;
          out.expectation += p * acc.value().rational();
        } else {
          next[Key{edge.to, t->to, acc}] += p;
        }
      }
    }
    layer = std::move(next);
  }
  for (const auto& [key, mass] : layer) out.residual_mass += mass;
  return out;
}

PrefixExtremum exhaustive_prefix_extremum(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                          std::size_t depth, std::size_t cap) {
  if (depth > cap) throw Error(ErrorCode::DepthCap, "depth exceeds the cap of " + std::to_string(cap));
  if (nwa.master_fn != InfValFn::Inf && nwa.master_fn != InfValFn::Sup) {
    throw Error(ErrorCode::InvalidArgument, "exhaustive_prefix_extremum needs an Inf or Sup master");
  }
  bool low = nwa.master_fn == InfValFn::Inf;
  PrefixExtremum out;
  std::map<std::optional<ExtValue>, Rational, std::function<bool(const std::optional<ExtValue>&,
                                                                 const std::optional<ExtValue>&)>>
      outcomes([](const auto& a, const auto& b) {
        if (!a || !b) return !a && b.has_value();
        return *a < *b;
      });
  std::function<void(const NwaRunner&, StateId, std::optional<ExtValue>, const Rational&, std::size_t)> walk =
      [&](const NwaRunner& runner, StateId s, std::optional<ExtValue> ext, const Rational& mass, std::size_t left) {
        if (left == 0) {
          outcomes[ext] += mass;
          return;
        }
        for (std::size_t e : m.out(s)) {
          const auto& edge = m.edges()[e];
          if (edge.prob == 0) continue;
          NwaRunner next = runner;
          auto events = next.step(edge.letter);
          Rational p = mass * edge.prob;
          if (events.death != Death::None) {
            out.rejected_mass += p;
            continue;
          }
          auto ext2 = ext;
          for (const auto& c : events.completed) {
            if (c.value.is_bottom()) continue;
            if (!ext2 || (low ? c.value < *ext2 : c.value > *ext2)) ext2 = c.value;
          }
          walk(next, edge.to, ext2, p, left - 1);
        }
      };
  walk(NwaRunner(nwa), m.initial(), std::nullopt, Rational(1), depth);
  for (auto& [v, mass] : outcomes) out.outcomes.emplace_back(v, mass);
  return out;
}

namespace {

class WaRunner {
 public:
  explicit WaRunner(const WeightedAutomaton& wa) : wa_(&wa), state_(wa.initial()) {}

  StepEvents step(LetterId letter) {
    StepEvents ev;
    std::size_t pos = position_++;
    if (dead_) return ev;
    const auto* t = wa_->step(state_, letter);
    if (!t) {
      dead_ = true;
      ev.death = Death::MasterStuck;
      return ev;
    }
    state_ = t->to;
    ev.completed.push_back({pos, pos, t->label.is_silent() ? ExtValue::bottom() : ExtValue(t->label.value())});
    return ev;
  }

 private:
  const WeightedAutomaton* wa_;
  StateId state_;
  std::size_t position_ = 0;
  bool dead_ = false;
};

using AnyRunner = std::variant<NwaRunner, McaRunner, WaRunner>;

AnyRunner make_runner(Simulable s) {
  return std::visit(
      [](auto* target) -> AnyRunner {
        using T = std::remove_cv_t<std::remove_pointer_t<decltype(target)>>;
        if constexpr (std::is_same_v<T, NestedWeightedAutomaton>) return NwaRunner(*target);
        else if constexpr (std::is_same_v<T, MonitorCounterAutomaton>) return McaRunner(*target);
        else return WaRunner(*target);
      },
      s);
}

StepEvents step(AnyRunner& r, LetterId letter) {
  return std::visit([&](auto& runner) { return runner.step(letter); }, r);
}

/// Values one side has produced that the other has not matched yet.
struct Side {
  std::map<std::size_t, std::pair<ExtValue, std::size_t>> unmatched;  // position -> (value, step)
  std::optional<ExtValue> running;
};

struct Node {
  AnyRunner a;
  AnyRunner b;
  Side sa;
  Side sb;
};

class Explorer {
 public:
  Explorer(const Alphabet& alphabet, std::size_t max_len, const EquivalenceOptions& options)
      : alphabet_(alphabet), max_len_(max_len), options_(options) {}

  EquivalenceResult run(Node root) {
    Word word;
    explore(root, word);
    return result_;
  }

 private:
  bool fail(const Word& word, std::string reason) {
    result_.equivalent = false;
    result_.counterexample = word;
    result_.reason = std::move(reason);
    return false;
  }

  /// Records a completion from one side; false on a value mismatch.
  bool record(Side& mine, Side& other, const Completion& c, std::size_t stepno, const Word& word,
              const char* who) {
    if (c.value.is_bottom()) return true;
    if (options_.mode != CompareMode::PerPosition) {
      bool low = options_.mode == CompareMode::RunningMin;
      if (!mine.running || (low ? c.value < *mine.running : c.value > *mine.running)) mine.running = c.value;
      return true;
    }
    auto it = other.unmatched.find(c.position);
    if (it == other.unmatched.end()) {
      mine.unmatched[c.position] = {c.value, stepno};
      return true;
    }
    if (!(it->second.first == c.value)) {
      return fail(word, std::string("position ") + std::to_string(c.position) + ": " + who + " gives " +
                            c.value.to_string() + ", the other side " + it->second.first.to_string());
    }
    other.unmatched.erase(it);
    return true;
  }

  bool overdue(const Side& side, std::size_t stepno, const Word& word) {
    for (const auto& [pos, entry] : side.unmatched) {
      if (entry.second + options_.lag < stepno) {
        return fail(word, "position " + std::to_string(pos) + " is valued by only one side");
      }
    }
    return true;
  }

  bool explore(const Node& node, Word& word) {
    ++result_.words_checked;
    if (word.size() == max_len_) return true;
    for (LetterId a = 0; a < alphabet_.size(); ++a) {
      Node next = node;
      word.push_back(a);
      std::size_t stepno = word.size() - 1;
      auto ea = step(next.a, a);
      auto eb = step(next.b, a);
      bool da = ea.death != Death::None;
      bool db = eb.death != Death::None;
      if (da != db) return fail(word, std::string(da ? "left" : "right") + " side dies alone");
      if (!da) {
        for (const auto& c : ea.completed) {
          if (!record(next.sa, next.sb, c, stepno, word, "left")) return false;
        }
        for (const auto& c : eb.completed) {
          if (!record(next.sb, next.sa, c, stepno, word, "right")) return false;
        }
        if (options_.mode == CompareMode::PerPosition) {
          if (!overdue(next.sa, stepno, word) || !overdue(next.sb, stepno, word)) return false;
        } else if (!(next.sa.running == next.sb.running)) {
          return fail(word, "running extremum differs: " +
                                (next.sa.running ? next.sa.running->to_string() : "none") + " vs " +
                                (next.sb.running ? next.sb.running->to_string() : "none"));
        }
        if (!explore(next, word)) return false;
      } else {
        ++result_.words_checked;
      }
      word.pop_back();
    }
    return true;
  }

  const Alphabet& alphabet_;
  std::size_t max_len_;
  EquivalenceOptions options_;
  EquivalenceResult result_;
};

}  // namespace

EquivalenceResult check_equivalence_on_prefixes(Simulable a, Simulable b, const Alphabet& alphabet,
                                                std::size_t max_len, const EquivalenceOptions& options) {
  Node root{make_runner(a), make_runner(b), {}, {}};
  return Explorer(alphabet, max_len, options).run(std::move(root));
}

}  // namespace quanta
