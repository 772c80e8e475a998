#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "quanta/sim.hpp"
#include "quanta/translate.hpp"

namespace quanta {

namespace {

constexpr std::int64_t kWeightLimit = std::int64_t{1} << 40;

std::int64_t small(const Integer& v) {
  if (v >= kWeightLimit || v <= -kWeightLimit) {
    throw Error(ErrorCode::ResourceLimit, "weight " + v.get_str() + " is too large for the simulator");
  }
  return v.get_si();
}

struct CompiledChain {
  struct Option {
    double cumulative;
    LetterId letter;
    std::int32_t to;
  };
  std::vector<std::vector<Option>> options;
  std::int32_t initial;

  explicit CompiledChain(const LabeledMarkovChain& m) : options(m.num_states()), initial(static_cast<std::int32_t>(m.initial())) {
    for (StateId s = 0; s < m.num_states(); ++s) {
      double acc = 0;
      for (std::size_t e : m.out(s)) {
        const auto& edge = m.edges()[e];
        if (edge.prob == 0) continue;
        acc += edge.prob.get_d();
        options[s].push_back({acc, edge.letter, static_cast<std::int32_t>(edge.to)});
      }
      if (options[s].empty()) {
        throw Error(ErrorCode::InvalidArgument, "chain state " + m.state_name(s) + " has no successor");
      }
      options[s].back().cumulative = std::numeric_limits<double>::infinity();
    }
  }

  const Option& draw(std::int32_t s, SampleRng& rng) const {
    double u = rng.uniform();
    const auto& opts = options[static_cast<std::size_t>(s)];
    std::size_t i = 0;
    while (u >= opts[i].cumulative) ++i;
    return opts[i];
  }
};

/// Folds completed values into the estimator of a master value function.
class Estimator {
 public:
  explicit Estimator(InfValFn fn) : fn_(fn) {}
  void add(std::int64_t v) {
    ++count_;
    sum_ += static_cast<long double>(v);
    bool lower = fn_ == InfValFn::Inf || fn_ == InfValFn::LimInf;
    if (count_ == 1 || (lower ? v < ext_ : v > ext_)) ext_ = v;
  }
  std::optional<double> value() const {
    if (count_ == 0) return std::nullopt;
    if (fn_ == InfValFn::LimAvg) return static_cast<double>(sum_ / static_cast<long double>(count_));
    return static_cast<double>(ext_);
  }

 private:
  InfValFn fn_;
  std::size_t count_ = 0;
  long double sum_ = 0;
  std::int64_t ext_ = 0;
};

struct CompiledSlave {
  FinValFn::Kind kind;
  std::int64_t bound;
  std::int32_t initial;
  bool silent;
  std::vector<char> accepting;
  std::vector<std::int32_t> next;  // state * letters + letter, -1 if missing
  std::vector<std::int64_t> weight;
};

struct CompiledNwa {
  std::size_t letters;
  InfValFn fn;
  std::int32_t initial;
  std::vector<std::int32_t> next;
  std::vector<std::uint32_t> label;
  std::vector<CompiledSlave> slaves;

  explicit CompiledNwa(const NestedWeightedAutomaton& nwa)
      : letters(nwa.alphabet().size()), fn(nwa.master_fn), initial(static_cast<std::int32_t>(nwa.master.initial())) {
    const auto& master = nwa.master;
    next.assign(master.num_states() * letters, -1);
    label.assign(master.num_states() * letters, 0);
    for (StateId q = 0; q < master.num_states(); ++q) {
      for (LetterId a = 0; a < letters; ++a) {
        if (const auto* t = master.step(q, a)) {
          next[q * letters + a] = static_cast<std::int32_t>(t->to);
          label[q * letters + a] = t->label;
        }
      }
    }
    for (SlaveIndex i = 0; i < nwa.slaves.size(); ++i) {
      const auto& s = nwa.slaves[i];
      CompiledSlave c{};
      c.silent = nwa.is_silent_launch(i);
      c.initial = static_cast<std::int32_t>(s.initial());
      if (!c.silent) {
        c.kind = s.finval().kind;
        c.bound = small(s.finval().bound);
        c.accepting.resize(s.num_states());
        c.next.assign(s.num_states() * letters, -1);
        c.weight.assign(s.num_states() * letters, 0);
        for (StateId q = 0; q < s.num_states(); ++q) {
          c.accepting[q] = s.is_accepting(q);
          for (LetterId a = 0; a < letters; ++a) {
            if (const auto* t = s.step(q, a)) {
              c.next[q * letters + a] = static_cast<std::int32_t>(t->to);
              c.weight[q * letters + a] = small(t->label.value());
            }
          }
        }
      }
      slaves.push_back(std::move(c));
    }
  }
};

struct Active {
  std::uint32_t slave;
  std::int32_t state;
  std::int64_t acc;
  bool empty;
  bool saturated;
  std::size_t launch;
};

void push(const CompiledSlave& s, Active& a, std::int64_t w) {
  switch (s.kind) {
    case FinValFn::Kind::Min: a.acc = a.empty ? w : std::min(a.acc, w); break;
    case FinValFn::Kind::Max: a.acc = a.empty ? w : std::max(a.acc, w); break;
    case FinValFn::Kind::Sum: a.acc += w; break;
    case FinValFn::Kind::SumPlus: a.acc += w < 0 ? -w : w; break;
    case FinValFn::Kind::BSum:
      if (!a.saturated) {
        a.acc += w;
        if (a.acc > s.bound || a.acc < -s.bound) {
          a.acc = a.acc > 0 ? s.bound : -s.bound;
          a.saturated = true;
        }
      }
      break;
  }
  a.empty = false;
}

std::optional<double> run_nwa_sample(const CompiledNwa& nwa, const CompiledChain& chain, std::size_t horizon,
                                     std::size_t burn_in, SampleRng& rng, std::vector<Active>& active) {
  active.clear();
  Estimator est(nwa.fn);
  std::int32_t q = nwa.initial;
  std::int32_t s = chain.initial;
  for (std::size_t pos = 0; pos < horizon; ++pos) {
    const auto& opt = chain.draw(s, rng);
    s = opt.to;
    std::size_t key = static_cast<std::size_t>(q) * nwa.letters + opt.letter;
    std::int32_t q2 = nwa.next[key];
    if (q2 < 0) return std::nullopt;
    std::uint32_t launched = nwa.label[key];
    q = q2;
    if (!nwa.slaves[launched].silent) {
      active.push_back({launched, nwa.slaves[launched].initial, 0, true, false, pos});
    }
    std::size_t keep = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      Active a = active[i];
      const auto& sl = nwa.slaves[a.slave];
      std::size_t skey = static_cast<std::size_t>(a.state) * nwa.letters + opt.letter;
      std::int32_t next = sl.next[skey];
      if (next < 0) return std::nullopt;
      push(sl, a, sl.weight[skey]);
      a.state = next;
      if (sl.accepting[static_cast<std::size_t>(next)]) {
        if (a.launch >= burn_in) est.add(a.acc);
      } else {
        active[keep++] = a;
      }
    }
    active.resize(keep);
  }
  return est.value();
}

struct CompiledWa {
  std::size_t letters;
  InfValFn fn;
  std::int32_t initial;
  std::vector<std::int32_t> next;
  std::vector<std::int64_t> weight;
  std::vector<char> silent;

  explicit CompiledWa(const WeightedAutomaton& wa)
      : letters(wa.alphabet().size()), fn(wa.infval()), initial(static_cast<std::int32_t>(wa.initial())) {
    next.assign(wa.num_states() * letters, -1);
    weight.assign(wa.num_states() * letters, 0);
    silent.assign(wa.num_states() * letters, 1);
    for (StateId q = 0; q < wa.num_states(); ++q) {
      for (LetterId a = 0; a < letters; ++a) {
        if (const auto* t = wa.step(q, a)) {
          next[q * letters + a] = static_cast<std::int32_t>(t->to);
          if (!t->label.is_silent()) {
            silent[q * letters + a] = 0;
            weight[q * letters + a] = small(t->label.value());
          }
        }
      }
    }
  }
};

std::optional<double> run_wa_sample(const CompiledWa& wa, const CompiledChain& chain, std::size_t horizon,
                                    std::size_t burn_in, SampleRng& rng) {
  Estimator est(wa.fn);
  std::int32_t q = wa.initial;
  std::int32_t s = chain.initial;
  for (std::size_t pos = 0; pos < horizon; ++pos) {
    const auto& opt = chain.draw(s, rng);
    s = opt.to;
    std::size_t key = static_cast<std::size_t>(q) * wa.letters + opt.letter;
    if (wa.next[key] < 0) return std::nullopt;
    q = wa.next[key];
    if (!wa.silent[key] && pos >= burn_in) est.add(wa.weight[key]);
  }
  return est.value();
}

std::size_t default_burn_in(InfValFn fn, const MonteCarloOptions& o) {
  if (o.burn_in) {
    if (*o.burn_in > o.horizon) throw Error(ErrorCode::InvalidArgument, "burn-in exceeds the horizon");
    return *o.burn_in;
  }
  return fn == InfValFn::Inf || fn == InfValFn::Sup ? 0 : o.horizon / 10;
}

/// Runs samples in contiguous blocks per thread; results land by index.
template <class Sample>
MonteCarloResult run_parallel(const MonteCarloOptions& o, std::size_t burn_in, Sample sample) {
  MonteCarloResult r;
  r.samples = o.samples;
  r.burn_in = burn_in;
  r.values.resize(o.samples);
  unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, o.samples)));
  auto work = [&](std::size_t begin, std::size_t end) {
    auto state = sample.make_state();
    for (std::size_t i = begin; i < end; ++i) {
      SampleRng rng(o.seed, i);
      r.values[i] = sample(rng, state);
    }
  };
  if (threads <= 1) {
    work(0, o.samples);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    std::size_t chunk = (o.samples + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(o.samples, begin + chunk);
      pool.emplace_back([&, t, begin, end]() {
        try {
          if (begin < end) work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  long double sum = 0;
  for (const auto& v : r.values) {
    if (!v) continue;
    ++r.accepted;
    sum += *v;
  }
  if (r.accepted > 0) {
    long double mean = sum / static_cast<long double>(r.accepted);
    long double sq = 0;
    for (const auto& v : r.values) {
      if (v) sq += (*v - mean) * (*v - mean);
    }
    r.mean = static_cast<double>(mean);
    r.variance = r.accepted > 1 ? static_cast<double>(sq / static_cast<long double>(r.accepted - 1)) : 0.0;
  } else {
    r.mean = std::numeric_limits<double>::quiet_NaN();
  }
  r.rejection_rate = o.samples ? static_cast<double>(o.samples - r.accepted) / static_cast<double>(o.samples) : 0.0;
  return r;
}

struct NwaSample {
  const CompiledNwa* nwa;
  const CompiledChain* chain;
  std::size_t horizon;
  std::size_t burn_in;
  std::vector<Active> make_state() const { return {}; }
  std::optional<double> operator()(SampleRng& rng, std::vector<Active>& active) const {
    return run_nwa_sample(*nwa, *chain, horizon, burn_in, rng, active);
  }
};

struct WaSample {
  const CompiledWa* wa;
  const CompiledChain* chain;
  std::size_t horizon;
  std::size_t burn_in;
  int make_state() const { return 0; }
  std::optional<double> operator()(SampleRng& rng, int&) const {
    return run_wa_sample(*wa, *chain, horizon, burn_in, rng);
  }
};

}  // namespace

double MonteCarloResult::standard_error() const {
  return accepted ? std::sqrt(variance / static_cast<double>(accepted)) : std::numeric_limits<double>::quiet_NaN();
}

MonteCarloResult monte_carlo_estimate(const NestedWeightedAutomaton& nwa, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options) {
  if (!(nwa.alphabet() == m.alphabet())) throw Error(ErrorCode::InvalidArgument, "NWA and chain use different alphabets");
  nwa.master.require_deterministic("master automaton");
  CompiledNwa compiled(nwa);
  CompiledChain chain(m);
  std::size_t burn_in = default_burn_in(nwa.master_fn, options);
  return run_parallel(options, burn_in, NwaSample{&compiled, &chain, options.horizon, burn_in});
}

MonteCarloResult monte_carlo_estimate(const MonitorCounterAutomaton& mca, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options) {
  return monte_carlo_estimate(mca_to_nwa(mca), m, options);
}

MonteCarloResult monte_carlo_estimate(const WeightedAutomaton& wa, const LabeledMarkovChain& m,
                                      const MonteCarloOptions& options) {
  if (!(wa.alphabet() == m.alphabet())) throw Error(ErrorCode::InvalidArgument, "automaton and chain use different alphabets");
  wa.require_deterministic("weighted automaton");
  CompiledWa compiled(wa);
  CompiledChain chain(m);
  std::size_t burn_in = default_burn_in(compiled.fn, options);
  return run_parallel(options, burn_in, WaSample{&compiled, &chain, options.horizon, burn_in});
}

}  // namespace quanta
