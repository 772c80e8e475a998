#include "quanta/core.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace quanta {

Alphabet::Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error(ErrorCode::InvalidArgument, "alphabet is empty");
  for (LetterId i = 0; i < letters_.size(); ++i) {
    if (letters_[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty letter symbol");
    if (!index_.emplace(letters_[i], i).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate letter '" + letters_[i] + "'");
    }
  }
}

std::optional<LetterId> Alphabet::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LetterId Alphabet::id(std::string_view symbol) const {
  auto found = find(symbol);
  if (!found) throw Error(ErrorCode::InvalidArgument, "unknown letter '" + std::string(symbol) + "'");
  return *found;
}

bool Alphabet::single_char() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](const std::string& l) { return l.size() == 1; });
}

Word Alphabet::parse_word(std::string_view text) const {
  Word word;
  if (single_char()) {
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      word.push_back(id(std::string_view(&c, 1)));
    }
    return word;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) word.push_back(id(text.substr(i, j - i)));
    i = j;
  }
  return word;
}

std::string Alphabet::format(const Word& word) const {
  std::string out;
  bool sep = !single_char();
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (sep && i > 0) out += ' ';
    out += letter(word[i]);
  }
  return out;
}

const Integer& Weight::value() const {
  if (!value_) throw Error(ErrorCode::InvalidArgument, "silent weight has no value");
  return *value_;
}

FinValFn FinValFn::bsum(Integer bound) {
  if (bound < 1) throw Error(ErrorCode::InvalidArgument, "BSum bound must be at least 1");
  return {Kind::BSum, std::move(bound)};
}

std::string name(const FinValFn& fn) {
  switch (fn.kind) {
    case FinValFn::Kind::Min: return "Min";
    case FinValFn::Kind::Max: return "Max";
    case FinValFn::Kind::Sum: return "Sum";
    case FinValFn::Kind::SumPlus: return "SumPlus";
    case FinValFn::Kind::BSum: return "BSum";
  }
  return "?";
}

std::string name(InfValFn fn) {
  switch (fn) {
    case InfValFn::Sup: return "Sup";
    case InfValFn::Inf: return "Inf";
    case InfValFn::LimSup: return "LimSup";
    case InfValFn::LimInf: return "LimInf";
    case InfValFn::LimAvg: return "LimAvg";
  }
  return "?";
}

ValueFunction parse_value_function(std::string_view text, std::optional<Integer> bound) {
  if (text == "Min") return FinValFn::min();
  if (text == "Max") return FinValFn::max();
  if (text == "Sum") return FinValFn::sum();
  if (text == "SumPlus" || text == "Sum+") return FinValFn::sum_plus();
  if (text == "BSum") {
    if (!bound) throw Error(ErrorCode::Schema, "BSum requires a bound");
    return FinValFn::bsum(*bound);
  }
  if (text == "Sup") return InfValFn::Sup;
  if (text == "Inf") return InfValFn::Inf;
  if (text == "LimSup") return InfValFn::LimSup;
  if (text == "LimInf") return InfValFn::LimInf;
  if (text == "LimAvg") return InfValFn::LimAvg;
  throw Error(ErrorCode::Schema, "unknown value function '" + std::string(text) + "'");
}

bool is_lower(InfValFn fn) { return fn == InfValFn::Inf || fn == InfValFn::LimInf; }

InfValFn swap_direction(InfValFn fn) {
  switch (fn) {
    case InfValFn::Sup: return InfValFn::Inf;
    case InfValFn::Inf: return InfValFn::Sup;
    case InfValFn::LimSup: return InfValFn::LimInf;
    case InfValFn::LimInf: return InfValFn::LimSup;
    case InfValFn::LimAvg: break;
  }
  throw Error(ErrorCode::NotDualizable, "LimAvg has no dual in the supported family");
}

void FinValAccumulator::push(const Integer& weight) {
  switch (kind_) {
    case FinValFn::Kind::Min:
      if (empty_ || weight < acc_) acc_ = weight;
      break;
    case FinValFn::Kind::Max:
      if (empty_ || weight > acc_) acc_ = weight;
      break;
    case FinValFn::Kind::Sum:
      acc_ += weight;
      break;
    case FinValFn::Kind::SumPlus:
      acc_ += abs(weight);
      break;
    case FinValFn::Kind::BSum:
      if (!saturated_) {
        acc_ += weight;
        if (acc_ > bound_) {
          acc_ = bound_;
          saturated_ = true;
        } else if (acc_ < -bound_) {
          acc_ = -bound_;
          saturated_ = true;
        }
      }
      break;
  }
  empty_ = false;
}

ExtValue FinValAccumulator::value() const {
  if (empty_) return ExtValue::bottom();
  return ExtValue(acc_);
}

ExtValue apply_finval(const FinValFn& fn, std::span<const Integer> seq) {
  FinValAccumulator acc(fn);
  for (const auto& w : seq) acc.push(w);
  return acc.value();
}

Rational estimate_infval(InfValFn fn, std::span<const ExtValue> seq, std::size_t burn_in) {
  std::optional<Rational> extremum;
  Rational total;
  std::size_t count = 0;
  for (std::size_t i = burn_in; i < seq.size(); ++i) {
    if (seq[i].is_bottom()) continue;
    const Rational& v = seq[i].rational();
    ++count;
    total += v;
    bool lower = fn == InfValFn::Inf || fn == InfValFn::LimInf;
    if (!extremum || (lower ? v < *extremum : v > *extremum)) extremum = v;
  }
  if (count == 0) throw Error(ErrorCode::EmptyAfterFilter, "no values survive burn-in and filtering");
  if (fn == InfValFn::LimAvg) return total / Rational(static_cast<unsigned long>(count));
  return *extremum;
}

const FinValFn& WeightedAutomaton::finval() const {
  if (const auto* fn = std::get_if<FinValFn>(&fn_)) return *fn;
  throw Error(ErrorCode::InvalidArgument, "automaton has an infinite-word value function");
}

InfValFn WeightedAutomaton::infval() const {
  if (const auto* fn = std::get_if<InfValFn>(&fn_)) return *fn;
  throw Error(ErrorCode::InvalidArgument, "automaton has a finite-word value function");
}

ExtValue run_weighted_finite(const WeightedAutomaton& wa, const Word& word) {
  if (wa.word_mode() != WordMode::Finite) {
    throw Error(ErrorCode::InvalidArgument, "run_weighted_finite needs a finite-word automaton");
  }
  FinValAccumulator acc(wa.finval());
  StateId q = wa.initial();
  for (LetterId a : word) {
    const auto* t = wa.step(q, a);
    if (!t) return ExtValue::plus_infinity();
    if (!t->label.is_silent()) acc.push(t->label.value());
    q = t->to;
  }
  if (!wa.is_accepting(q)) return ExtValue::plus_infinity();
  return acc.value();
}

std::optional<ExtValue> run_slave(const WeightedAutomaton& slave, const Word& word) {
  FinValAccumulator acc(slave.finval());
  StateId q = slave.initial();
  if (slave.is_accepting(q)) return ExtValue::bottom();
  for (LetterId a : word) {
    const auto* t = slave.step(q, a);
    if (!t) return ExtValue::plus_infinity();
    if (!t->label.is_silent()) acc.push(t->label.value());
    q = t->to;
    if (slave.is_accepting(q)) return acc.value();
  }
  return std::nullopt;
}

namespace {

ValueFunction dual_function(const ValueFunction& fn) {
  if (const auto* inf = std::get_if<InfValFn>(&fn)) return swap_direction(*inf);
  const auto& fin = std::get<FinValFn>(fn);
  switch (fin.kind) {
    case FinValFn::Kind::Min: return FinValFn::max();
    case FinValFn::Kind::Max: return FinValFn::min();
    case FinValFn::Kind::Sum:
    case FinValFn::Kind::BSum: return fin;
    case FinValFn::Kind::SumPlus: break;
  }
  throw Error(ErrorCode::NotDualizable, "SumPlus has no dual in the supported family");
}

template <class Map>
WeightedAutomaton rebuild(const WeightedAutomaton& wa, ValueFunction fn, Map&& map_weight) {
  WeightedAutomaton out(wa.alphabet(), std::move(fn), wa.word_mode());
  for (StateId s = 0; s < wa.num_states(); ++s) out.add_state(wa.state_name(s), wa.is_accepting(s));
  out.set_initial(wa.initial_states().front());
  for (std::size_t i = 1; i < wa.initial_states().size(); ++i) out.add_initial(wa.initial_states()[i]);
  for (const auto& t : wa.transitions()) out.add_transition(t.from, t.letter, t.to, map_weight(t.label));
  return out;
}

}  // namespace

WeightedAutomaton dualize(const WeightedAutomaton& wa) {
  return rebuild(wa, dual_function(wa.value_function()), [](const Weight& w) { return -w; });
}

WeightedAutomaton with_value_function(const WeightedAutomaton& wa, ValueFunction fn) {
  return rebuild(wa, std::move(fn), [](const Weight& w) { return w; });
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const Issue& i) { return i.severity == Issue::Severity::Error; });
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

void ValidationReport::error(std::string code, std::string message) {
  issues.push_back({Issue::Severity::Error, std::move(code), std::move(message)});
}

void ValidationReport::warning(std::string code, std::string message) {
  issues.push_back({Issue::Severity::Warning, std::move(code), std::move(message)});
}

void validate_slave(const WeightedAutomaton& slave, const std::string& label,
                    ValidationReport& report) {
  if (!slave.is_deterministic()) report.error("nondeterministic", label + " is not deterministic");
  if (slave.num_states() == 0) {
    report.error("empty", label + " has no states");
    return;
  }
  if (!std::holds_alternative<FinValFn>(slave.value_function())) {
    report.error("value-function", label + " needs a finite-word value function");
  }
  for (const auto& t : slave.transitions()) {
    if (t.label.is_silent()) {
      report.error("silent-weight", label + " has a silent weight on a transition");
      break;
    }
  }
  // Transitions out of accepting states are never taken under halt-at-accept.
  std::vector<std::vector<StateId>> succ(slave.num_states());
  for (const auto& t : slave.transitions()) succ[t.from].push_back(t.to);
  for (StateId f = 0; f < slave.num_states(); ++f) {
    if (!slave.is_accepting(f) || succ[f].empty()) continue;
    std::vector<bool> seen(slave.num_states(), false);
    std::vector<StateId> stack(succ[f].begin(), succ[f].end());
    bool reaches_accepting = false;
    while (!stack.empty() && !reaches_accepting) {
      StateId s = stack.back();
      stack.pop_back();
      if (seen[s]) continue;
      seen[s] = true;
      if (slave.is_accepting(s)) reaches_accepting = true;
      for (StateId n : succ[s]) stack.push_back(n);
    }
    if (reaches_accepting) {
      report.warning("prefix-free", label + ": accepting state '" + slave.state_name(f) +
                                        "' reaches an accepting state again");
    } else {
      report.warning("accepting-outgoing", label + ": accepting state '" + slave.state_name(f) +
                                               "' has outgoing transitions");
    }
  }
}

}  // namespace quanta
