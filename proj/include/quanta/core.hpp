#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "quanta/error.hpp"
#include "quanta/rational.hpp"

namespace quanta {

using LetterId = std::uint32_t;
using StateId = std::uint32_t;
using Word = std::vector<LetterId>;

inline constexpr StateId kNoState = static_cast<StateId>(-1);

class Alphabet {
 public:
  Alphabet() = default;
  /// Throws Error(InvalidArgument) on an empty list, empty symbols or duplicates.
  explicit Alphabet(std::vector<std::string> letters);

  std::size_t size() const { return letters_.size(); }
  const std::string& letter(LetterId id) const { return letters_.at(id); }
  const std::vector<std::string>& letters() const { return letters_; }
  std::optional<LetterId> find(std::string_view symbol) const;
  LetterId id(std::string_view symbol) const;

  /// Single-character alphabets read one letter per character; otherwise
  /// letters are separated by whitespace.
  Word parse_word(std::string_view text) const;
  std::string format(const Word& word) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.letters_ == b.letters_; }

 private:
  bool single_char() const;

  std::vector<std::string> letters_;
  std::unordered_map<std::string, LetterId> index_;
};

/// Transition weight; a silent weight contributes nothing to aggregation.
class Weight {
 public:
  Weight() = default;
  Weight(Integer value) : value_(std::move(value)) {}
  Weight(long value) : value_(Integer(value)) {}
  Weight(int value) : value_(Integer(value)) {}
  static Weight silent() { return Weight(); }

  bool is_silent() const { return !value_.has_value(); }
  const Integer& value() const;
  Weight operator-() const { return is_silent() ? Weight() : Weight(Integer(-*value_)); }
  friend bool operator==(const Weight& a, const Weight& b) { return a.value_ == b.value_; }
  std::string to_string() const { return is_silent() ? "silent" : value_->get_str(); }

 private:
  std::optional<Integer> value_;
};

struct FinValFn {
  enum class Kind : std::uint8_t { Min, Max, Sum, SumPlus, BSum };
  Kind kind = Kind::Sum;
  Integer bound;  // only meaningful for BSum

  static FinValFn min() { return {Kind::Min, 0}; }
  static FinValFn max() { return {Kind::Max, 0}; }
  static FinValFn sum() { return {Kind::Sum, 0}; }
  static FinValFn sum_plus() { return {Kind::SumPlus, 0}; }
  static FinValFn bsum(Integer bound);

  friend bool operator==(const FinValFn& a, const FinValFn& b) {
    return a.kind == b.kind && (a.kind != Kind::BSum || a.bound == b.bound);
  }
};

enum class InfValFn : std::uint8_t { Sup, Inf, LimSup, LimInf, LimAvg };

using ValueFunction = std::variant<FinValFn, InfValFn>;

std::string name(const FinValFn& fn);
std::string name(InfValFn fn);
/// Names: Min, Max, Sum, SumPlus, BSum, Sup, Inf, LimSup, LimInf, LimAvg.
ValueFunction parse_value_function(std::string_view text, std::optional<Integer> bound);

/// Sup, Inf, LimSup and LimInf aggregate by an extremum; this names which one.
enum class Extremum : std::uint8_t { Min, Max };
bool is_lower(InfValFn fn);  // Inf or LimInf
InfValFn swap_direction(InfValFn fn);

/// Incremental evaluation of a finite-word value function.
class FinValAccumulator {
 public:
  explicit FinValAccumulator(const FinValFn& fn) : kind_(fn.kind), bound_(fn.bound) {}
  void push(const Integer& weight);
  /// Bottom while nothing has been pushed.
  ExtValue value() const;
  bool empty() const { return empty_; }
  /// Running aggregate; for BSum this is the clamped partial sum.
  const Integer& partial() const { return acc_; }
  bool saturated() const { return saturated_; }
  friend bool operator==(const FinValAccumulator& a, const FinValAccumulator& b) {
    return a.kind_ == b.kind_ && a.empty_ == b.empty_ && a.saturated_ == b.saturated_ &&
           a.acc_ == b.acc_;
  }

 private:
  FinValFn::Kind kind_;
  Integer bound_;
  Integer acc_;
  bool empty_ = true;
  bool saturated_ = false;
};

ExtValue apply_finval(const FinValFn& fn, std::span<const Integer> seq);

/// Truncated estimator: drops the first burn_in entries, then Bottom entries,
/// and aggregates the rest. Throws EmptyAfterFilter if nothing survives.
Rational estimate_infval(InfValFn fn, std::span<const ExtValue> seq, std::size_t burn_in);

template <class Label>
struct Transition {
  StateId from;
  LetterId letter;
  StateId to;
  Label label;
};

/// Finite labeled automaton with a partial transition map. Adding a second
/// transition for an existing (state, letter) key, or a second initial
/// state, marks the automaton non-deterministic; lookups return the first.
template <class Label>
class LabeledAutomaton {
 public:
  LabeledAutomaton() = default;
  explicit LabeledAutomaton(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  StateId add_state(std::string name, bool accepting = false) {
    auto id = static_cast<StateId>(names_.size());
    names_.push_back(std::move(name));
    accepting_.push_back(accepting);
    index_.resize(index_.size() + alphabet_.size(), -1);
    if (initial_.empty()) initial_.push_back(id);
    return id;
  }
  void set_initial(StateId state) { initial_.assign(1, state); }
  void add_initial(StateId state) { initial_.push_back(state); }
  void set_accepting(StateId state, bool accepting = true) { accepting_.at(state) = accepting; }
  void add_transition(StateId from, LetterId letter, StateId to, Label label) {
    check_state(from);
    check_state(to);
    if (letter >= alphabet_.size()) throw Error(ErrorCode::InvalidArgument, "letter out of range");
    auto& slot = index_[static_cast<std::size_t>(from) * alphabet_.size() + letter];
    if (slot >= 0) duplicate_keys_ = true;
    else slot = static_cast<std::int64_t>(transitions_.size());
    transitions_.push_back({from, letter, to, std::move(label)});
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const {
    for (StateId s = 0; s < names_.size(); ++s) {
      if (names_[s] == name) return s;
    }
    return std::nullopt;
  }
  StateId initial() const { return initial_.empty() ? kNoState : initial_.front(); }
  const std::vector<StateId>& initial_states() const { return initial_; }
  bool is_accepting(StateId s) const { return accepting_.at(s); }
  /// All transitions in insertion order, duplicates included.
  const std::vector<Transition<Label>>& transitions() const { return transitions_; }
  const Transition<Label>* step(StateId from, LetterId letter) const {
    auto slot = index_[static_cast<std::size_t>(from) * alphabet_.size() + letter];
    return slot < 0 ? nullptr : &transitions_[static_cast<std::size_t>(slot)];
  }
  bool is_deterministic() const { return !duplicate_keys_ && initial_.size() == 1; }
  /// Throws Error(NonDeterministic) unless deterministic.
  void require_deterministic(std::string_view what) const {
    if (!is_deterministic()) {
      throw Error(ErrorCode::NonDeterministic,
                  std::string(what) + " is non-deterministic; its analysis is undecidable");
    }
  }

 private:
  void check_state(StateId s) const {
    if (s >= names_.size()) throw Error(ErrorCode::InvalidArgument, "state out of range");
  }

  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<StateId> initial_;
  std::vector<bool> accepting_;
  std::vector<Transition<Label>> transitions_;
  std::vector<std::int64_t> index_;
  bool duplicate_keys_ = false;
};

enum class WordMode : std::uint8_t { Finite, Infinite };

class WeightedAutomaton : public LabeledAutomaton<Weight> {
 public:
  WeightedAutomaton() = default;
  WeightedAutomaton(Alphabet alphabet, ValueFunction fn, WordMode mode)
      : LabeledAutomaton<Weight>(std::move(alphabet)), fn_(std::move(fn)), mode_(mode) {}

  const ValueFunction& value_function() const { return fn_; }
  WordMode word_mode() const { return mode_; }
  /// Throws Error(InvalidArgument) if the value function is not a FinValFn.
  const FinValFn& finval() const;
  InfValFn infval() const;

 private:
  ValueFunction fn_ = FinValFn::sum();
  WordMode mode_ = WordMode::Finite;
};

/// Standard run semantics: PlusInfinity if the run is missing or ends
/// outside the accepting states; Bottom for an accepted empty word.
ExtValue run_weighted_finite(const WeightedAutomaton& wa, const Word& word);

/// Value of a slave launched on the given word under halt-at-accept
/// semantics, or nullopt if the word ends before acceptance. Rejection is
/// reported as PlusInfinity.
std::optional<ExtValue> run_slave(const WeightedAutomaton& slave, const Word& word);

/// Negates every weight and swaps Sup/Inf, LimSup/LimInf, Min/Max.
WeightedAutomaton dualize(const WeightedAutomaton& wa);

/// Min/Max slave to an equivalent BSum slave tracking the extremum in its state.
WeightedAutomaton normalize_slave(const WeightedAutomaton& slave);

/// Any finite-word slave to an equivalent Sum slave. SumPlus takes absolute
/// weights; BSum tracks the clamped partial sum in the state and emits its
/// increments; Min/Max go through normalize_slave first.
WeightedAutomaton to_sum_slave(const WeightedAutomaton& slave);

/// Same graph with a different value function.
WeightedAutomaton with_value_function(const WeightedAutomaton& wa, ValueFunction fn);

struct Issue {
  enum class Severity : std::uint8_t { Error, Warning };
  Severity severity;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const;
  bool has(std::string_view code) const;
  void error(std::string code, std::string message);
  void warning(std::string code, std::string message);
};

/// Checks that a finite-word slave is well-formed: determinism, integer
/// weights, a FinValFn, and (as warnings) transitions leaving accepting states.
void validate_slave(const WeightedAutomaton& slave, const std::string& label,
                    ValidationReport& report);

}  // namespace quanta
