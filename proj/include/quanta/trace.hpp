#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "quanta/rational.hpp"

namespace quanta {

/// A value assigned to an activation position, produced at some step.
struct Completion {
  std::size_t position;
  std::size_t step;
  ExtValue value;
};

enum class Death : std::uint8_t { None, MasterStuck, SlaveRejected, InstructionError };

struct StepEvents {
  std::vector<Completion> completed;
  Death death = Death::None;
  /// Launch position of the rejecting slave, or the misused counter.
  std::size_t detail = 0;
};

/// Outcome of running a finite prefix. Completions produced at the step
/// where the run dies are discarded.
struct PrefixTrace {
  std::vector<Completion> completed;
  std::vector<std::size_t> pending;
  Death death = Death::None;
  std::optional<std::size_t> death_step;
  std::size_t death_detail = 0;
  std::size_t max_active = 0;
};

}  // namespace quanta
