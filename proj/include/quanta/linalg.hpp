#pragma once

#include <map>
#include <vector>

#include "quanta/rational.hpp"

namespace quanta {

/// Sparse square system A·X = B with several right-hand sides, solved by
/// exact elimination. Rows are maps from column to coefficient.
struct SparseSystem {
  std::vector<std::map<std::size_t, Rational>> rows;
  std::vector<std::vector<Rational>> rhs;  // rhs[row][column]
  std::size_t columns = 0;                 // number of right-hand sides

  explicit SparseSystem(std::size_t n, std::size_t rhs_columns = 1);
  std::size_t size() const { return rows.size(); }
  void add(std::size_t row, std::size_t col, const Rational& value);
};

/// Returns X[variable][column]. Pivots are chosen per column among rows with
/// the fewest non-zeros, ties broken by the smallest numerator·denominator
/// bit size, then row index. The solution is substituted back and checked for
/// a zero residual. Throws Error(SingularSystem).
std::vector<std::vector<Rational>> solve(const SparseSystem& system);

}  // namespace quanta
