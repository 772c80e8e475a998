#include "quanta/linalg.hpp"

#include <limits>

#include "quanta/error.hpp"

namespace quanta {

SparseSystem::SparseSystem(std::size_t n, std::size_t rhs_columns)
    : rows(n), rhs(n, std::vector<Rational>(rhs_columns)), columns(rhs_columns) {}

void SparseSystem::add(std::size_t row, std::size_t col, const Rational& value) {
  if (value == 0) return;
  auto& slot = rows.at(row)[col];
  slot += value;
  if (slot == 0) rows[row].erase(col);
}

namespace {

std::size_t bit_size(const Rational& r) {
  return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

}  // namespace

std::vector<std::vector<Rational>> solve(const SparseSystem& system) {
  const std::size_t n = system.size();
  auto rows = system.rows;
  auto rhs = system.rhs;
  // Column -> rows currently holding a non-zero there (among unused rows).
  std::vector<std::map<std::size_t, bool>> col_rows(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& [c, v] : rows[r]) {
      if (c >= n) throw Error(ErrorCode::InvalidArgument, "column out of range");
      col_rows[c][r] = true;
    }
  }
  std::vector<bool> used(n, false);
  std::vector<std::size_t> pivot_row(n, n);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    std::size_t best_nnz = std::numeric_limits<std::size_t>::max();
    std::size_t best_bits = std::numeric_limits<std::size_t>::max();
    for (const auto& [r, unused] : col_rows[col]) {
      if (used[r]) continue;
      std::size_t nnz = rows[r].size();
      std::size_t bits = bit_size(rows[r].at(col));
      if (nnz < best_nnz || (nnz == best_nnz && bits < best_bits)) {
        best = r;
        best_nnz = nnz;
        best_bits = bits;
      }
    }
    if (best == n) throw Error(ErrorCode::SingularSystem, "linear system is singular");
    used[best] = true;
    pivot_row[col] = best;
    Rational inv = 1 / rows[best].at(col);
    for (auto& [c, v] : rows[best]) v *= inv;
    for (auto& v : rhs[best]) v *= inv;

    std::vector<std::size_t> targets;
    for (const auto& [r, unused] : col_rows[col]) {
      if (r != best && !used[r]) targets.push_back(r);
    }
    for (std::size_t r : targets) {
      Rational factor = rows[r].at(col);
      for (const auto& [c, v] : rows[best]) {
        auto& slot = rows[r][c];
        bool was_zero = slot == 0;
        slot -= factor * v;
        if (slot == 0) {
          rows[r].erase(c);
          col_rows[c].erase(r);
        } else if (was_zero) {
          col_rows[c][r] = true;
        }
      }
      for (std::size_t k = 0; k < rhs[r].size(); ++k) rhs[r][k] -= factor * rhs[best][k];
    }
  }

  // Back substitution in reverse pivot order; pivot rows are upper-triangular
  // with respect to later columns only after elimination, so resolve lazily.
  std::vector<std::vector<Rational>> x(n, std::vector<Rational>(system.columns));
  std::vector<bool> known(n, false);
  for (std::size_t col = n; col-- > 0;) {
    std::size_t r = pivot_row[col];
    for (std::size_t k = 0; k < system.columns; ++k) {
      Rational value = rhs[r][k];
      for (const auto& [c, v] : rows[r]) {
        if (c == col) continue;
        if (!known[c]) throw Error(ErrorCode::SingularSystem, "elimination order violated");
        value -= v * x[c][k];
      }
      x[col][k] = value;
    }
    known[col] = true;
  }

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < system.columns; ++k) {
      Rational lhs;
      for (const auto& [c, v] : system.rows[r]) lhs += v * x[c][k];
      if (lhs != system.rhs[r][k]) throw Error(ErrorCode::SingularSystem, "non-zero residual");
    }
  }
  return x;
}

}  // namespace quanta
