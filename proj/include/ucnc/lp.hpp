#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ucnc/rational.hpp"

namespace ucnc {

/// Sparse LP column: (row, coefficient) entries and an objective coefficient.
struct LpColumn {
  std::vector<std::pair<std::size_t, Rational>> entries;
  Rational objective = 0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Rational objective = 0;
  std::vector<Rational> values;  // one per column, including generated ones
  std::vector<Rational> duals;   // one per row at the final basis
  std::size_t iterations = 0;
};

/// Returns a column whose reduced cost under `duals` is positive, or nullopt
/// when none exists.
using ColumnPricer = std::function<std::optional<LpColumn>(std::span<const Rational> duals)>;

class LpIterationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact two-phase revised simplex for
///   maximize c'x  subject to  Ax = b, x >= 0, b >= 0
/// over rationals, with an explicit basis inverse. Single-entry unit columns
/// seed the starting basis; remaining rows get artificials. Dantzig pricing
/// falls back to Bland's rule after a run of degenerate pivots.
class ExactLp {
 public:
  explicit ExactLp(std::vector<Rational> rhs);

  std::size_t add_column(LpColumn column);
  std::size_t column_count() const { return columns_.size(); }
  const LpColumn& column(std::size_t j) const { return columns_.at(j); }

  /// Solves the problem; the pricer, when given, is consulted in phase 2
  /// whenever no stored column improves the objective.
  LpSolution solve(const ColumnPricer& pricer = {}, std::size_t iteration_limit = 200000);

 private:
  std::vector<Rational> rhs_;
  std::vector<LpColumn> columns_;
};

}  // namespace ucnc
