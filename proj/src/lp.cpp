#include "ucnc/lp.hpp"

#include <limits>

namespace ucnc {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kDegenerateRunBeforeBland = 50;

}  // namespace

ExactLp::ExactLp(std::vector<Rational> rhs) : rhs_(std::move(rhs)) {
  for (const auto& b : rhs_) {
    if (sgn(b) < 0) throw std::invalid_argument("LP right-hand side must be nonnegative");
  }
}

std::size_t ExactLp::add_column(LpColumn column) {
  for (const auto& [row, value] : column.entries) {
    if (row >= rhs_.size()) throw std::out_of_range("LP column references a missing row");
  }
  columns_.push_back(std::move(column));
  return columns_.size() - 1;
}

LpSolution ExactLp::solve(const ColumnPricer& pricer, std::size_t iteration_limit) {
  const std::size_t m = rhs_.size();
  const std::size_t user_columns = columns_.size();
  std::vector<LpColumn> cols = columns_;
  std::vector<bool> artificial(cols.size(), false);

  std::vector<std::size_t> basis(m, kNone);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& entries = cols[j].entries;
    if (entries.size() == 1 && entries[0].second == 1 && basis[entries[0].first] == kNone) {
      basis[entries[0].first] = j;
    }
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] != kNone) continue;
    cols.push_back(LpColumn{{{r, Rational(1)}}, 0});
    artificial.push_back(true);
    basis[r] = cols.size() - 1;
  }

  std::vector<std::vector<Rational>> binv(m, std::vector<Rational>(m, 0));
  for (std::size_t r = 0; r < m; ++r) binv[r][r] = 1;
  std::vector<Rational> xb = rhs_;
  std::vector<bool> in_basis(cols.size(), false);
  for (std::size_t j : basis) in_basis[j] = true;

  LpSolution solution;
  std::vector<Rational> y(m);

  auto cost = [&](std::size_t j, int phase) -> Rational {
    if (phase == 1) return artificial[j] ? Rational(-1) : Rational(0);
    return artificial[j] ? Rational(0) : cols[j].objective;
  };

  auto compute_duals = [&](int phase) {
    for (std::size_t k = 0; k < m; ++k) y[k] = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const Rational c = cost(basis[r], phase);
      if (sgn(c) == 0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (sgn(binv[r][k]) != 0) y[k] += c * binv[r][k];
      }
    }
  };

  auto reduced_cost = [&](const LpColumn& column, const Rational& c) {
    Rational d = c;
    for (const auto& [row, value] : column.entries) d -= y[row] * value;
    return d;
  };

  // Runs one phase; returns false when the phase is unbounded.
  auto run_phase = [&](int phase) -> bool {
    std::size_t degenerate_run = 0;
    while (true) {
      if (solution.iterations++ >= iteration_limit) throw LpIterationLimit("simplex iteration limit reached");
      compute_duals(phase);
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      std::size_t entering = kNone;
      Rational best = 0;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (in_basis[j] || (artificial[j] && phase == 2)) continue;
        const Rational d = reduced_cost(cols[j], cost(j, phase));
        if (sgn(d) <= 0) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (entering == kNone || d > best) {
          entering = j;
          best = d;
        }
      }
      if (entering == kNone && phase == 2 && pricer) {
        if (auto generated = pricer(y)) {
          if (sgn(reduced_cost(*generated, generated->objective)) <= 0) {
            throw std::logic_error("column pricer returned a non-improving column");
          }
          cols.push_back(*generated);
          artificial.push_back(false);
          in_basis.push_back(false);
          columns_.push_back(std::move(*generated));
          entering = cols.size() - 1;
        }
      }
      if (entering == kNone) return true;

      std::vector<Rational> alpha(m, 0);
      for (const auto& [row, value] : cols[entering].entries) {
        for (std::size_t r = 0; r < m; ++r) {
          if (sgn(binv[r][row]) != 0) alpha[r] += binv[r][row] * value;
        }
      }

      std::size_t leave = kNone;
      Rational ratio = 0;
      for (std::size_t r = 0; r < m; ++r) {
        Rational candidate;
        if (phase == 2 && artificial[basis[r]]) {
          if (sgn(alpha[r]) == 0) continue;
          candidate = 0;
        } else {
          if (sgn(alpha[r]) <= 0) continue;
          candidate = xb[r] / alpha[r];
        }
        if (leave == kNone || candidate < ratio || (candidate == ratio && basis[r] < basis[leave])) {
          leave = r;
          ratio = candidate;
        }
      }
      if (leave == kNone) return false;
      degenerate_run = sgn(ratio) == 0 ? degenerate_run + 1 : 0;

      const Rational pivot = alpha[leave];
      for (std::size_t k = 0; k < m; ++k) {
        if (sgn(binv[leave][k]) != 0) binv[leave][k] /= pivot;
      }
      xb[leave] = ratio;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == leave || sgn(alpha[r]) == 0) continue;
        const Rational factor = alpha[r];
        for (std::size_t k = 0; k < m; ++k) {
          if (sgn(binv[leave][k]) != 0) binv[r][k] -= factor * binv[leave][k];
        }
        xb[r] -= factor * ratio;
      }
      in_basis[basis[leave]] = false;
      basis[leave] = entering;
      in_basis[entering] = true;
    }
  };

  bool needs_phase_one = false;
  for (std::size_t r = 0; r < m; ++r) {
    if (artificial[basis[r]] && sgn(xb[r]) > 0) needs_phase_one = true;
  }
  if (needs_phase_one) {
    run_phase(1);
    for (std::size_t r = 0; r < m; ++r) {
      if (artificial[basis[r]] && sgn(xb[r]) > 0) {
        solution.status = LpStatus::kInfeasible;
        return solution;
      }
    }
  }

  const bool bounded = run_phase(2);
  solution.status = bounded ? LpStatus::kOptimal : LpStatus::kUnbounded;

  const std::size_t stored = columns_.size();
  solution.values.assign(stored, 0);
  // Generated columns sit after the artificials in the working list.
  std::vector<std::size_t> stored_index(cols.size(), kNone);
  std::size_t next_generated = user_columns;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j < user_columns) {
      stored_index[j] = j;
    } else if (!artificial[j]) {
      stored_index[j] = next_generated++;
    }
  }
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t j = basis[r];
    if (!artificial[j]) solution.values[stored_index[j]] = xb[r];
  }
  for (std::size_t j = 0; j < stored; ++j) solution.objective += columns_[j].objective * solution.values[j];
  compute_duals(2);
  solution.duals = y;
  return solution;
}

}  // namespace ucnc
