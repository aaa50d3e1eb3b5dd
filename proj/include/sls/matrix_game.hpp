#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "sls/error.hpp"

namespace sls {

/// Value and optimal mixed strategies of a zero-sum matrix game in which the
/// row player maximizes and the column player minimizes.
struct game_solution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
};

namespace detail {

inline void normalize(std::vector<double>& p) {
  double sum = 0;
  for (double& x : p) {
    if (x < 0) x = 0;
    sum += x;
  }
  for (double& x : p) x /= sum;
}

// Pure saddle point, if one exists: the lowest-index row whose minimum equals
// the lower value, against the lowest-index column attaining that minimum.
inline bool pure_saddle(const Eigen::MatrixXd& a, game_solution& out) {
  const Eigen::Index m = a.rows(), k = a.cols();
  Eigen::Index best_row = 0;
  double lower = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    double row_min = a.row(i).minCoeff();
    if (row_min > lower) lower = row_min, best_row = i;
  }
  Eigen::Index best_col = 0;
  double upper = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k; ++j) {
    double col_max = a.col(j).maxCoeff();
    if (col_max < upper) upper = col_max, best_col = j;
  }
  if (lower != upper) return false;
  out.value = lower;
  out.row_strategy.assign(static_cast<std::size_t>(m), 0.0);
  out.col_strategy.assign(static_cast<std::size_t>(k), 0.0);
  out.row_strategy[static_cast<std::size_t>(best_row)] = 1.0;
  out.col_strategy[static_cast<std::size_t>(best_col)] = 1.0;
  return true;
}

}  // namespace detail

/// Solves the game by the classical LP: shift the payoff to B = A + c with
/// c = 1 - min A, maximize sum(y) subject to B y <= 1, y >= 0 using a dense
/// tableau simplex with Bland's rule. The column strategy is y / sum(y), the
/// row strategy comes from the constraint duals, and value = 1/sum(y) - c.
inline game_solution solve_zero_sum(const Eigen::MatrixXd& payoff) {
  const Eigen::Index m = payoff.rows(), k = payoff.cols();
  if (m < 1 || k < 1) throw format_error("matrix game needs at least one row and one column");
  if (!payoff.allFinite()) throw format_error("matrix game with non-finite payoff");

  game_solution sol;
  if (detail::pure_saddle(payoff, sol)) return sol;

  const double shift = 1.0 - payoff.minCoeff();
  const Eigen::Index cols = k + m;
  Eigen::MatrixXd t(m, cols);
  t.leftCols(k) = payoff.array() + shift;
  t.rightCols(m).setIdentity();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd reduced(cols);
  reduced.head(k).setOnes();
  reduced.tail(m).setZero();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = k + i;

  const double eps = 1e-12 * std::max(1.0, t.leftCols(k).cwiseAbs().maxCoeff());
  const int cap = 100 * static_cast<int>(cols) + 1000;
  int iter = 0;
  for (;; ++iter) {
    if (iter >= cap) throw numerical_failure("simplex did not converge within the iteration cap");
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (reduced[j] > eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= eps) continue;
      double ratio = rhs[i] / t(i, enter);
      if (ratio < best - 1e-15 ||
          (ratio <= best + 1e-15 && leave >= 0 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        if (ratio < best) best = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw numerical_failure("unbounded simplex step in a matrix game");
    const double piv = t(leave, enter);
    t.row(leave) /= piv;
    rhs[leave] /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      double f = t(i, enter);
      if (f == 0.0) continue;
      t.row(i) -= f * t.row(leave);
      rhs[i] -= f * rhs[leave];
    }
    double f = reduced[enter];
    reduced -= f * t.row(leave).transpose();
    reduced[enter] = 0.0;
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  sol.col_strategy.assign(static_cast<std::size_t>(k), 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < k) sol.col_strategy[static_cast<std::size_t>(b)] = std::max(0.0, rhs[i]);
  }
  for (double y : sol.col_strategy) total += y;
  if (!(total > 0.0) || !std::isfinite(total)) throw numerical_failure("degenerate simplex solution");
  sol.row_strategy.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) sol.row_strategy[static_cast<std::size_t>(i)] = -reduced[k + i];
  detail::normalize(sol.col_strategy);
  detail::normalize(sol.row_strategy);

  // Report the value the strategies guarantee, clamped into the saddle band.
  Eigen::Map<const Eigen::VectorXd> p(sol.row_strategy.data(), m), q(sol.col_strategy.data(), k);
  double lower = (p.transpose() * payoff).minCoeff();
  double upper = (payoff * q).maxCoeff();
  sol.value = std::clamp(1.0 / total - shift, lower, upper);
  return sol;
}

}  // namespace sls
