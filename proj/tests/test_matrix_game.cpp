#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

double duality_gap(const Eigen::MatrixXd& a, const game_solution& s) {
  Eigen::Map<const Eigen::VectorXd> p(s.row_strategy.data(), a.rows()), q(s.col_strategy.data(), a.cols());
  return (a * q).maxCoeff() - (a.transpose() * p).minCoeff();
}

void expect_distribution(const std::vector<double>& d) {
  double sum = 0.0;
  for (double x : d) {
    EXPECT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

Eigen::MatrixXd random_matrix(oracle::rng& r, Eigen::Index m, Eigen::Index n) {
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = oracle::uniform(r, -5.0, 5.0);
  return a;
}

}  // namespace

TEST(MatrixGame, SingleEntry) {
  Eigen::MatrixXd a(1, 1);
  a << 3.5;
  auto s = solve_zero_sum(a);
  EXPECT_EQ(s.value, 3.5);
  EXPECT_EQ(s.row_strategy, std::vector<double>{1.0});
  EXPECT_EQ(s.col_strategy, std::vector<double>{1.0});
}

TEST(MatrixGame, MatchingPennies) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 1;
  auto s = solve_zero_sum(a);
  EXPECT_NEAR(s.value, 0.5, 1e-12);
  EXPECT_NEAR(s.row_strategy[0], 0.5, 1e-12);
  EXPECT_NEAR(s.col_strategy[0], 0.5, 1e-12);
}

TEST(MatrixGame, DominatedRowGivesPureSolution) {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 0, 0;
  auto s = solve_zero_sum(a);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_EQ(s.row_strategy, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(s.col_strategy, (std::vector<double>{0.0, 1.0}));
}

TEST(MatrixGame, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(solve_zero_sum(Eigen::MatrixXd(0, 2)), format_error);
  Eigen::MatrixXd a(1, 1);
  a << std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve_zero_sum(a), format_error);
}

TEST(MatrixGame, TwoByTwoAgainstClosedFormAndGrid) {
  oracle::rng r(31);
  for (int k = 0; k < 300; ++k) {
    auto a = random_matrix(r, 2, 2);
    auto s = solve_zero_sum(a);
    EXPECT_NEAR(s.value, oracle::closed_form_2x2(a), 1e-9);
    EXPECT_NEAR(s.value, oracle::grid_search_2xn(a), 2e-3);
    EXPECT_LE(duality_gap(a, s), 1e-8);
    expect_distribution(s.row_strategy);
    expect_distribution(s.col_strategy);
  }
}

TEST(MatrixGame, RectangularAgainstSupportEnumeration) {
  oracle::rng r(37);
  for (int k = 0; k < 300; ++k) {
    auto m = static_cast<Eigen::Index>(oracle::pick(r, 1, 4)), n = static_cast<Eigen::Index>(oracle::pick(r, 1, 4));
    auto a = random_matrix(r, m, n);
    auto s = solve_zero_sum(a);
    EXPECT_NEAR(s.value, oracle::support_enumeration(a), 1e-8);
    EXPECT_LE(duality_gap(a, s), 1e-8);
  }
}

TEST(MatrixGame, InvariantUnderShiftAndScale) {
  oracle::rng r(41);
  for (int k = 0; k < 100; ++k) {
    auto a = random_matrix(r, 3, 3);
    double v = solve_zero_sum(a).value;
    EXPECT_NEAR(solve_zero_sum((2.0 * a).array() + 7.0).value, 2.0 * v + 7.0, 1e-9);
    EXPECT_NEAR(solve_zero_sum(-a.transpose()).value, -v, 1e-9);
  }
}

TEST(MatrixGame, DegenerateTiesStillSolve) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = 1, a(1, 1) = 1, a(2, 2) = 1;
  auto s = solve_zero_sum(a);
  EXPECT_NEAR(s.value, 1.0 / 3.0, 1e-12);
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(3, 4, 2.0);
  EXPECT_EQ(solve_zero_sum(b).value, 2.0);
}
