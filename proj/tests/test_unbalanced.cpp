#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"
#include "degensink/sinkhorn.hpp"
#include "degensink/unbalanced.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace degensink;
using oracle::mat;
using oracle::vec;

namespace {
const Mat R_A = oracle::appendix_R();
const Vec mu_A = oracle::appendix_mu();
const Vec nu_A = oracle::appendix_nu();

PenaltyConfig one_sided(double lambda) {
  PenaltyConfig c;
  c.lambda = lambda;
  c.sides = PenaltySides::SecondMarginalOnly;
  c.epsilon_tol = 1e-12;
  return c;
}

PenaltyConfig two_sided(double lambda) {
  PenaltyConfig c;
  c.lambda = lambda;
  c.sides = PenaltySides::BothMarginals;
  c.epsilon_tol = 1e-10;
  return c;
}
}  // namespace

TEST(SchuLambda, LargeLambdaRecoversBalancedSolution) {
  const Mat R = mat({{1, 2, 0}, {1, 1, 1}, {0, 3, 1}});
  const Vec mu = vec({1, 2, 1}), nu = vec({1.5, 1.5, 1});
  auto c = one_sided(1e5);
  c.epsilon_tol = 1e-8;
  const auto res = solve_schu_lambda(R, mu, nu, c);
  ASSERT_TRUE(res.converged);
  StopConfig cfg;
  cfg.epsilon_tol = 1e-13;
  const auto ref = run_sinkhorn(R, mu, nu, cfg);
  EXPECT_LT((res.coupling - ref.p_star).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(SchuLambda, TinyLambdaIsFirstMarginalProjection) {
  const auto res = solve_schu_lambda(R_A, mu_A, nu_A, one_sided(1e-9));
  ASSERT_TRUE(res.converged);
  EXPECT_LT((res.coupling - project_first_marginal(R_A, mu_A)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SchuLambda, WorkedExampleKeepsFirstMarginal) {
  auto c = one_sided(1000.0);
  c.epsilon_tol = 1e-10;
  const auto res = solve_schu_lambda(R_A, mu_A, nu_A, c);
  ASSERT_TRUE(res.converged);
  EXPECT_LT((marginal_row(res.coupling) - mu_A).cwiseAbs().maxCoeff(), 1e-12);
  // Row 3 only reaches column 3, so nu^P_3 >= 2 = 2 nu_3 and H >= 2 log 2 - 1.
  const double h = rel_entropy(marginal_col(res.coupling), nu_A);
  EXPECT_GT(h, 2 * std::log(2.0) - 1);
  EXPECT_LT(h, 1.0);
  EXPECT_LT(res.residual, 1e-6);
}

TEST(SchuLambda, RejectsWrongSides) {
  EXPECT_THROW(solve_schu_lambda(R_A, mu_A, nu_A, two_sided(10)), InvalidInput);
  EXPECT_THROW(solve_two_sided(R_A, mu_A, nu_A, one_sided(10)), InvalidInput);
}

TEST(TwoSided, ApproachesGeometricMeanLimit) {
  const Mat Rs = oracle::appendix_R_star();
  double prev = kInf;
  for (double lam : {10.0, 100.0, 1e3, 1e4}) {
    const auto res = solve_two_sided(R_A, mu_A, nu_A, two_sided(lam));
    ASSERT_TRUE(res.converged) << lam;
    const double tv = tv_distance(res.coupling, Rs);
    EXPECT_LT(tv, prev);
    prev = tv;
    // A TV stop of 1e-10 leaves the potentials about lambda * 1e-10 from the fixed point.
    EXPECT_LT(res.residual, 1e-5);
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(TwoSided, NormalizedOutputAndMarginals) {
  const auto res = solve_two_sided(R_A, mu_A, nu_A, two_sided(1e4));
  const Mat Rs = oracle::appendix_R_star();
  const double Z = 2 * std::sqrt(5.0) + std::sqrt(2.0);
  const Mat normalized = res.coupling / total_mass(res.coupling.reshaped());
  EXPECT_LT(tv_distance(normalized, Rs / Z), 1e-2);
  // Marginals approach mu^g = sqrt(mu* mu), nu^g = sqrt(nu* nu).
  const Vec mu_g = (vec({2.5, 2.5, 1}).array() * mu_A.array()).sqrt();
  const Vec nu_g = (vec({1.6, 2.4, 2}).array() * nu_A.array()).sqrt();
  EXPECT_LT((marginal_row(res.coupling) - mu_g).cwiseAbs().maxCoeff(), 1e-2);
  EXPECT_LT((marginal_col(res.coupling) - nu_g).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(TwoSided, FeasibleReferenceIsFixed) {
  const Mat R = mat({{1, 2}, {0.5, 1}});
  for (double lam : {1.0, 10.0, 1000.0}) {
    const auto res = solve_two_sided(R, marginal_row(R), marginal_col(R), two_sided(lam));
    EXPECT_LT((res.coupling - R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TwoSided, ObjectiveNonincreasing) {
  auto cfg = two_sided(50.0);
  cfg.record_objective = true;
  const auto res = solve_two_sided(R_A, mu_A, nu_A, cfg);
  ASSERT_GT(res.objective_trace.size(), 10u);
  for (size_t k = 1; k < res.objective_trace.size(); ++k)
    EXPECT_LE(res.objective_trace[k] - res.objective_trace[k - 1], 1e-10);
  EXPECT_NEAR(res.objective_trace.back(), two_sided_objective(res.coupling, R_A, mu_A, nu_A, 50),
              1e-12);
}

TEST(EpsilonFill, Definition) {
  const Mat F = epsilon_fill(R_A, 1e-3);
  EXPECT_DOUBLE_EQ(F(1, 0), 1e-3);
  EXPECT_DOUBLE_EQ(F(2, 1), 1e-3);
  EXPECT_DOUBLE_EQ(F(0, 2), 1.0);
  EXPECT_TRUE((F.array() >= R_A.array()).all());
  const Mat P = mat({{1, 2}, {3, 4}});
  EXPECT_TRUE(epsilon_fill(P, 0.5).isApprox(P));
  EXPECT_EQ(classify_exact(F, mu_A, nu_A).tag, ScalabilityTag::Scalable);
  EXPECT_THROW(epsilon_fill(R_A, 0.0), InvalidInput);
}

TEST(Sweeps, LambdaAndEpsilonOnWorkedExample) {
  const Mat Rs = oracle::appendix_R_star();
  const auto lam = sweep_lambda(R_A, mu_A, nu_A, Rs, {1e3, 1.0, 100.0, 10.0});
  ASSERT_EQ(lam.size(), 4u);
  EXPECT_DOUBLE_EQ(lam.front().lambda, 1.0);
  for (size_t k = 1; k < lam.size(); ++k) EXPECT_LT(lam[k].tv, lam[k - 1].tv);

  const auto eps = sweep_epsilon(R_A, mu_A, nu_A, Rs, {1e-2, 1e-1, 1e-3});
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_DOUBLE_EQ(eps.front().epsilon, 1e-3);
  for (const auto& row : eps) EXPECT_GE(row.tv, 0.1);
  // Smaller eps, slower convergence.
  EXPECT_GT(eps.front().iterations, eps.back().iterations);
}

TEST(Sweeps, ScalableInstanceHasNoGap) {
  const Mat R = mat({{1, 2}, {2, 1}});
  const Vec mu = vec({1, 2}), nu = vec({1.5, 1.5});
  StopConfig cfg;
  cfg.epsilon_tol = 1e-13;
  const auto ref = run_sinkhorn(R, mu, nu, cfg);
  const auto lam = sweep_lambda(R, mu, nu, ref.r_star, {1e3, 1e4});
  EXPECT_LT(lam.back().tv, 1e-3);
  const auto eps = sweep_epsilon(R, mu, nu, ref.r_star, {1e-3});
  EXPECT_LT(eps.front().tv, 1e-9);
}
