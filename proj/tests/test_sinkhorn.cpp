#include "degensink/measures.hpp"
#include "degensink/sinkhorn.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace degensink;
using oracle::mat;
using oracle::vec;

namespace {

SinkhornState steps(int n, const Mat& R, const Vec& mu, const Vec& nu) {
  auto s = SinkhornState::initial(static_cast<int>(R.rows()), static_cast<int>(R.cols()));
  for (int k = 0; k < n; ++k) s = sinkhorn_step(s, R, mu, nu);
  return s;
}

const Mat R_A = oracle::appendix_R();
const Vec mu_A = oracle::appendix_mu();
const Vec nu_A = oracle::appendix_nu();

}  // namespace

TEST(SinkhornStep, FirstSweepOfWorkedExample) {
  const auto s = steps(1, R_A, mu_A, nu_A);
  EXPECT_EQ(s.iteration, 1);
  EXPECT_TRUE(s.a().isApprox(vec({2.0 / 3, 1, 2}), 1e-14));
  EXPECT_TRUE(s.b().isApprox(vec({3, 9.0 / 5, 3.0 / 11}), 1e-14));
  EXPECT_TRUE(current_P(s, R_A).isApprox(mat({{2.0 / 3, 2.0 / 3, 2.0 / 3}, {0, 1, 1}, {0, 0, 2}}),
                                         1e-14));
  EXPECT_TRUE(current_Q(s, R_A).isApprox(
      mat({{2, 6.0 / 5, 2.0 / 11}, {0, 9.0 / 5, 3.0 / 11}, {0, 0, 6.0 / 11}}), 1e-14));
}

TEST(SinkhornStep, FixedPoint) {
  const Mat R = mat({{1, 2}, {3, 0}});
  const auto s = steps(1, R, marginal_row(R), marginal_col(R));
  EXPECT_TRUE(s.a().isApprox(Vec::Ones(2)));
  EXPECT_TRUE(s.b().isApprox(Vec::Ones(2)));
  EXPECT_TRUE(current_P(s, R).isApprox(R));
}

TEST(SinkhornStep, ThirdSweep) {
  const auto s = steps(3, R_A, mu_A, nu_A);
  const Vec a = s.a();
  EXPECT_NEAR(a(0), 0.27, 0.01);
  EXPECT_NEAR(a(1), 0.86, 0.01);
  EXPECT_NEAR(a(2), 17.0, 1.0);
}

TEST(SinkhornStep, MatchesLongDoubleReference) {
  const auto ref = oracle::plain_sinkhorn(R_A, mu_A, nu_A, 60);
  auto s = SinkhornState::initial(3, 3);
  for (int k = 1; k <= 60; ++k) {
    s = sinkhorn_step(s, R_A, mu_A, nu_A);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(s.log_a(i), std::log(static_cast<double>(ref.a[k][i])), 1e-11);
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(s.log_b(j), std::log(static_cast<double>(ref.b[k][j])), 1e-11);
  }
}

TEST(SinkhornStep, ZeroMassRowsKeepZeroPotential) {
  const Mat R = Mat::Ones(3, 2);
  const auto s = steps(2, R, vec({1, 0, 1}), vec({1, 1}));
  EXPECT_EQ(s.a()(1), 0.0);
  EXPECT_EQ(current_P(s, R).row(1).sum(), 0.0);
}

TEST(SinkhornStep, DetectsAssumption1Violation) {
  const auto s = SinkhornState::initial(2, 2);
  EXPECT_THROW(sinkhorn_step(s, mat({{1, 0}, {0, 0}}), vec({1, 1}), vec({1, 1})),
               Assumption1Violated);
}

TEST(Gap, BalancedExamples) {
  const Mat R = mat({{1, 2}, {3, 0}});
  EXPECT_NEAR(gap_balanced(steps(1, R, marginal_row(R), marginal_col(R)), R, marginal_row(R),
                           marginal_col(R)),
              0.0, 1e-14);
  const Mat D = Mat::Identity(2, 2);
  EXPECT_LE(std::abs(gap_balanced(steps(1, D, vec({3, 5}), vec({3, 5})), D, vec({3, 5}),
                                  vec({3, 5}))),
            1e-12);
  // Non-scalable: the gap stays away from zero.
  EXPECT_GT(std::abs(gap_balanced(steps(5, R_A, mu_A, nu_A), R_A, mu_A, nu_A)), 0.1);
}

TEST(Gap, EqualsPrintedFormulaWhenMassesMatch) {
  const auto s = steps(4, R_A, mu_A, nu_A);
  const Mat P = current_P(s, R_A);
  const double closed_form = rel_entropy_coupling(P, R_A) - s.log_a.dot(mu_A) - s.log_b_prev.dot(nu_A);
  EXPECT_NEAR(gap_balanced(s, R_A, mu_A, nu_A), closed_form, 1e-12);
}

TEST(Gap, UnbalancedFixedPointAndLargeLambda) {
  const Mat R = mat({{1, 2}, {3, 0}});
  const auto s = steps(2, R, marginal_row(R), marginal_col(R));
  EXPECT_NEAR(gap_unbalanced(s, R, marginal_row(R), marginal_col(R), 1000.0), 0.0, 1e-14);

  // At a state with nu^P = nu the penalty vanishes and lambda -> infinity
  // recovers the balanced gap.
  const Vec mu = vec({1.0, 2.0}), nu = vec({2.5, 0.5});
  const Mat S = mat({{1, 1}, {1, 0}});
  auto st = steps(200, S, mu, nu);
  EXPECT_NEAR(gap_unbalanced(st, S, mu, nu, 1e9), gap_balanced(st, S, mu, nu), 1e-6);
}

// The lambda = 1000 gap on the worked example dips to about 1.35e-3 and
// then grows as the potentials diverge; it never reaches 1e-3.
TEST(Gap, UnbalancedTraceOnNonScalableExample) {
  auto s = SinkhornState::initial(3, 3);
  double best = kInf;
  long best_at = 0;
  for (long n = 1; n <= 3000; ++n) {
    s = sinkhorn_step(s, R_A, mu_A, nu_A);
    const double g = gap_unbalanced(s, R_A, mu_A, nu_A, 1000.0);
    if (g < best) {
      best = g;
      best_at = n;
    }
  }
  EXPECT_NEAR(best, 1.35e-3, 0.05e-3);
  EXPECT_GT(best, 1e-3);
  EXPECT_GT(best_at, 500);
  EXPECT_GT(gap_unbalanced(s, R_A, mu_A, nu_A, 1000.0), 10 * best);
}

TEST(RunSinkhorn, WorkedExampleLimits) {
  StopConfig cfg;
  cfg.max_iter = 5000;
  const auto rep = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.p_star - oracle::appendix_P_star()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((rep.q_star - oracle::appendix_Q_star()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((rep.r_star - oracle::appendix_R_star()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(rep.mu_star.isApprox(vec({2.5, 2.5, 1}), 1e-6));
  EXPECT_TRUE(rep.nu_star.isApprox(vec({1.6, 2.4, 2}), 1e-6));
  EXPECT_NEAR(rep.z_norm, 2 * std::sqrt(5.0) + std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(total_mass(rep.r_bar_star.reshaped()), 1.0, 1e-12);
}

TEST(RunSinkhorn, ScalableDiagonal) {
  const Mat D = Mat::Identity(3, 3);
  const auto rep = run_sinkhorn(D, vec({1, 2, 3}), vec({1, 2, 3}));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 2);
  EXPECT_TRUE(rep.p_star.isApprox(rep.q_star));
  EXPECT_TRUE(rep.p_star.isApprox(rep.r_star));
}

TEST(RunSinkhorn, LongRunStaysFiniteAndFindsZeros) {
  StopConfig cfg;
  cfg.epsilon_tol = 0.0;
  cfg.max_iter = 20000;
  const auto rep = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  EXPECT_TRUE(rep.p_star.allFinite());
  EXPECT_TRUE(rep.log_a.allFinite());
  EXPECT_GT(rep.log_a.maxCoeff(), 1000.0);  // far outside double range as a potential
  EXPECT_FALSE(rep.support(0, 2));
  EXPECT_FALSE(rep.support(1, 2));
  EXPECT_EQ(rep.support.count(), 4);
}

TEST(RunSinkhorn, GapModesAndNotConverged) {
  StopConfig cfg;
  cfg.mode = StopMode::BalancedGap;
  cfg.epsilon_tol = 1e-10;
  const Mat R = mat({{1, 1}, {1, 1}});
  const auto ok = run_sinkhorn(R, vec({1, 3}), vec({2, 2}), cfg);
  EXPECT_TRUE(ok.converged);
  EXPECT_LE(ok.trace.back().criterion, 1e-10);

  cfg.max_iter = 50;
  const auto bad = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  EXPECT_FALSE(bad.converged);
  EXPECT_EQ(bad.iterations, 50);
  EXPECT_EQ(bad.trace.size(), 50u);
}

TEST(RunSinkhorn, Assumption1) {
  EXPECT_THROW(run_sinkhorn(mat({{1, 0}, {0, 0}}), vec({1, 1}), vec({1, 1})),
               Assumption1Violated);
}

TEST(RunSinkhorn, Invariants) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    auto tr = oracle::random_triple(rng, 5, 6, 0.5);
    StopConfig cfg;
    cfg.epsilon_tol = 1e-12;
    const auto rep = run_sinkhorn(tr.R, tr.mu, tr.nu, cfg);
    EXPECT_LT((marginal_row(rep.p_star) - tr.mu).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((marginal_col(rep.q_star) - tr.nu).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(total_mass(rep.nu_star), total_mass(tr.mu), 1e-9);
    EXPECT_NEAR(total_mass(rep.mu_star), total_mass(tr.nu), 1e-9);
    if (!rep.converged) continue;
    EXPECT_LT((marginal_row(rep.r_star) - rep.mu_g).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((marginal_col(rep.r_star) - rep.nu_g).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Potentials, WorkedExample) {
  StopConfig cfg;
  cfg.epsilon_tol = 1e-13;
  const auto rep = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  const auto [phi, psi] = potentials_phi_psi(rep, mu_A, nu_A);
  EXPECT_NEAR(phi(0), std::log(1.25), 1e-8);
  EXPECT_NEAR(phi(2), std::log(0.5), 1e-8);
  EXPECT_NEAR(psi(1), std::log(0.8), 1e-8);
  EXPECT_NEAR(psi(2), std::log(2.0), 1e-8);
  EXPECT_NEAR(phi(0) + psi(2), std::log(2.5), 1e-8);
}

TEST(CheckOptimality, ConvergedAndTruncated) {
  StopConfig cfg;
  cfg.epsilon_tol = 1e-13;
  const auto rep = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  BipartiteSupport S(3, 3);
  S.set(0, 0, true);
  S.set(0, 1, true);
  S.set(1, 1, true);
  S.set(2, 2, true);
  const auto ok = check_optimality(rep, R_A, mu_A, nu_A, 1e-6, &S);
  EXPECT_TRUE(ok.ok) << (ok.violations.empty() ? "" : ok.violations.front());

  cfg.max_iter = 10;
  const auto early = run_sinkhorn(R_A, mu_A, nu_A, cfg);
  const auto bad = check_optimality(early, R_A, mu_A, nu_A, 1e-6, &S);
  EXPECT_FALSE(bad.ok);
  EXPECT_GT(bad.p_from_q, 1e-6);
}

TEST(CheckOptimality, ScalableIsTrivial) {
  const Mat R = mat({{1, 2}, {2, 1}});
  const auto rep = run_sinkhorn(R, vec({1, 2}), vec({1.5, 1.5}));
  const auto [phi, psi] = potentials_phi_psi(rep, vec({1, 2}), vec({1.5, 1.5}));
  EXPECT_LT(phi.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(psi.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(check_optimality(rep, R, vec({1, 2}), vec({1.5, 1.5}), 1e-6).ok);
}
