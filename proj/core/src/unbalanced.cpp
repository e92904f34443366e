#include "degensink/unbalanced.hpp"

#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"
#include "degensink/sinkhorn.hpp"
#include "scaling_engine.hpp"
#include "sinkhorn_detail.hpp"

#include <algorithm>
#include <cmath>

namespace degensink {

namespace {

// max_k |l_k / lambda + log(x_k / y_k)| over the active coordinates.
double stationarity(const Vec& l, const Vec& x, const Vec& y, double lambda) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < l.size(); ++k) {
    if (y(k) == 0.0) continue;
    r = std::max(r, std::abs(l(k) / lambda + std::log(x(k) / y(k))));
  }
  return r;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInput("lambda must be positive and finite");
}

}  // namespace

PenalizedResult solve_schu_lambda(const Coupling& R, const Measure& mu, const Measure& nu,
                                  const PenaltyConfig& cfg) {
  validate_instance(R, mu, nu);
  if (cfg.sides != PenaltySides::SecondMarginalOnly)
    throw InvalidInput("solve_schu_lambda penalizes the second marginal only");
  check_lambda(cfg.lambda);
  if (!check_assumption1(R, mu, nu))
    throw Assumption1Violated("mu << mu^{R^0} or nu << nu^{R^0} fails");
  detail::ScalingEngine eng(R, mu, nu);
  eng.set_exponents(1.0, cfg.lambda / (1.0 + cfg.lambda));
  PenalizedResult res;
  Vec lb_prev = Vec::Zero(R.cols());
  Coupling P;
  for (long n = 1; n <= cfg.max_iter; ++n) {
    eng.update_a();
    P = eng.coupling();
    const double gap =
        detail::gap_unbalanced_at(P, eng.log_a(), lb_prev, mu, nu, cfg.lambda);
    res.iterations = n;
    if (cfg.record_objective)
      res.objective_trace.push_back(rel_entropy_coupling(P, R) +
                                    cfg.lambda * rel_entropy(marginal_col(P), nu));
    if (gap <= cfg.epsilon_tol) {
      res.converged = true;
      break;
    }
    eng.update_b();
    eng.absorb_if_needed();
    lb_prev = eng.log_b();
  }
  res.coupling = P;
  res.log_a = eng.log_a();
  res.log_b = lb_prev;
  res.residual = stationarity(res.log_b, marginal_col(P), nu, cfg.lambda);
  return res;
}

double two_sided_objective(const Coupling& P, const Coupling& R, const Measure& mu,
                           const Measure& nu, double lambda) {
  return rel_entropy_coupling(P, R) / lambda + rel_entropy(marginal_row(P), mu) +
         rel_entropy(marginal_col(P), nu);
}

PenalizedResult solve_two_sided(const Coupling& R, const Measure& mu, const Measure& nu,
                                const PenaltyConfig& cfg) {
  validate_instance(R, mu, nu);
  if (cfg.sides != PenaltySides::BothMarginals)
    throw InvalidInput("solve_two_sided penalizes both marginals");
  check_lambda(cfg.lambda);
  if (!check_assumption1(R, mu, nu))
    throw Assumption1Violated("mu << mu^{R^0} or nu << nu^{R^0} fails");
  detail::ScalingEngine eng(R, mu, nu);
  const double kappa = cfg.lambda / (1.0 + cfg.lambda);
  eng.set_exponents(kappa, kappa);
  PenalizedResult res;
  Coupling P, P_prev;
  for (long n = 1; n <= cfg.max_iter; ++n) {
    eng.update_a();
    eng.update_b();
    eng.absorb_if_needed();
    P = eng.coupling();
    res.iterations = n;
    if (cfg.record_objective)
      res.objective_trace.push_back(two_sided_objective(P, R, mu, nu, cfg.lambda));
    if (n >= 2 && tv_distance(P, P_prev) <= cfg.epsilon_tol) {
      res.converged = true;
      break;
    }
    P_prev = P;
  }
  res.coupling = P;
  res.log_a = eng.log_a();
  res.log_b = eng.log_b();
  res.residual = std::max(stationarity(res.log_a, marginal_row(P), mu, cfg.lambda),
                          stationarity(res.log_b, marginal_col(P), nu, cfg.lambda));
  return res;
}

Coupling epsilon_fill(const Coupling& R, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("epsilon_fill: eps must be > 0");
  validate_coupling(R, "R");
  return (R.array() == 0.0).select(Coupling::Constant(R.rows(), R.cols(), eps), R);
}

std::vector<LambdaRow> sweep_lambda(const Coupling& R, const Measure& mu, const Measure& nu,
                                    const Coupling& r_star, const std::vector<double>& lambdas,
                                    double tol) {
  std::vector<double> grid = lambdas;
  std::ranges::sort(grid);
  std::vector<LambdaRow> rows;
  for (double lam : grid) {
    PenaltyConfig c;
    c.lambda = lam;
    c.sides = PenaltySides::BothMarginals;
    c.epsilon_tol = tol;
    const auto res = solve_two_sided(R, mu, nu, c);
    rows.push_back({lam, tv_distance(res.coupling, r_star), res.iterations, res.converged});
  }
  return rows;
}

std::vector<EpsilonRow> sweep_epsilon(const Coupling& R, const Measure& mu, const Measure& nu,
                                      const Coupling& r_star, const std::vector<double>& epsilons,
                                      double tol) {
  std::vector<double> grid = epsilons;
  std::ranges::sort(grid);
  std::vector<EpsilonRow> rows;
  for (double eps : grid) {
    StopConfig c;
    c.epsilon_tol = tol;
    c.max_iter = 10000000;
    const auto rep = run_sinkhorn(epsilon_fill(R, eps), mu, nu, c);
    rows.push_back({eps, tv_distance(rep.p_star, r_star), rep.iterations, rep.converged});
  }
  return rows;
}

}  // namespace degensink
