#include "degensink/sinkhorn.hpp"

#include "degensink/measures.hpp"
#include "sinkhorn_detail.hpp"

#include <cmath>
#include <string>

namespace degensink {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

Mat log_of(const Coupling& R) {
  Mat L(R.rows(), R.cols());
  for (Eigen::Index k = 0; k < R.size(); ++k)
    L.reshaped()(k) = R.reshaped()(k) > 0.0 ? std::log(R.reshaped()(k)) : kNegInf;
  return L;
}

// log sum_k exp(x_k), -inf for an empty or all -inf row.
double log_sum_exp(const Eigen::Ref<const Vec>& x) {
  double m = kNegInf;
  for (Eigen::Index k = 0; k < x.size(); ++k) m = std::max(m, x(k));
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += std::exp(x(k) - m);
  return m + std::log(s);
}

Coupling coupling_from(const Coupling& R, const Vec& la, const Vec& lb) {
  Coupling P = Coupling::Zero(R.rows(), R.cols());
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j)
      if (R(i, j) > 0.0 && la(i) > kNegInf && lb(j) > kNegInf)
        P(i, j) = std::exp(std::log(R(i, j)) + la(i) + lb(j));
  return P;
}

bool any_overflow(const Vec& la, const Vec& lb) {
  const double lim = std::log(std::numeric_limits<double>::max());
  return (la.array() > lim).any() || (lb.array() > lim).any();
}

// sum_k l_k (x_k - y_k), skipping coordinates with l = -inf (inactive).
double pairing(const Vec& l, const Vec& x, const Vec& y) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < l.size(); ++k)
    if (l(k) > kNegInf) s += l(k) * (x(k) - y(k));
  return s;
}

}  // namespace

SinkhornState SinkhornState::initial(int n_rows, int n_cols) {
  SinkhornState s;
  s.log_a = Vec::Zero(n_rows);
  s.log_b = Vec::Zero(n_cols);
  s.log_b_prev = Vec::Zero(n_cols);
  return s;
}

Vec SinkhornState::a() const {
  return log_a.unaryExpr([](double x) { return std::exp(x); });
}
Vec SinkhornState::b() const {
  return log_b.unaryExpr([](double x) { return std::exp(x); });
}

SinkhornState sinkhorn_step(const SinkhornState& state, const Coupling& R, const Measure& mu,
                            const Measure& nu) {
  validate_instance(R, mu, nu);
  if (state.log_a.size() != R.rows() || state.log_b.size() != R.cols())
    throw InvalidInput("sinkhorn_step: state does not match R");
  const Mat L = log_of(R);
  SinkhornState next;
  next.iteration = state.iteration + 1;
  next.log_b_prev = state.log_b;
  next.log_a.resize(R.rows());
  next.log_b.resize(R.cols());
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (mu(i) == 0.0) {
      next.log_a(i) = kNegInf;
      continue;
    }
    const double s = log_sum_exp(L.row(i).transpose() + state.log_b);
    if (s == kNegInf)
      throw Assumption1Violated("row " + std::to_string(i) +
                                " has positive mass but no reachable column");
    next.log_a(i) = std::log(mu(i)) - s;
  }
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    if (nu(j) == 0.0) {
      next.log_b(j) = kNegInf;
      continue;
    }
    const double t = log_sum_exp(L.col(j) + next.log_a);
    if (t == kNegInf)
      throw Assumption1Violated("column " + std::to_string(j) +
                                " has positive mass but no reachable row");
    next.log_b(j) = std::log(nu(j)) - t;
  }
  next.overflow_flag = any_overflow(next.log_a, next.log_b);
  return next;
}

Coupling current_P(const SinkhornState& state, const Coupling& R) {
  return coupling_from(R, state.log_a, state.log_b_prev);
}

Coupling current_Q(const SinkhornState& state, const Coupling& R) {
  return coupling_from(R, state.log_a, state.log_b);
}

namespace detail {

double gap_balanced_at(const Coupling& P, const Vec& la, const Vec& lb, const Measure& mu,
                       const Measure& nu) {
  return pairing(la, marginal_row(P), mu) + pairing(lb, marginal_col(P), nu);
}

double gap_unbalanced_at(const Coupling& P, const Vec& la, const Vec& lb, const Measure& mu,
                         const Measure& nu, double lambda) {
  const Measure nuP = marginal_col(P);
  const double h = rel_entropy(nuP, nu);
  if (h == kInf) return kInf;
  double g = pairing(la, marginal_row(P), mu) - total_mass(P.reshaped()) + total_mass(mu) +
             lambda * h;
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if (lb(j) == kNegInf) continue;
    g += lb(j) * nuP(j) + lambda * std::expm1(-lb(j) / lambda) * nu(j);
  }
  return g;
}

}  // namespace detail

double gap_balanced(const SinkhornState& state, const Coupling& R, const Measure& mu,
                    const Measure& nu) {
  return detail::gap_balanced_at(current_P(state, R), state.log_a, state.log_b_prev, mu, nu);
}

double gap_unbalanced(const SinkhornState& state, const Coupling& R, const Measure& mu,
                      const Measure& nu, double lambda) {
  return detail::gap_unbalanced_at(current_P(state, R), state.log_a, state.log_b_prev, mu, nu,
                                   lambda);
}

namespace detail {

SolveReport run_scaling(const Coupling& R, const Measure& mu, const Measure& nu,
                        const StopConfig& cfg, const AfterRowUpdate& hook) {
  validate_instance(R, mu, nu);
  if (!check_assumption1(R, mu, nu))
    throw Assumption1Violated("mu << mu^{R^0} or nu << nu^{R^0} fails");
  const int N = static_cast<int>(R.rows()), M = static_cast<int>(R.cols());
  ScalingEngine eng(R, mu, nu);
  const double z_tol = kZeroTolRel * total_mass(mu);
  std::vector<int> run(static_cast<size_t>(N) * M, 0);

  SolveReport rep;
  Coupling P, Q, P_prev, Q_prev;
  Vec lb_prev = Vec::Zero(M);
  for (long n = 1; n <= cfg.max_iter; ++n) {
    eng.update_a();
    P = eng.coupling();
    if (hook) {
      hook(eng, P);
      P = eng.coupling();
    }
    const Vec la = eng.log_a();
    eng.update_b();
    Q = eng.coupling();
    eng.absorb_if_needed();

    double delta = kNaN;
    if (n >= 2) delta = std::max(tv_distance(P, P_prev), tv_distance(Q, Q_prev));
    double crit = 0.0;
    switch (cfg.mode) {
      case StopMode::IterateDelta: crit = n >= 2 ? delta : kInf; break;
      // P^n misses the column constraint, so the balanced gap can be negative.
      // At n = 1 it vanishes identically (log b^0 = 0, rows exact).
      case StopMode::BalancedGap:
        crit = n >= 2 ? std::abs(gap_balanced_at(P, la, lb_prev, mu, nu)) : kInf;
        break;
      case StopMode::UnbalancedGap:
        crit = std::abs(gap_unbalanced_at(P, la, lb_prev, mu, nu, cfg.lambda));
        break;
    }
    rep.trace.push_back({n, crit, delta});
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < N; ++i) {
        int& r = run[static_cast<size_t>(i) * M + j];
        r = std::max(P(i, j), Q(i, j)) < z_tol ? r + 1 : 0;
      }
    rep.iterations = n;
    lb_prev = eng.log_b();
    P_prev = P;
    Q_prev = Q;
    if (crit <= cfg.epsilon_tol) {
      rep.converged = true;
      break;
    }
  }

  rep.p_star = P;
  rep.q_star = Q;
  rep.r_star = geometric_mean(P, Q);
  rep.z_norm = total_mass(rep.r_star.reshaped());
  rep.r_bar_star = rep.z_norm > 0.0 ? Coupling(rep.r_star / rep.z_norm) : rep.r_star;
  rep.mu_star = marginal_row(Q);
  rep.nu_star = marginal_col(P);
  rep.mu_g = (rep.mu_star.array() * mu.array()).sqrt().matrix();
  rep.nu_g = (rep.nu_star.array() * nu.array()).sqrt().matrix();
  rep.log_a = eng.log_a();
  rep.log_b = eng.log_b();
  rep.support = BipartiteSupport(N, M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < M; ++j)
      rep.support.set(i, j, R(i, j) > 0.0 && run[static_cast<size_t>(i) * M + j] < kZeroRun);
  try {
    rep.classification = classify_exact(R, mu, nu);
  } catch (const DimensionTooLarge&) {
  }
  return rep;
}

}  // namespace detail

SolveReport run_sinkhorn(const Coupling& R, const Measure& mu, const Measure& nu,
                         const StopConfig& cfg) {
  return detail::run_scaling(R, mu, nu, cfg);
}

std::pair<Vec, Vec> potentials_phi_psi(const SolveReport& report, const Measure& mu,
                                       const Measure& nu) {
  Vec phi(mu.size()), psi(nu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    phi(i) = mu(i) > 0.0 ? std::log(report.mu_star(i) / mu(i)) : kNaN;
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    psi(j) = nu(j) > 0.0 ? std::log(report.nu_star(j) / nu(j)) : kNaN;
  return {phi, psi};
}

OptimalityDiagnostics check_optimality(const SolveReport& report, const Coupling& R,
                                       const Measure& mu, const Measure& nu, double tol,
                                       const BipartiteSupport* S) {
  const BipartiteSupport& supp = S ? *S : report.support;
  const Coupling& Ps = report.p_star;
  const Coupling& Qs = report.q_star;
  OptimalityDiagnostics d;
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j) {
      const double pq = report.mu_star(i) > 0.0 ? mu(i) / report.mu_star(i) * Qs(i, j) : 0.0;
      const double qp = report.nu_star(j) > 0.0 ? nu(j) / report.nu_star(j) * Ps(i, j) : 0.0;
      d.p_from_q = std::max(d.p_from_q, std::abs(Ps(i, j) - pq));
      d.q_from_p = std::max(d.q_from_p, std::abs(Qs(i, j) - qp));
    }
  const auto [phi, psi] = potentials_phi_psi(report, mu, nu);
  for (int i = 0; i < static_cast<int>(R.rows()); ++i)
    for (int j = 0; j < static_cast<int>(R.cols()); ++j) {
      if (!(R(i, j) > 0.0) || mu(i) == 0.0 || nu(j) == 0.0) continue;
      const double s = phi(i) + psi(j);
      if (supp(i, j))
        d.on_support = std::max(d.on_support, std::abs(s));
      else
        d.off_support = std::max(d.off_support, -s);
    }
  d.swap_nu = std::abs(rel_entropy(nu, report.nu_star) - rel_entropy(report.mu_star, mu));
  d.swap_mu = std::abs(rel_entropy(mu, report.mu_star) - rel_entropy(report.nu_star, nu));
  auto flag = [&](double v, const char* name) {
    if (!(v <= tol)) {
      d.ok = false;
      d.violations.push_back(std::string(name) + " = " + std::to_string(v));
    }
  };
  flag(d.p_from_q, "p_from_q");
  flag(d.q_from_p, "q_from_p");
  flag(d.on_support, "on_support");
  flag(d.off_support, "off_support");
  flag(d.swap_nu, "swap_nu");
  flag(d.swap_mu, "swap_mu");
  return d;
}

}  // namespace degensink
