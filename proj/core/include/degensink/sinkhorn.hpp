#pragma once

#include "degensink/scalability.hpp"
#include "degensink/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace degensink {

enum class StopMode { BalancedGap, UnbalancedGap, IterateDelta };

struct StopConfig {
  double epsilon_tol = 1e-10;
  double lambda = 1000.0;
  long max_iter = 100000;
  StopMode mode = StopMode::IterateDelta;
};

// Potentials are stored as logarithms: on non-scalable problems some of them
// leave the range of double long before the couplings stop moving.
struct SinkhornState {
  Vec log_a;       // a^n
  Vec log_b;       // b^n
  Vec log_b_prev;  // b^{n-1}, the one P^n is built from
  long iteration = 0;
  double last_gap = std::numeric_limits<double>::quiet_NaN();
  bool overflow_flag = false;

  static SinkhornState initial(int n_rows, int n_cols);

  // exp of the log potentials; entries may be 0 or inf.
  Vec a() const;
  Vec b() const;
};

// One full sweep of the potential-form iteration: a from the current b, then
// b from the new a. Rows with mu_i = 0 keep a_i = 0, likewise for columns.
SinkhornState sinkhorn_step(const SinkhornState& state, const Coupling& R, const Measure& mu,
                            const Measure& nu);

// P^n = a^n b^{n-1} R and Q^n = a^n b^n R.
Coupling current_P(const SinkhornState& state, const Coupling& R);
Coupling current_Q(const SinkhornState& state, const Coupling& R);

// Duality gap of the balanced problem at (P^n; a^n, b^{n-1}).
double gap_balanced(const SinkhornState& state, const Coupling& R, const Measure& mu,
                    const Measure& nu);

// Duality gap of the problem penalizing the second marginal with weight lambda.
double gap_unbalanced(const SinkhornState& state, const Coupling& R, const Measure& mu,
                      const Measure& nu, double lambda);

struct TracePoint {
  long iteration;
  double criterion;  // value compared with epsilon_tol
  double delta;      // max(TV(P^n, P^{n-1}), TV(Q^n, Q^{n-1})); NaN at n = 1
};

struct SolveReport {
  Coupling p_star, q_star, r_star, r_bar_star;
  Measure mu_star, nu_star, mu_g, nu_g;
  double z_norm = 0.0;
  long iterations = 0;
  bool converged = false;
  std::optional<ScalabilityClass> classification;
  std::vector<TracePoint> trace;
  Vec log_a, log_b;
  // Entries of supp R not declared zero by the run-length test: below
  // 1e-12 M(mu) in both P^n and Q^n for 50 consecutive sweeps.
  BipartiteSupport support;
};

inline constexpr double kZeroTolRel = 1e-12;
inline constexpr int kZeroRun = 50;

SolveReport run_sinkhorn(const Coupling& R, const Measure& mu, const Measure& nu,
                         const StopConfig& cfg = {});

// phi_i = log(mu*_i / mu_i) on supp mu, psi_j = log(nu*_j / nu_j) on supp nu;
// NaN outside the supports.
std::pair<Vec, Vec> potentials_phi_psi(const SolveReport& report, const Measure& mu,
                                       const Measure& nu);

struct OptimalityDiagnostics {
  double p_from_q = 0.0;     // max |P*_ij - mu_i / mu*_i Q*_ij|
  double q_from_p = 0.0;     // max |Q*_ij - nu_j / nu*_j P*_ij|
  double on_support = 0.0;   // max |phi_i + psi_j| over S
  double off_support = 0.0;  // max(0, -(phi_i + psi_j)) over E
  double swap_nu = 0.0;      // |H(nu|nu*) - H(mu*|mu)|
  double swap_mu = 0.0;      // |H(mu|mu*) - H(nu*|nu)|
  bool ok = true;
  std::vector<std::string> violations;
};

// Checks the optimality relations between P*, Q*, mu*, nu*. S defaults to
// report.support.
OptimalityDiagnostics check_optimality(const SolveReport& report, const Coupling& R,
                                       const Measure& mu, const Measure& nu, double tol,
                                       const BipartiteSupport* S = nullptr);

}  // namespace degensink
