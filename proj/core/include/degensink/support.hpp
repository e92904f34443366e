#pragma once

#include "degensink/sinkhorn.hpp"
#include "degensink/types.hpp"

#include <vector>

namespace degensink {

struct ThetaSetResult {
  double theta_m = 0.0;
  std::vector<IndexSet> maximizers;
  std::vector<IndexSet> smallest;
};

// theta_m = max over nonempty A of mu(A) / nu(F_R(A)), by enumeration. Ties
// are decided with a 1e-12 relative tolerance. Throws Assumption2Violated
// unless mu, nu, mu^R, nu^R are all positive, and DimensionTooLarge past
// kEnumerationCap rows.
ThetaSetResult maximal_theta(const Coupling& R, const Measure& mu, const Measure& nu);

struct ProcedureStep {
  IndexSet rows;     // D^n
  IndexSet cols;     // F^n
  IndexSet chosen;   // M_n
  IndexSet image;    // F(M_n)
  double theta = 0.0;
  std::vector<std::pair<int, int>> zeroed;  // entries removed from the support
};

struct ProcedureTrace {
  std::vector<ProcedureStep> steps;
  BipartiteSupport final_mask;
  int stationary_at = 0;
};

// Iterative removal of the union of smallest maximal theta-sets; the final
// mask is the common support S of P*, Q*, R*.
ProcedureTrace exact_support_procedure(const Coupling& R, const Measure& mu, const Measure& nu);

// A is a SISP set w.r.t. the limit coupling r_ref: r_ref vanishes on
// (D \ A) x F_R(A) and has the same support as R on every row of A. Entries
// below 1e-12 M(mu) count as zero.
bool is_sisp(const IndexSet& A, const Coupling& R, const Measure& mu, const Measure& nu,
             const Coupling& r_ref);

// m_i = (1/N) mu_i / mu^R_i.
Vec default_thresholds(const Coupling& R, const Measure& mu);

struct Algorithm1Result {
  BipartiteSupport mask;
  long iterations = 0;  // inner sweeps summed over all rounds
  int rounds = 0;
  bool converged = true;   // false when an inner loop hit its cap
  bool degenerate = false; // an inner loop dropped every row
};

// Approximate support detection on R' = 1_{R != 0}. Thresholds default to
// default_thresholds(R', mu) when empty. The inner loop stops by
// stop_cfg.mode, and only in a sweep where no row was dropped.
Algorithm1Result approx_support_algorithm1(const Coupling& R, const Measure& mu,
                                           const Measure& nu, const Vec& thresholds = {},
                                           const StopConfig& stop_cfg = {});

struct RateFit {
  double slope = 0.0;  // log10 units per iteration
  double intercept = 0.0;
  double r_squared = 0.0;
  int window = 0;
};

struct MaskedSolveReport {
  SolveReport report;
  RateFit rate;
};

// Least-squares fit of log10 delta vs iteration over the last
// max(20, n/2) finite, positive deltas of the trace.
RateFit fit_linear_rate(const std::vector<TracePoint>& trace);

// run_sinkhorn on 1_mask R plus a rate estimate. Throws InvalidInput unless
// mask is within supp R.
MaskedSolveReport masked_solve(const Coupling& R, const Measure& mu, const Measure& nu,
                               const BipartiteSupport& mask, const StopConfig& cfg = {});

}  // namespace degensink
