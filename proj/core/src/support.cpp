#include "degensink/support.hpp"

#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"
#include "sinkhorn_detail.hpp"
#include "subsets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace degensink {

namespace {

constexpr double kTieRel = 1e-12;

void require_assumption2(const Coupling& R, const Measure& mu, const Measure& nu) {
  validate_instance(R, mu, nu);
  const Measure r = marginal_row(R), c = marginal_col(R);
  if ((mu.array() <= 0.0).any() || (nu.array() <= 0.0).any() || (r.array() <= 0.0).any() ||
      (c.array() <= 0.0).any())
    throw Assumption2Violated("mu, nu, mu^R and nu^R must all be positive");
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::ranges::set_difference(a, b, std::back_inserter(out));
  return out;
}

IndexSet map_back(const IndexSet& local, const IndexSet& map) {
  IndexSet out;
  for (int k : local) out.push_back(map[k]);
  return out;
}

}  // namespace

ThetaSetResult maximal_theta(const Coupling& R, const Measure& mu, const Measure& nu) {
  require_assumption2(R, mu, nu);
  const int n = static_cast<int>(R.rows());
  if (n > kEnumerationCap)
    throw DimensionTooLarge("maximal_theta: " + std::to_string(n) + " rows exceed the cap of " +
                            std::to_string(kEnumerationCap));
  const auto t = detail::build_subset_table(support_graph(R), mu, nu);
  const std::uint32_t full = std::uint32_t{1} << n;
  ThetaSetResult res;
  for (std::uint32_t s = 1; s < full; ++s) res.theta_m = std::max(res.theta_m, t.mu_A[s] / t.nu_F[s]);

  std::vector<std::uint32_t> hits;
  for (std::uint32_t s = 1; s < full; ++s)
    if (t.mu_A[s] >= res.theta_m * t.nu_F[s] * (1.0 - kTieRel)) hits.push_back(s);
  for (auto s : hits) res.maximizers.push_back(detail::mask_indices(s));

  // Maximizers are closed under intersection, so a maximizer is minimal iff it
  // contains no smaller accepted one.
  std::vector<std::uint32_t> by_size = hits;
  std::ranges::stable_sort(by_size, {}, [](std::uint32_t s) { return std::popcount(s); });
  std::vector<std::uint32_t> minimal;
  for (auto s : by_size) {
    const bool contains = std::ranges::any_of(minimal, [&](auto m) { return (m & s) == m; });
    if (!contains) minimal.push_back(s);
  }
  for (auto s : minimal) res.smallest.push_back(detail::mask_indices(s));
  return res;
}

ProcedureTrace exact_support_procedure(const Coupling& R, const Measure& mu, const Measure& nu) {
  require_assumption2(R, mu, nu);
  ProcedureTrace trace;
  trace.final_mask = support_graph(R);
  IndexSet D = all_indices(static_cast<int>(R.rows()));
  IndexSet F = all_indices(static_cast<int>(R.cols()));
  while (!D.empty() && !F.empty()) {
    const int n = static_cast<int>(D.size()), m = static_cast<int>(F.size());
    Coupling local(n, m);
    Measure lmu(n), lnu(m);
    for (int a = 0; a < n; ++a) {
      lmu(a) = mu(D[a]);
      for (int b = 0; b < m; ++b) local(a, b) = trace.final_mask(D[a], F[b]) ? R(D[a], F[b]) : 0.0;
    }
    for (int b = 0; b < m; ++b) lnu(b) = nu(F[b]);
    const auto theta = maximal_theta(local, lmu, lnu);

    IndexSet chosen_local;
    for (const auto& A : theta.smallest) chosen_local.insert(chosen_local.end(), A.begin(), A.end());
    std::ranges::sort(chosen_local);
    ProcedureStep step;
    step.rows = D;
    step.cols = F;
    step.theta = theta.theta_m;
    step.chosen = map_back(chosen_local, D);
    step.image = map_back(forward_image(support_graph(local), chosen_local), F);
    const IndexSet rest = set_difference(D, step.chosen);
    for (int i : rest)
      for (int j : step.image)
        if (trace.final_mask(i, j)) {
          trace.final_mask.set(i, j, false);
          step.zeroed.push_back({i, j});
        }
    D = rest;
    F = set_difference(F, step.image);
    trace.steps.push_back(std::move(step));
  }
  trace.stationary_at = static_cast<int>(trace.steps.size());
  return trace;
}

bool is_sisp(const IndexSet& A, const Coupling& R, const Measure& mu, const Measure& nu,
             const Coupling& r_ref) {
  validate_instance(R, mu, nu);
  if (A.empty() || r_ref.rows() != R.rows() || r_ref.cols() != R.cols()) return false;
  const double z = kZeroTolRel * total_mass(mu);
  const IndexSet image = forward_image(support_graph(R), A);
  std::vector<char> in_a(R.rows(), 0);
  for (int i : A) in_a[i] = 1;
  for (int i = 0; i < static_cast<int>(R.rows()); ++i) {
    if (in_a[i]) {
      for (int j = 0; j < static_cast<int>(R.cols()); ++j)
        if ((R(i, j) > 0.0) != (r_ref(i, j) >= z)) return false;
    } else {
      for (int j : image)
        if (r_ref(i, j) >= z) return false;
    }
  }
  return true;
}

Vec default_thresholds(const Coupling& R, const Measure& mu) {
  const Measure r = marginal_row(R);
  const double n = static_cast<double>(R.rows());
  Vec m(R.rows());
  for (Eigen::Index i = 0; i < R.rows(); ++i) m(i) = r(i) > 0.0 ? mu(i) / (n * r(i)) : 0.0;
  return m;
}

Algorithm1Result approx_support_algorithm1(const Coupling& R, const Measure& mu,
                                           const Measure& nu, const Vec& thresholds,
                                           const StopConfig& stop_cfg) {
  validate_instance(R, mu, nu);
  if (!check_assumption1(R, mu, nu))
    throw Assumption1Violated("mu << mu^{R^0} or nu << nu^{R^0} fails");
  const int N = static_cast<int>(R.rows()), M = static_cast<int>(R.cols());
  const Coupling Rp = support_graph(restrict_to_E(R, mu, nu)).indicator();
  const Vec m = thresholds.size() == 0 ? default_thresholds(Rp, mu) : thresholds;
  if (m.size() != N) throw InvalidInput("approx_support_algorithm1: threshold length mismatch");

  Algorithm1Result res;
  res.mask = support_graph(Rp);
  IndexSet A, B;
  for (int i = 0; i < N; ++i)
    if (mu(i) > 0.0) A.push_back(i);
  for (int j = 0; j < M; ++j)
    if (nu(j) > 0.0) B.push_back(j);
  const long cap = 10 * stop_cfg.max_iter;

  while (!A.empty()) {
    ++res.rounds;
    std::vector<char> row_on(N, 0), col_on(M, 0);
    for (int i : A) row_on[i] = 1;
    for (int j : B) col_on[j] = 1;
    Vec a = Vec::Zero(N), b = Vec::Zero(M), la = Vec::Zero(N), lb_prev = Vec::Zero(M);
    for (int j : B) b(j) = 1.0;
    Coupling P_prev = Coupling::Zero(N, M), Q_prev = Coupling::Zero(N, M);
    bool done = false;
    for (long k = 1; k <= cap && !done; ++k) {
      ++res.iterations;
      bool dropped = false;
      // Row update and row drop.
      for (int i = 0; i < N; ++i) {
        if (!row_on[i]) continue;
        double s = 0.0, bmin = kInf;
        for (int j = 0; j < M; ++j)
          if (col_on[j] && res.mask(i, j)) {
            s += b(j);
            bmin = std::min(bmin, b(j));
          }
        if (s == 0.0) {
          row_on[i] = 0;
          a(i) = 0.0;
          dropped = true;
          continue;
        }
        a(i) = mu(i) / s;
        if (a(i) * bmin < m(i)) {
          row_on[i] = 0;
          a(i) = 0.0;
          dropped = true;
        }
      }
      Coupling P = Coupling::Zero(N, M);
      for (int i = 0; i < N; ++i)
        if (row_on[i])
          for (int j = 0; j < M; ++j)
            if (col_on[j] && res.mask(i, j)) P(i, j) = a(i) * b(j);
      // Columns outside F(U) leave the block.
      for (int j = 0; j < M; ++j) {
        if (!col_on[j]) continue;
        double t = 0.0;
        for (int i = 0; i < N; ++i)
          if (row_on[i] && res.mask(i, j)) t += a(i);
        lb_prev(j) = std::log(b(j));
        if (t == 0.0) {
          col_on[j] = 0;
          b(j) = 0.0;
        } else {
          b(j) = nu(j) / t;
        }
      }
      Coupling Q = Coupling::Zero(N, M);
      for (int i = 0; i < N; ++i)
        if (row_on[i])
          for (int j = 0; j < M; ++j)
            if (col_on[j] && res.mask(i, j)) Q(i, j) = a(i) * b(j);

      double crit = kInf;
      if (stop_cfg.mode == StopMode::IterateDelta) {
        if (k >= 2) crit = std::max(tv_distance(P, P_prev), tv_distance(Q, Q_prev));
      } else {
        // Gap of the active block with the same conventions as run_sinkhorn.
        Measure bmu = Measure::Zero(N), bnu = Measure::Zero(M);
        for (int i = 0; i < N; ++i) {
          bmu(i) = row_on[i] ? mu(i) : 0.0;
          la(i) = row_on[i] ? std::log(a(i)) : -kInf;
        }
        Vec lb = lb_prev;
        for (int j = 0; j < M; ++j) {
          bnu(j) = col_on[j] ? nu(j) : 0.0;
          if (!col_on[j]) lb(j) = -kInf;
        }
        if (k >= 2 || stop_cfg.mode == StopMode::UnbalancedGap)
          crit = std::abs(stop_cfg.mode == StopMode::BalancedGap
                              ? detail::gap_balanced_at(P, la, lb, bmu, bnu)
                              : detail::gap_unbalanced_at(P, la, lb, bmu, bnu, stop_cfg.lambda));
      }
      P_prev = P;
      Q_prev = Q;
      if (!dropped && crit <= stop_cfg.epsilon_tol) done = true;
    }
    if (!done) {
      res.converged = false;
      return res;
    }

    IndexSet U, V;
    for (int i : A)
      if (row_on[i]) U.push_back(i);
    for (int j : B)
      if (col_on[j]) V.push_back(j);
    if (U.empty()) {
      res.degenerate = true;
      return res;
    }
    const auto comps = connected_components(res.mask, U, V);
    double best = 0.0;
    std::vector<double> ratio(comps.size(), -1.0);
    for (size_t c = 0; c < comps.size(); ++c) {
      if (comps[c].rows.empty() || comps[c].cols.empty()) continue;
      double a_mass = 0.0, b_mass = 0.0;
      for (int i : comps[c].rows) a_mass += mu(i);
      for (int j : comps[c].cols) b_mass += nu(j);
      ratio[c] = a_mass / b_mass;
      best = std::max(best, ratio[c]);
    }
    IndexSet U_sel, V_sel;
    for (size_t c = 0; c < comps.size(); ++c)
      if (ratio[c] >= best * (1.0 - kTieRel)) {
        U_sel.insert(U_sel.end(), comps[c].rows.begin(), comps[c].rows.end());
        V_sel.insert(V_sel.end(), comps[c].cols.begin(), comps[c].cols.end());
      }
    std::ranges::sort(U_sel);
    std::ranges::sort(V_sel);
    const IndexSet rest = set_difference(A, U_sel);
    for (int i : rest)
      for (int j : V_sel) res.mask.set(i, j, false);
    A = rest;
    B = set_difference(B, V_sel);
  }
  return res;
}

RateFit fit_linear_rate(const std::vector<TracePoint>& trace) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& t : trace)
    if (std::isfinite(t.delta) && t.delta > 0.0)
      pts.push_back({static_cast<double>(t.iteration), std::log10(t.delta)});
  RateFit fit;
  const size_t want = std::max<size_t>(20, trace.size() / 2);
  const size_t w = std::min(want, pts.size());
  fit.window = static_cast<int>(w);
  if (w < 2) return fit;
  const auto first = pts.end() - static_cast<long>(w);
  double sx = 0, sy = 0;
  for (auto it = first; it != pts.end(); ++it) sx += it->first, sy += it->second;
  const double mx = sx / w, my = sy / w;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto it = first; it != pts.end(); ++it) {
    const double dx = it->first - mx, dy = it->second - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r_squared = syy > 0.0 ? 1.0 - std::max(ss_res, 0.0) / syy : 1.0;
  return fit;
}

MaskedSolveReport masked_solve(const Coupling& R, const Measure& mu, const Measure& nu,
                               const BipartiteSupport& mask, const StopConfig& cfg) {
  validate_instance(R, mu, nu);
  if (!mask.subset_of(support_graph(R)))
    throw InvalidInput("masked_solve: mask must lie within the support of R");
  const Coupling Rm = (R.array() * mask.indicator().array()).matrix();
  MaskedSolveReport out;
  out.report = run_sinkhorn(Rm, mu, nu, cfg);
  out.rate = fit_linear_rate(out.report.trace);
  return out;
}

}  // namespace degensink
