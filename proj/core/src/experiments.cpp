#include "degensink/experiments.hpp"

#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"
#include "degensink/support.hpp"
#include "sinkhorn_detail.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace degensink {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string format_vec(const Vec& v) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4g", k ? ", " : "", v(k));
    s += buf;
  }
  return s + ")";
}

std::string format_mat(const Mat& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += "  [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%10.4g", j ? " " : "", m(i, j));
      s += buf;
    }
    s += "]\n";
  }
  return s;
}

bool is_indicator(const Coupling& R) {
  return ((R.array() == 0.0) || (R.array() == 1.0)).all();
}

}  // namespace

std::vector<Checkpoint> appendix_a_checkpoints(const std::vector<int>& half_steps) {
  for (int h : half_steps)
    if (h < 1) throw InvalidInput("appendix_a_checkpoints: half-steps start at 1");
  const auto inst = appendix_a_instance();
  const int last = half_steps.empty() ? 0 : *std::ranges::max_element(half_steps);
  std::vector<SinkhornState> states{SinkhornState::initial(3, 3)};
  for (int k = 1; k <= (last + 1) / 2; ++k)
    states.push_back(sinkhorn_step(states.back(), inst.R, inst.mu, inst.nu));
  std::vector<Checkpoint> out;
  for (int h : half_steps) {
    const auto& st = states[(h + 1) / 2];
    Checkpoint c;
    c.half_step = h;
    c.a = st.a();
    if (h % 2 == 1) {
      c.b = st.log_b_prev.unaryExpr([](double x) { return std::exp(x); });
      c.coupling = current_P(st, inst.R);
    } else {
      c.b = st.b();
      c.coupling = current_Q(st, inst.R);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string run_appendix_a() {
  std::ostringstream os;
  const auto inst = appendix_a_instance();
  os << "R = upper triangular ones, mu = " << format_vec(inst.mu)
     << ", nu = " << format_vec(inst.nu) << "\n\n";
  for (const auto& c : appendix_a_checkpoints(kAppendixACheckpoints)) {
    const int k = (c.half_step + 1) / 2;
    const int kb = c.half_step % 2 == 1 ? k - 1 : k;
    os << "Iteration " << c.half_step << ": " << (c.half_step % 2 == 1 ? "P^" : "Q^") << k
       << " from a^" << k << " = " << format_vec(c.a) << ", b^" << kb << " = "
       << format_vec(c.b) << "\n"
       << format_mat(c.coupling) << "\n";
  }
  const auto rep = run_sinkhorn(inst.R, inst.mu, inst.nu);
  os << "Limits after " << rep.iterations << " sweeps\n";
  os << "P*\n" << format_mat(rep.p_star);
  os << "Q*\n" << format_mat(rep.q_star);
  os << "R*\n" << format_mat(rep.r_star);
  return os.str();
}

SolveReport naive_threshold_solve(const Coupling& R, const Measure& mu, const Measure& nu,
                                  const Vec& thresholds, const StopConfig& cfg) {
  if (thresholds.size() != R.rows())
    throw InvalidInput("naive_threshold_solve: threshold length mismatch");
  auto hook = [&](detail::ScalingEngine& eng, const Coupling& P) {
    for (Eigen::Index i = 0; i < P.rows(); ++i)
      for (Eigen::Index j = 0; j < P.cols(); ++j)
        if (P(i, j) > 0.0 && P(i, j) < thresholds(i))
          eng.remove_entry(static_cast<int>(i), static_cast<int>(j));
  };
  return detail::run_scaling(R, mu, nu, cfg, hook);
}

std::vector<ZerosRow> experiment_iterations_vs_zeros(const std::vector<int>& block_range,
                                                     const ExperimentConfig& cfg) {
  std::vector<int> blocks = block_range;
  std::ranges::sort(blocks);
  StopConfig stop;
  stop.epsilon_tol = cfg.tol;
  stop.max_iter = cfg.max_iter;
  std::vector<ZerosRow> rows;
  for (int K : blocks) {
    InstanceSpec spec;
    spec.kind = InstanceKind::StaircaseBlocks;
    spec.n_rows = spec.n_cols = cfg.size;
    spec.n_blocks = K;
    spec.seed = cfg.seed;
    const auto inst = gen_instance(spec);
    const auto plain = run_sinkhorn(inst.R, inst.mu, inst.nu, stop);
    const auto naive =
        naive_threshold_solve(inst.R, inst.mu, inst.nu, default_thresholds(inst.R, inst.mu), stop);
    const auto alg = approx_support_algorithm1(inst.R, inst.mu, inst.nu, {}, stop);

    ZerosRow row{};
    row.n_blocks = K;
    const long full = support_graph(inst.R).count();
    row.extra_zeros = full - (inst.expected_support ? inst.expected_support->count()
                                                    : alg.mask.count());
    row.iters_plain = plain.iterations;
    row.iters_naive = naive.iterations;
    Coupling p_pre;
    if (alg.mask == support_graph(inst.R) && is_indicator(inst.R)) {
      // Algorithm 1 already ran the plain iteration on R.
      row.iters_preproc = alg.iterations;
      p_pre = plain.p_star;
    } else {
      const auto masked = masked_solve(inst.R, inst.mu, inst.nu, alg.mask, stop);
      row.iters_preproc = alg.iterations + masked.report.iterations;
      p_pre = masked.report.p_star;
    }
    row.max_limit_diff = std::max(tv_distance(plain.p_star, naive.p_star),
                                  tv_distance(plain.p_star, p_pre));
    rows.push_back(row);
  }
  return rows;
}

Fig6Tables experiment_fig6(const ExperimentConfig& cfg) {
  InstanceSpec spec;
  spec.kind = InstanceKind::StaircaseBlocks;
  spec.n_rows = spec.n_cols = cfg.size;
  spec.n_blocks = 2;
  spec.seed = cfg.seed;
  const auto inst = gen_instance(spec);
  StopConfig stop;
  stop.epsilon_tol = cfg.tol;
  stop.max_iter = cfg.max_iter;
  // The limit on the known support, where the iteration converges linearly.
  const auto ref = masked_solve(inst.R, inst.mu, inst.nu, *inst.expected_support, stop);
  Fig6Tables t;
  t.lambda_rows = sweep_lambda(inst.R, inst.mu, inst.nu, ref.report.r_star, kFig6Lambdas, cfg.tol);
  t.epsilon_rows =
      sweep_epsilon(inst.R, inst.mu, inst.nu, ref.report.r_star, kFig6Epsilons, cfg.tol);
  return t;
}

std::string zeros_csv(const std::vector<ZerosRow>& rows) {
  std::string s = "n_blocks,extra_zeros,iters_plain,iters_naive,iters_preproc\n";
  for (const auto& r : rows)
    s += std::to_string(r.n_blocks) + "," + std::to_string(r.extra_zeros) + "," +
         std::to_string(r.iters_plain) + "," + std::to_string(r.iters_naive) + "," +
         std::to_string(r.iters_preproc) + "\n";
  return s;
}

std::string lambda_csv(const std::vector<LambdaRow>& rows) {
  std::string s = "lambda,tv\n";
  for (const auto& r : rows) s += fmt(r.lambda) + "," + fmt(r.tv) + "\n";
  return s;
}

std::string epsilon_csv(const std::vector<EpsilonRow>& rows) {
  std::string s = "epsilon,tv,iterations\n";
  for (const auto& r : rows)
    s += fmt(r.epsilon) + "," + fmt(r.tv) + "," + std::to_string(r.iterations) + "\n";
  return s;
}

}  // namespace degensink
