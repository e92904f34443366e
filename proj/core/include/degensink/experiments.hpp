#pragma once

#include "degensink/sinkhorn.hpp"
#include "degensink/types.hpp"
#include "degensink/unbalanced.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace degensink {

enum class InstanceKind { UpperTriangularOnes, StaircaseBlocks, RandomSparse };

struct InstanceSpec {
  InstanceKind kind = InstanceKind::UpperTriangularOnes;
  int n_rows = 3;
  int n_cols = 3;
  int n_blocks = 1;
  double density = 0.5;
  std::uint64_t seed = 0;
  // Marginal overrides for UpperTriangularOnes (default: mu = nu = 2).
  std::optional<Vec> mu, nu;
};

struct Instance {
  Coupling R;
  Measure mu, nu;
  // Limit support known by construction (staircase only).
  std::optional<BipartiteSupport> expected_support;
};

// Throws InvalidInput on an invalid spec or when rejection sampling of a
// random mask fails 1000 times.
Instance gen_instance(const InstanceSpec& spec);

// Ratio assigned to each staircase block, top to bottom.
std::vector<double> staircase_thetas(int n_blocks);

// Parses "kind=staircase,n=100,blocks=6,seed=1" style descriptions. Kinds:
// triu, staircase, random. Keys: n, rows, cols, blocks, density, seed, and
// mu / nu as ':'-separated lists.
InstanceSpec parse_instance_spec(const std::string& text);

Instance appendix_a_instance();

struct Checkpoint {
  int half_step;   // half-step numbering: 2k - 1 shows P^k, 2k shows Q^k
  Vec a, b;        // a^k and the b the displayed coupling is built from
  Coupling coupling;
};

// Iterates of the worked 3 x 3 example at the given half-steps.
std::vector<Checkpoint> appendix_a_checkpoints(const std::vector<int>& half_steps);

inline const std::vector<int> kAppendixACheckpoints = {1, 2, 5, 11, 80, 81};

// Formatted report: checkpoints and limits P*, Q*, R*.
std::string run_appendix_a();

struct ZerosRow {
  int n_blocks;
  long extra_zeros;
  long iters_plain;
  long iters_naive;
  long iters_preproc;
  double max_limit_diff;  // between the three methods' p_star
};

struct ExperimentConfig {
  int size = 100;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  long max_iter = 200000;
};

// Plain Sinkhorn vs per-step thresholding vs Algorithm 1 + masked solve on
// the staircase family.
std::vector<ZerosRow> experiment_iterations_vs_zeros(const std::vector<int>& block_range,
                                                     const ExperimentConfig& cfg = {});

// Per-step thresholding: after each a-update, entries of P^n below m_i are
// removed from R for good.
SolveReport naive_threshold_solve(const Coupling& R, const Measure& mu, const Measure& nu,
                                  const Vec& thresholds, const StopConfig& cfg);

struct Fig6Tables {
  std::vector<EpsilonRow> epsilon_rows;
  std::vector<LambdaRow> lambda_rows;
};

inline const std::vector<double> kFig6Lambdas = {1.0, 10.0, 100.0, 150.0, 1e3, 1e4};
inline const std::vector<double> kFig6Epsilons = {1e-1, 1e-2, 1e-3, 1e-4, 1e-6};

// Two-block 100 x 100 staircase (theta > 1 on the first removed block,
// theta < 1 on the other), both sweeps against its r_star.
Fig6Tables experiment_fig6(const ExperimentConfig& cfg = {});

std::string zeros_csv(const std::vector<ZerosRow>& rows);
std::string lambda_csv(const std::vector<LambdaRow>& rows);
std::string epsilon_csv(const std::vector<EpsilonRow>& rows);

}  // namespace degensink
