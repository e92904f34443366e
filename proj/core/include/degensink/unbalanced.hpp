#pragma once

#include "degensink/types.hpp"

#include <vector>

namespace degensink {

enum class PenaltySides { SecondMarginalOnly, BothMarginals };

struct PenaltyConfig {
  double lambda = 1000.0;
  PenaltySides sides = PenaltySides::SecondMarginalOnly;
  double epsilon_tol = 1e-10;
  long max_iter = 1000000;
  bool record_objective = false;
};

struct PenalizedResult {
  Coupling coupling;
  Vec log_a, log_b;
  long iterations = 0;
  bool converged = false;
  // First-order residual of the penalized objective in the scaling
  // directions; zero at a minimizer.
  double residual = 0.0;
  std::vector<double> objective_trace;
};

// min H(P|R) + lambda H(nu^P|nu) s.t. marginal_row(P) = mu, by the scaling
// iteration with exponent lambda / (1 + lambda) on b. Stops on the
// unbalanced duality gap.
PenalizedResult solve_schu_lambda(const Coupling& R, const Measure& mu, const Measure& nu,
                                  const PenaltyConfig& cfg);

// min (1/lambda) H(P|R) + H(mu^P|mu) + H(nu^P|nu), both potentials with
// exponent lambda / (1 + lambda). Stops on the TV of successive iterates.
PenalizedResult solve_two_sided(const Coupling& R, const Measure& mu, const Measure& nu,
                                const PenaltyConfig& cfg);

// (1/lambda) H(P|R) + H(mu^P|mu) + H(nu^P|nu).
double two_sided_objective(const Coupling& P, const Coupling& R, const Measure& mu,
                           const Measure& nu, double lambda);

// Zeros of R replaced by eps.
Coupling epsilon_fill(const Coupling& R, double eps);

inline const std::vector<double> kDefaultLambdaGrid = {1.0, 10.0, 100.0, 1e3, 1e4};

struct LambdaRow {
  double lambda;
  double tv;
  long iterations;
  bool converged;
};

struct EpsilonRow {
  double epsilon;
  double tv;
  long iterations;
  bool converged;
};

// TV(solve_two_sided(lambda), r_star) for each lambda. Rows are sorted by lambda.
std::vector<LambdaRow> sweep_lambda(const Coupling& R, const Measure& mu, const Measure& nu,
                                    const Coupling& r_star, const std::vector<double>& lambdas,
                                    double tol = 1e-10);

// TV(P* of Sch(R_eps; mu, nu), r_star) and iteration counts. Rows are sorted by eps.
std::vector<EpsilonRow> sweep_epsilon(const Coupling& R, const Measure& mu, const Measure& nu,
                                      const Coupling& r_star, const std::vector<double>& epsilons,
                                      double tol = 1e-10);

}  // namespace degensink
