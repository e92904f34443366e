#include "degensink/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace degensink {

double total_mass(const Measure& m) { return m.sum(); }

Measure marginal_row(const Coupling& R) { return R.rowwise().sum(); }

Measure marginal_col(const Coupling& R) { return R.colwise().sum().transpose(); }

namespace {

// One term p log(p/r) + r - p with the 0-conventions.
double entropy_term(double p, double r) {
  if (p == 0.0) return r;
  if (r == 0.0) return kInf;
  return p * std::log(p / r) + r - p;
}

}  // namespace

double rel_entropy(const Measure& p, const Measure& r) {
  if (p.size() != r.size()) throw InvalidInput("rel_entropy: length mismatch");
  double h = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double t = entropy_term(p(k), r(k));
    if (t == kInf) return kInf;
    h += t;
  }
  return h;
}

double rel_entropy_coupling(const Coupling& P, const Coupling& R) {
  if (P.rows() != R.rows() || P.cols() != R.cols())
    throw InvalidInput("rel_entropy_coupling: shape mismatch");
  return rel_entropy(P.reshaped(), R.reshaped());
}

Coupling project_first_marginal(const Coupling& R, const Measure& mu) {
  if (mu.size() != R.rows()) throw InvalidInput("project_first_marginal: length mismatch");
  const Measure muR = marginal_row(R);
  Coupling P = Coupling::Zero(R.rows(), R.cols());
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (mu(i) == 0.0) continue;
    if (muR(i) == 0.0)
      throw InfeasibleProjection("project_first_marginal: mu not << mu^R at row " +
                                 std::to_string(i));
    P.row(i) = (mu(i) / muR(i)) * R.row(i);
  }
  return P;
}

Coupling project_second_marginal(const Coupling& R, const Measure& nu) {
  if (nu.size() != R.cols()) throw InvalidInput("project_second_marginal: length mismatch");
  const Measure nuR = marginal_col(R);
  Coupling Q = Coupling::Zero(R.rows(), R.cols());
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    if (nu(j) == 0.0) continue;
    if (nuR(j) == 0.0)
      throw InfeasibleProjection("project_second_marginal: nu not << nu^R at column " +
                                 std::to_string(j));
    Q.col(j) = (nu(j) / nuR(j)) * R.col(j);
  }
  return Q;
}

Coupling geometric_mean(const Coupling& P, const Coupling& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw InvalidInput("geometric_mean: shape mismatch");
  return (P.array() * Q.array()).sqrt().matrix();
}

double tv_distance(const Coupling& P, const Coupling& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw InvalidInput("tv_distance: shape mismatch");
  return (P - Q).cwiseAbs().sum();
}

namespace {

template <class M>
void validate_entries(const M& m, const char* name) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double x = m.reshaped()(k);
    if (!std::isfinite(x) || x < 0.0)
      throw InvalidInput(std::string(name) + ": entries must be finite and nonnegative");
  }
}

}  // namespace

void validate_measure(const Measure& m, const char* name) { validate_entries(m, name); }

void validate_coupling(const Coupling& R, const char* name) { validate_entries(R, name); }

void validate_instance(const Coupling& R, const Measure& mu, const Measure& nu) {
  validate_coupling(R, "R");
  validate_measure(mu, "mu");
  validate_measure(nu, "nu");
  if (mu.size() != R.rows() || nu.size() != R.cols())
    throw InvalidInput("instance: R is " + std::to_string(R.rows()) + "x" +
                       std::to_string(R.cols()) + " but mu has " + std::to_string(mu.size()) +
                       " and nu has " + std::to_string(nu.size()) + " entries");
}

bool is_balanced(const Measure& mu, const Measure& nu) {
  const double a = total_mass(mu), b = total_mass(nu);
  return std::abs(a - b) <= kMassTol * std::max({a, b, 1.0});
}

}  // namespace degensink
