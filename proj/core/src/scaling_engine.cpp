#include "scaling_engine.hpp"

#include <cmath>
#include <string>

namespace degensink::detail {

namespace {
constexpr double kAbsorbBound = 50.0;
const double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

ScalingEngine::ScalingEngine(const Coupling& R, const Measure& mu, const Measure& nu)
    : logR_(R.rows(), R.cols()),
      K_(R),
      log_mu_(mu.size()),
      log_nu_(nu.size()),
      alpha_(Vec::Zero(R.rows())),
      beta_(Vec::Zero(R.cols())),
      u_(Vec::Ones(R.rows())),
      v_(Vec::Ones(R.cols())),
      row_on_(R.rows()),
      col_on_(R.cols()) {
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j)
      logR_(i, j) = R(i, j) > 0.0 ? std::log(R(i, j)) : kNegInf;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    row_on_[i] = mu(i) > 0.0;
    log_mu_(i) = row_on_[i] ? std::log(mu(i)) : kNegInf;
  }
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    col_on_[j] = nu(j) > 0.0;
    log_nu_(j) = col_on_[j] ? std::log(nu(j)) : kNegInf;
  }
}

void ScalingEngine::update_a() {
  const Vec s = K_ * v_;
  for (int i = 0; i < rows(); ++i) {
    if (!row_on_[i]) {
      u_(i) = 0.0;
      continue;
    }
    if (!(s(i) > 0.0))
      throw Assumption1Violated("row " + std::to_string(i) +
                                " has positive mass but no reachable column");
    if (ka_ == 1.0)
      u_(i) = std::exp(log_mu_(i) - std::log(s(i)));
    else
      u_(i) = std::exp(ka_ * (log_mu_(i) - std::log(s(i)) + alpha_(i)) - alpha_(i));
  }
}

void ScalingEngine::update_b() {
  const Vec t = K_.transpose() * u_;
  for (int j = 0; j < cols(); ++j) {
    if (!col_on_[j]) {
      v_(j) = 0.0;
      continue;
    }
    if (!(t(j) > 0.0))
      throw Assumption1Violated("column " + std::to_string(j) +
                                " has positive mass but no reachable row");
    if (kb_ == 1.0)
      v_(j) = std::exp(log_nu_(j) - std::log(t(j)));
    else
      v_(j) = std::exp(kb_ * (log_nu_(j) - std::log(t(j)) + beta_(j)) - beta_(j));
  }
}

void ScalingEngine::absorb_if_needed() {
  bool need = false;
  for (int i = 0; i < rows() && !need; ++i)
    need = u_(i) > 0.0 && std::abs(std::log(u_(i))) > kAbsorbBound;
  for (int j = 0; j < cols() && !need; ++j)
    need = v_(j) > 0.0 && std::abs(std::log(v_(j))) > kAbsorbBound;
  if (!need) return;
  for (int i = 0; i < rows(); ++i)
    if (u_(i) > 0.0) {
      alpha_(i) += std::log(u_(i));
      u_(i) = 1.0;
    }
  for (int j = 0; j < cols(); ++j)
    if (v_(j) > 0.0) {
      beta_(j) += std::log(v_(j));
      v_(j) = 1.0;
    }
  rebuild_kernel();
}

void ScalingEngine::rebuild_kernel() {
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j)
      K_(i, j) = logR_(i, j) == kNegInf ? 0.0 : std::exp(logR_(i, j) + alpha_(i) + beta_(j));
}

Coupling ScalingEngine::coupling() const { return u_.asDiagonal() * K_ * v_.asDiagonal(); }

Vec ScalingEngine::log_a() const {
  Vec out(rows());
  for (int i = 0; i < rows(); ++i) out(i) = u_(i) > 0.0 ? alpha_(i) + std::log(u_(i)) : kNegInf;
  return out;
}

Vec ScalingEngine::log_b() const {
  Vec out(cols());
  for (int j = 0; j < cols(); ++j) out(j) = v_(j) > 0.0 ? beta_(j) + std::log(v_(j)) : kNegInf;
  return out;
}

void ScalingEngine::remove_entry(int i, int j) {
  logR_(i, j) = kNegInf;
  K_(i, j) = 0.0;
}

}  // namespace degensink::detail
