#pragma once

// Log-stabilized diagonal scaling. Potentials are a = exp(alpha) u and
// b = exp(beta) v with the kernel K = R exp(alpha + beta); u and v are folded
// into the offsets once they leave [e^-tau, e^tau], so every coupling
// u_i K_ij v_j is formed without overflow. Rows with mu_i = 0 and columns
// with nu_j = 0 carry zero potential once updated.

#include "degensink/types.hpp"

namespace degensink::detail {

class ScalingEngine {
 public:
  ScalingEngine(const Coupling& R, const Measure& mu, const Measure& nu);

  // Exponents of the a- and b-updates: log a = ka (log mu - log R b), etc.
  void set_exponents(double ka, double kb) {
    ka_ = ka;
    kb_ = kb;
  }

  void update_a();
  void update_b();

  // Folds u, v into the offsets when they drift past the bound. Leaves every
  // product a_i b_j unchanged.
  void absorb_if_needed();

  // u_i K_ij v_j for the current potentials.
  Coupling coupling() const;

  Vec log_a() const;
  Vec log_b() const;

  // Removes entry (i, j) from the reference for good.
  void remove_entry(int i, int j);

  int rows() const { return static_cast<int>(K_.rows()); }
  int cols() const { return static_cast<int>(K_.cols()); }

 private:
  void rebuild_kernel();

  Mat logR_;
  Mat K_;
  Vec log_mu_, log_nu_;
  Vec alpha_, beta_, u_, v_;
  std::vector<char> row_on_, col_on_;
  double ka_ = 1.0, kb_ = 1.0;
};

}  // namespace degensink::detail
