#pragma once

#include "degensink/types.hpp"

namespace degensink {

// M(m) = sum of the weights.
double total_mass(const Measure& m);

// mu^R_i = sum_j R_ij and nu^R_j = sum_i R_ij.
Measure marginal_row(const Coupling& R);
Measure marginal_col(const Coupling& R);

// H(p|r) = sum_k p_k log(p_k / r_k) + r_k - p_k, with 0 log 0 = 0. Returns
// kInf when p is not absolutely continuous w.r.t. r. Throws InvalidInput on
// a length mismatch.
double rel_entropy(const Measure& p, const Measure& r);
double rel_entropy_coupling(const Coupling& P, const Coupling& R);

// Solution of min { H(P|R) : marginal_row(P) = mu }, P_ij = mu_i / mu^R_i * R_ij.
// Throws InfeasibleProjection when mu is not << mu^R.
Coupling project_first_marginal(const Coupling& R, const Measure& mu);
Coupling project_second_marginal(const Coupling& R, const Measure& nu);

Coupling geometric_mean(const Coupling& P, const Coupling& Q);

// Entrywise l1 distance, sum_ij |P_ij - Q_ij|.
double tv_distance(const Coupling& P, const Coupling& Q);

// Throws InvalidInput unless every entry is finite and >= 0.
void validate_measure(const Measure& m, const char* name);
void validate_coupling(const Coupling& R, const char* name);

// Checks shapes and nonnegativity of a (R, mu, nu) triple.
void validate_instance(const Coupling& R, const Measure& mu, const Measure& nu);

// |M(mu) - M(nu)| <= kMassTol * max(M(mu), M(nu), 1).
bool is_balanced(const Measure& mu, const Measure& nu);

}  // namespace degensink
