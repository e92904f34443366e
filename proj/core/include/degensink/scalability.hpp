#pragma once

#include "degensink/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degensink {

// Largest row count for which subset enumeration is attempted (2^20 subsets).
inline constexpr int kEnumerationCap = 20;

BipartiteSupport support_graph(const Coupling& R);

// F_R(A) and D_R(B).
IndexSet forward_image(const BipartiteSupport& G, const IndexSet& A);
IndexSet backward_image(const BipartiteSupport& G, const IndexSet& B);

// R^0 = 1_E R, zeroing rows with mu_i = 0 and columns with nu_j = 0.
Coupling restrict_to_E(const Coupling& R, const Measure& mu, const Measure& nu);

// mu << mu^{R^0} and nu << nu^{R^0}.
bool check_assumption1(const Coupling& R, const Measure& mu, const Measure& nu);

struct Reduction {
  Coupling R;
  Measure mu;
  Measure nu;
  std::vector<int> row_map;  // reduced row -> original row
  std::vector<int> col_map;
};

// Restriction to supp mu x supp nu. Throws Assumption1Violated.
Reduction reduce_to_full_support(const Coupling& R, const Measure& mu, const Measure& nu);

enum class ScalabilityTag {
  Scalable,
  ApproximatelyScalable,
  NonScalable,
  UnbalancedScalable,
  UnbalancedApproximatelyScalable,
  UnbalancedNonScalable,
};

std::string to_string(ScalabilityTag tag);

struct ScalabilityClass {
  ScalabilityTag tag = ScalabilityTag::Scalable;
  // Row subset A with mu(A) > nu(F_R(A)) (non-scalable) or with equality while
  // R((D \ A) x F_R(A)) > 0 (approximately scalable). Original indices.
  std::optional<IndexSet> witness;
};

// Exact classification by enumeration of row subsets. Unbalanced inputs are
// normalized to probability vectors first. Throws DimensionTooLarge when the
// reduced row count exceeds kEnumerationCap.
ScalabilityClass classify_exact(const Coupling& R, const Measure& mu, const Measure& nu);

// Max-flow test for the existence of P << R with marginals (mu, nu).
// Requires balanced masses (InvalidInput otherwise).
bool feasibility_flow(const Coupling& R, const Measure& mu, const Measure& nu);

// A feasible coupling read off the maximum flow, when one exists.
std::optional<Coupling> feasible_coupling(const Coupling& R, const Measure& mu,
                                          const Measure& nu);

struct Component {
  IndexSet rows;
  IndexSet cols;
};

// Connected components of the subgraph induced by U u V. Isolated vertices
// come back as singleton components with an empty partner side. Components
// are ordered by their smallest row, then column-only components.
std::vector<Component> connected_components(const BipartiteSupport& G, const IndexSet& U,
                                            const IndexSet& V);

IndexSet all_indices(int n);

}  // namespace degensink
