#include "degensink/scalability.hpp"

#include "degensink/measures.hpp"
#include "subsets.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace degensink {

BipartiteSupport support_graph(const Coupling& R) {
  BipartiteSupport G(static_cast<int>(R.rows()), static_cast<int>(R.cols()));
  for (int i = 0; i < G.rows(); ++i)
    for (int j = 0; j < G.cols(); ++j) G.set(i, j, R(i, j) > 0.0);
  return G;
}

IndexSet forward_image(const BipartiteSupport& G, const IndexSet& A) {
  IndexSet out;
  for (int j = 0; j < G.cols(); ++j)
    for (int i : A)
      if (G(i, j)) {
        out.push_back(j);
        break;
      }
  return out;
}

IndexSet backward_image(const BipartiteSupport& G, const IndexSet& B) {
  IndexSet out;
  for (int i = 0; i < G.rows(); ++i)
    for (int j : B)
      if (G(i, j)) {
        out.push_back(i);
        break;
      }
  return out;
}

Coupling restrict_to_E(const Coupling& R, const Measure& mu, const Measure& nu) {
  validate_instance(R, mu, nu);
  Coupling R0 = R;
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    if (mu(i) == 0.0) R0.row(i).setZero();
  for (Eigen::Index j = 0; j < R.cols(); ++j)
    if (nu(j) == 0.0) R0.col(j).setZero();
  return R0;
}

namespace {

// First row with mu_i > 0 and no edge into supp nu, or -1.
int violating_row(const Coupling& R0, const Measure& mu) {
  const Measure r = marginal_row(R0);
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu(i) > 0.0 && r(i) == 0.0) return static_cast<int>(i);
  return -1;
}

int violating_col(const Coupling& R0, const Measure& nu) {
  const Measure c = marginal_col(R0);
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (nu(j) > 0.0 && c(j) == 0.0) return static_cast<int>(j);
  return -1;
}

IndexSet support_of(const Measure& m) {
  IndexSet out;
  for (Eigen::Index k = 0; k < m.size(); ++k)
    if (m(k) > 0.0) out.push_back(static_cast<int>(k));
  return out;
}

}  // namespace

bool check_assumption1(const Coupling& R, const Measure& mu, const Measure& nu) {
  const Coupling R0 = restrict_to_E(R, mu, nu);
  return violating_row(R0, mu) < 0 && violating_col(R0, nu) < 0;
}

Reduction reduce_to_full_support(const Coupling& R, const Measure& mu, const Measure& nu) {
  if (!check_assumption1(R, mu, nu))
    throw Assumption1Violated("mu << mu^{R^0} or nu << nu^{R^0} fails");
  Reduction red;
  red.row_map = support_of(mu);
  red.col_map = support_of(nu);
  const int n = static_cast<int>(red.row_map.size()), m = static_cast<int>(red.col_map.size());
  red.R.resize(n, m);
  red.mu.resize(n);
  red.nu.resize(m);
  for (int a = 0; a < n; ++a) {
    red.mu(a) = mu(red.row_map[a]);
    for (int b = 0; b < m; ++b) red.R(a, b) = R(red.row_map[a], red.col_map[b]);
  }
  for (int b = 0; b < m; ++b) red.nu(b) = nu(red.col_map[b]);
  return red;
}

std::string to_string(ScalabilityTag tag) {
  switch (tag) {
    case ScalabilityTag::Scalable: return "Scalable";
    case ScalabilityTag::ApproximatelyScalable: return "ApproximatelyScalable";
    case ScalabilityTag::NonScalable: return "NonScalable";
    case ScalabilityTag::UnbalancedScalable: return "UnbalancedScalable";
    case ScalabilityTag::UnbalancedApproximatelyScalable: return "UnbalancedApproximatelyScalable";
    case ScalabilityTag::UnbalancedNonScalable: return "UnbalancedNonScalable";
  }
  return "Unknown";
}

namespace {

ScalabilityTag with_balance(ScalabilityTag t, bool balanced) {
  if (balanced) return t;
  switch (t) {
    case ScalabilityTag::Scalable: return ScalabilityTag::UnbalancedScalable;
    case ScalabilityTag::ApproximatelyScalable:
      return ScalabilityTag::UnbalancedApproximatelyScalable;
    case ScalabilityTag::NonScalable: return ScalabilityTag::UnbalancedNonScalable;
    default: return t;
  }
}

IndexSet map_back(const IndexSet& local, const std::vector<int>& map) {
  IndexSet out;
  for (int k : local) out.push_back(map[k]);
  return out;
}

}  // namespace

ScalabilityClass classify_exact(const Coupling& R, const Measure& mu_in, const Measure& nu_in) {
  validate_instance(R, mu_in, nu_in);
  const bool balanced = is_balanced(mu_in, nu_in);
  Measure mu = mu_in, nu = nu_in;
  if (!balanced) {
    if (total_mass(mu) == 0.0 || total_mass(nu) == 0.0)
      throw InvalidInput("classify_exact: cannot normalize a zero-mass marginal");
    mu /= total_mass(mu);
    nu /= total_mass(nu);
  }
  auto tagged = [&](ScalabilityTag t, std::optional<IndexSet> w) {
    return ScalabilityClass{with_balance(t, balanced), std::move(w)};
  };

  const Coupling R0 = restrict_to_E(R, mu, nu);
  if (const int i = violating_row(R0, mu); i >= 0)
    return tagged(ScalabilityTag::NonScalable, IndexSet{i});
  if (violating_col(R0, nu) >= 0) return tagged(ScalabilityTag::NonScalable, support_of(mu));

  const Reduction red = reduce_to_full_support(R, mu, nu);
  const int n = static_cast<int>(red.row_map.size());
  if (n > kEnumerationCap)
    throw DimensionTooLarge("classify_exact: " + std::to_string(n) + " rows exceed the cap of " +
                            std::to_string(kEnumerationCap));
  // Positive entries outside supp mu x supp nu can never be charged.
  const bool lost = (R.array() > 0.0).count() != (red.R.array() > 0.0).count();

  const auto table = detail::build_subset_table(support_graph(red.R), red.mu, red.nu);
  const double tol = 1e-10 * std::max(total_mass(mu), 1e-300);
  std::optional<IndexSet> saturated;
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) {
    const double excess = table.mu_A[s] - table.nu_F[s];
    if (excess > tol)
      return tagged(ScalabilityTag::NonScalable,
                    map_back(detail::mask_indices(s), red.row_map));
    if (!saturated && excess >= -tol && table.open(s))
      saturated = map_back(detail::mask_indices(s), red.row_map);
  }
  if (saturated) return tagged(ScalabilityTag::ApproximatelyScalable, saturated);
  if (lost) return tagged(ScalabilityTag::ApproximatelyScalable, std::nullopt);
  return tagged(ScalabilityTag::Scalable, std::nullopt);
}

std::vector<Component> connected_components(const BipartiteSupport& G, const IndexSet& U,
                                            const IndexSet& V) {
  std::vector<char> seen_u(G.rows(), 0), seen_v(G.cols(), 0);
  std::vector<Component> out;
  auto explore = [&](int start, bool is_row) {
    Component c;
    std::queue<std::pair<int, bool>> q;
    q.push({start, is_row});
    (is_row ? seen_u[start] : seen_v[start]) = 1;
    while (!q.empty()) {
      auto [v, row] = q.front();
      q.pop();
      if (row) {
        c.rows.push_back(v);
        for (int j : V)
          if (!seen_v[j] && G(v, j)) seen_v[j] = 1, q.push({j, false});
      } else {
        c.cols.push_back(v);
        for (int i : U)
          if (!seen_u[i] && G(i, v)) seen_u[i] = 1, q.push({i, true});
      }
    }
    std::ranges::sort(c.rows);
    std::ranges::sort(c.cols);
    out.push_back(std::move(c));
  };
  IndexSet rows = U, cols = V;
  std::ranges::sort(rows);
  std::ranges::sort(cols);
  for (int i : rows)
    if (!seen_u[i]) explore(i, true);
  for (int j : cols)
    if (!seen_v[j]) explore(j, false);
  return out;
}

IndexSet all_indices(int n) {
  IndexSet out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace degensink
