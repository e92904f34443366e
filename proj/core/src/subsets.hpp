#pragma once

// Subset tables for the enumeration-based routines. Row subsets of a local
// problem are bitmasks over its n rows; forward images are column bitsets.

#include "degensink/types.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace degensink::detail {

struct SubsetTable {
  int n = 0;
  int words = 0;
  std::vector<std::uint64_t> image;  // 2^n blocks of `words` words
  std::vector<double> mu_A;
  std::vector<double> nu_F;

  const std::uint64_t* image_of(std::uint32_t mask) const {
    return image.data() + static_cast<size_t>(mask) * words;
  }

  // Whether a row outside `mask` has an edge into F(mask).
  bool open(std::uint32_t mask) const {
    const std::uint64_t* f = image_of(mask);
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) continue;
      const std::uint64_t* g = image_of(1u << i);
      for (int w = 0; w < words; ++w)
        if (f[w] & g[w]) return true;
    }
    return false;
  }

  IndexSet image_indices(std::uint32_t mask) const {
    IndexSet out;
    const std::uint64_t* f = image_of(mask);
    for (int w = 0; w < words; ++w)
      for (std::uint64_t x = f[w]; x; x &= x - 1) out.push_back(w * 64 + std::countr_zero(x));
    return out;
  }
};

inline IndexSet mask_indices(std::uint32_t mask) {
  IndexSet out;
  for (std::uint32_t x = mask; x; x &= x - 1) out.push_back(std::countr_zero(x));
  return out;
}

// G is the local support graph; mu, nu the local marginals. Caller checks
// the row count against the enumeration cap.
inline SubsetTable build_subset_table(const BipartiteSupport& G, const Vec& mu, const Vec& nu) {
  SubsetTable t;
  t.n = G.rows();
  const int m = G.cols();
  t.words = (m + 63) / 64;
  const size_t count = size_t{1} << t.n;
  t.image.assign(count * t.words, 0);
  t.mu_A.assign(count, 0.0);
  t.nu_F.assign(count, 0.0);
  for (int i = 0; i < t.n; ++i) {
    std::uint64_t* f = t.image.data() + (size_t{1} << i) * t.words;
    for (int j = 0; j < m; ++j)
      if (G(i, j)) f[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  for (size_t s = 1; s < count; ++s) {
    const int low = std::countr_zero(s);
    const size_t rest = s & (s - 1);
    t.mu_A[s] = t.mu_A[rest] + mu(low);
    if (rest == 0) continue;
    std::uint64_t* f = t.image.data() + s * t.words;
    const std::uint64_t* a = t.image.data() + rest * t.words;
    const std::uint64_t* b = t.image.data() + (size_t{1} << low) * t.words;
    for (int w = 0; w < t.words; ++w) f[w] = a[w] | b[w];
  }
  for (size_t s = 1; s < count; ++s) {
    const std::uint64_t* f = t.image.data() + s * t.words;
    double acc = 0.0;
    for (int w = 0; w < t.words; ++w)
      for (std::uint64_t x = f[w]; x; x &= x - 1) acc += nu(w * 64 + std::countr_zero(x));
    t.nu_F[s] = acc;
  }
  return t;
}

}  // namespace degensink::detail
