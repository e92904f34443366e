#include "degensink/experiments.hpp"

#include "degensink/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace degensink {

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  // Uniform on [0, 1) from the top 53 bits.
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 gen_;
};

void check_override(const std::optional<Vec>& v, int n, const char* name) {
  if (!v) return;
  if (v->size() != n)
    throw InvalidInput(std::string("gen_instance: ") + name + " has the wrong length");
  validate_measure(*v, name);
}

Instance upper_triangular(const InstanceSpec& s) {
  Instance inst;
  inst.R = Coupling::Zero(s.n_rows, s.n_cols);
  for (int i = 0; i < s.n_rows; ++i)
    for (int j = i; j < s.n_cols; ++j) inst.R(i, j) = 1.0;
  check_override(s.mu, s.n_rows, "mu");
  check_override(s.nu, s.n_cols, "nu");
  inst.mu = s.mu.value_or(Vec::Constant(s.n_rows, 2.0));
  inst.nu = s.nu.value_or(Vec::Constant(s.n_cols, 2.0));
  return inst;
}

Instance staircase_blocks(const InstanceSpec& s) {
  const int N = s.n_rows, K = s.n_blocks;
  if (s.n_cols != N) throw InvalidInput("gen_instance: staircase instances are square");
  if (K < 1 || K > N) throw InvalidInput("gen_instance: need 1 <= blocks <= n");
  const auto theta = staircase_thetas(K);
  std::vector<int> start(K + 1, 0);
  for (int k = 0; k < K; ++k) start[k + 1] = start[k] + N / K + (k < N % K ? 1 : 0);

  Uniform rng(s.seed);
  Vec w(N), v(N);
  for (int i = 0; i < N; ++i) w(i) = rng.in(0.5, 1.5);
  for (int j = 0; j < N; ++j) v(j) = rng.in(0.5, 1.5);

  Instance inst;
  inst.R = Coupling::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) inst.R(i, j) = 1.0;
  BipartiteSupport expected(N, N);
  Vec row = Vec::Zero(N), col = Vec::Zero(N);
  std::vector<double> block_mass(K, 0.0);
  for (int k = 0; k < K; ++k)
    for (int i = start[k]; i < start[k + 1]; ++i)
      for (int j = i; j < start[k + 1]; ++j) {
        const double t = w(i) * v(j);
        row(i) += t;
        col(j) += t;
        block_mass[k] += t;
        expected.set(i, j, true);
      }
  // Blocks with theta < 1 share one scale so the total masses agree.
  double s_plus = 0.0, s_minus = 0.0;
  for (int k = 0; k < K; ++k) {
    if (theta[k] >= 1.0)
      s_plus += block_mass[k] * (1.0 - 1.0 / theta[k]);
    else
      s_minus += block_mass[k] * (1.0 / theta[k] - 1.0);
  }
  const double c_low = s_minus > 0.0 ? s_plus / s_minus : 1.0;
  inst.mu.resize(N);
  inst.nu.resize(N);
  for (int k = 0; k < K; ++k) {
    const double c = theta[k] >= 1.0 ? 1.0 : c_low;
    for (int i = start[k]; i < start[k + 1]; ++i) {
      inst.mu(i) = c * row(i);
      inst.nu(i) = c / theta[k] * col(i);
    }
  }
  inst.nu *= inst.mu.sum() / inst.nu.sum();
  inst.expected_support = std::move(expected);
  return inst;
}

Instance random_sparse(const InstanceSpec& s) {
  if (!(s.density > 0.0 && s.density <= 1.0))
    throw InvalidInput("gen_instance: density must lie in (0, 1]");
  Uniform rng(s.seed);
  Instance inst;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    inst.R = Coupling::Zero(s.n_rows, s.n_cols);
    for (int i = 0; i < s.n_rows; ++i)
      for (int j = 0; j < s.n_cols; ++j)
        if (rng.next() < s.density) inst.R(i, j) = rng.in(0.5, 1.5);
    const bool rows_ok = (inst.R.rowwise().sum().array() > 0.0).all();
    const bool cols_ok = (inst.R.colwise().sum().array() > 0.0).all();
    if (!rows_ok || !cols_ok) continue;
    inst.mu.resize(s.n_rows);
    inst.nu.resize(s.n_cols);
    for (int i = 0; i < s.n_rows; ++i) inst.mu(i) = rng.in(0.5, 1.5);
    for (int j = 0; j < s.n_cols; ++j) inst.nu(j) = rng.in(0.5, 1.5);
    inst.nu *= inst.mu.sum() / inst.nu.sum();
    return inst;
  }
  throw InvalidInput("gen_instance: no random mask without empty rows or columns in 1000 tries");
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T out{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw InvalidInput("instance spec: bad value for " + key + ": '" + text + "'");
  return out;
}

Vec parse_list(const std::string& key, const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) xs.push_back(parse_number<double>(key, item));
  if (xs.empty()) throw InvalidInput("instance spec: empty list for " + key);
  return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

}  // namespace

std::vector<double> staircase_thetas(int n_blocks) {
  if (n_blocks < 1) throw InvalidInput("staircase_thetas: need at least one block");
  if (n_blocks == 1) return {1.0};
  std::vector<double> t;
  for (int k = 1; k <= n_blocks; ++k) t.push_back(1.0 + (k % 2 == 0 ? 0.5 : -0.5) / k);
  std::ranges::sort(t);
  return t;
}

Instance gen_instance(const InstanceSpec& spec) {
  if (spec.n_rows < 1 || spec.n_cols < 1)
    throw InvalidInput("gen_instance: dimensions must be positive");
  switch (spec.kind) {
    case InstanceKind::UpperTriangularOnes: return upper_triangular(spec);
    case InstanceKind::StaircaseBlocks: return staircase_blocks(spec);
    case InstanceKind::RandomSparse: return random_sparse(spec);
  }
  throw InvalidInput("gen_instance: unknown kind");
}

InstanceSpec parse_instance_spec(const std::string& text) {
  InstanceSpec s;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw InvalidInput("instance spec: expected key=value, got '" + field + "'");
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "kind") {
      if (val == "triu")
        s.kind = InstanceKind::UpperTriangularOnes;
      else if (val == "staircase")
        s.kind = InstanceKind::StaircaseBlocks;
      else if (val == "random")
        s.kind = InstanceKind::RandomSparse;
      else
        throw InvalidInput("instance spec: unknown kind '" + val + "'");
    } else if (key == "n") {
      s.n_rows = s.n_cols = parse_number<int>(key, val);
    } else if (key == "rows") {
      s.n_rows = parse_number<int>(key, val);
    } else if (key == "cols") {
      s.n_cols = parse_number<int>(key, val);
    } else if (key == "blocks") {
      s.n_blocks = parse_number<int>(key, val);
    } else if (key == "density") {
      s.density = parse_number<double>(key, val);
    } else if (key == "seed") {
      s.seed = parse_number<std::uint64_t>(key, val);
    } else if (key == "mu") {
      s.mu = parse_list(key, val);
    } else if (key == "nu") {
      s.nu = parse_list(key, val);
    } else {
      throw InvalidInput("instance spec: unknown key '" + key + "'");
    }
  }
  return s;
}

Instance appendix_a_instance() {
  InstanceSpec s;
  s.mu = Vec::Constant(3, 2.0);
  Vec nu(3);
  nu << 2.0, 3.0, 1.0;
  s.nu = nu;
  return gen_instance(s);
}

}  // namespace degensink
