#include "scanneal/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "scanneal/errors.hpp"
#include "scanneal/format.hpp"
#include "scanneal/rng.hpp"

namespace scanneal {

namespace {

// Seed streams per family so instances never share draws across families.
constexpr std::uint64_t kGaussianStream = 1;
constexpr std::uint64_t kBernoulliStream = 2;
constexpr std::uint64_t kMaxCutStream = 3;
constexpr std::uint64_t kTspStream = 4;

// Complete graphs allocate N(N-1)/2 couplings; keep that within memory sanity.
constexpr int kMaxCompleteVertices = 20000;

void check_complete_size(int n, const char* family) {
  if (n < 2)
    throw InvalidInputError(std::string(family) +
                            ": need at least 2 vertices");
  if (n > kMaxCompleteVertices)
    throw InvalidInputError(std::string(family) + ": " + std::to_string(n) +
                            " vertices exceeds the complete-graph cap of " +
                            std::to_string(kMaxCompleteVertices));
}

void check_probability(double p, const char* family) {
  if (!(p >= 0.0) || !(p <= 1.0))
    throw InvalidInputError(std::string(family) +
                            ": p must lie in [0, 1], got " + format_double(p));
}

double nonzero_normal(Rng& rng) {
  for (;;) {
    const double z = rng.standard_normal();
    if (z != 0.0) return z;  // zero couplings are not representable
  }
}

}  // namespace

TspInstance::TspInstance(int num_cities, std::vector<int> distances,
                         double penalty_a, double tour_weight_b)
    : n_(num_cities), d_(std::move(distances)), a_(penalty_a),
      b_(tour_weight_b) {
  if (n_ < 3) throw InvalidInputError("TspInstance: need at least 3 cities");
  if (d_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
    throw InvalidInputError("TspInstance: distance table must be n*n");
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const int dij = d_[static_cast<std::size_t>(i) * n_ + j];
      if (i == j && dij != 0)
        throw InvalidInputError("TspInstance: nonzero diagonal at city " +
                                std::to_string(i));
      if (i != j && dij <= 0)
        throw InvalidInputError("TspInstance: distance (" + std::to_string(i) +
                                ", " + std::to_string(j) +
                                ") must be positive");
      if (dij != d_[static_cast<std::size_t>(j) * n_ + i])
        throw InvalidInputError("TspInstance: asymmetric distance at (" +
                                std::to_string(i) + ", " + std::to_string(j) +
                                ")");
    }
  }
  if (!(a_ > 0.0) || !(b_ > 0.0))
    throw InvalidInputError("TspInstance: weights A and B must be positive");
}

int TspInstance::distance(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw InvalidInputError("TspInstance::distance: city index out of range");
  return d_[static_cast<std::size_t>(i) * n_ + j];
}

InstanceArtifact gen_gaussian_spin_glass(int num_vertices, std::uint64_t seed) {
  check_complete_size(num_vertices, "gaussian");
  Rng rng(derive_seed(seed, kGaussianStream, 0));
  std::vector<Coupling> couplings;
  couplings.reserve(static_cast<std::size_t>(num_vertices) *
                    (num_vertices - 1) / 2);
  for (int x = 0; x < num_vertices; ++x)
    for (int y = x + 1; y < num_vertices; ++y)
      couplings.push_back({x, y, nonzero_normal(rng)});
  InstanceMetadata meta{"gaussian", seed, {{"n", std::to_string(num_vertices)}}};
  return InstanceArtifact{IsingModel(num_vertices, std::move(couplings)),
                          std::move(meta), std::nullopt};
}

InstanceArtifact gen_bernoulli_spin_glass(int num_vertices, double p,
                                          std::uint64_t seed) {
  check_complete_size(num_vertices, "bernoulli");
  check_probability(p, "bernoulli");
  Rng rng(derive_seed(seed, kBernoulliStream, 0));
  std::vector<Coupling> couplings;
  couplings.reserve(static_cast<std::size_t>(num_vertices) *
                    (num_vertices - 1) / 2);
  for (int x = 0; x < num_vertices; ++x)
    for (int y = x + 1; y < num_vertices; ++y)
      couplings.push_back({x, y, rng.uniform01() < p ? 1.0 : -1.0});
  InstanceMetadata meta{"bernoulli",
                        seed,
                        {{"n", std::to_string(num_vertices)},
                         {"p", format_double(p)}}};
  return InstanceArtifact{IsingModel(num_vertices, std::move(couplings)),
                          std::move(meta), std::nullopt};
}

InstanceArtifact gen_max_cut(int num_vertices, double p, std::uint64_t seed) {
  check_complete_size(num_vertices, "maxcut");
  check_probability(p, "maxcut");
  Rng rng(derive_seed(seed, kMaxCutStream, 0));
  std::vector<Coupling> couplings;
  for (int x = 0; x < num_vertices; ++x)
    for (int y = x + 1; y < num_vertices; ++y)
      if (rng.uniform01() < p) couplings.push_back({x, y, -1.0});
  InstanceMetadata meta{"maxcut",
                        seed,
                        {{"n", std::to_string(num_vertices)},
                         {"p", format_double(p)}}};
  return InstanceArtifact{IsingModel(num_vertices, std::move(couplings)),
                          std::move(meta), std::nullopt};
}

InstanceArtifact gen_tsp(int num_cities, std::uint64_t seed) {
  if (num_cities < 3) throw InvalidInputError("tsp: need at least 3 cities");
  if (num_cities > 140)
    throw InvalidInputError("tsp: " + std::to_string(num_cities) +
                            " cities exceeds the encoding cap of 140");
  Rng rng(derive_seed(seed, kTspStream, 0));
  std::vector<int> d(static_cast<std::size_t>(num_cities) * num_cities, 0);
  int max_d = 0;
  for (int i = 0; i < num_cities; ++i) {
    for (int j = i + 1; j < num_cities; ++j) {
      const int dij = 1 + static_cast<int>(rng.uniform_below(100));
      d[static_cast<std::size_t>(i) * num_cities + j] = dij;
      d[static_cast<std::size_t>(j) * num_cities + i] = dij;
      max_d = std::max(max_d, dij);
    }
  }
  TspInstance tsp(num_cities, std::move(d), static_cast<double>(max_d), 1.0);
  InstanceMetadata meta{"tsp",
                        seed,
                        {{"n", std::to_string(num_cities)},
                         {"a", format_double(tsp.penalty_a())},
                         {"b", format_double(tsp.tour_weight_b())}}};
  IsingModel model = encode_tsp(tsp);
  return InstanceArtifact{std::move(model), std::move(meta), std::move(tsp)};
}

IsingModel encode_tsp(const TspInstance& tsp) {
  const int n = tsp.num_cities();
  const int num_spins = n * n;
  const double a = tsp.penalty_a();
  const double b = tsp.tour_weight_b();

  // Accumulate the 0/1 quadratic form first, then convert x = (1+s)/2 and
  // drop the constant. Map keys are canonical (i < j) pairs.
  std::map<std::pair<int, int>, double> quad;
  std::vector<double> linear(static_cast<std::size_t>(num_spins), 0.0);
  auto add_quad = [&](int i, int j, double c) {
    if (i > j) std::swap(i, j);
    quad[{i, j}] += c;
  };

  // (1 - sum_j x_{v,j})^2 per city: pairwise +2A, each indicator -A.
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < n; ++j) {
      linear[static_cast<std::size_t>(tsp.spin_index(v, j))] -= a;
      for (int k = j + 1; k < n; ++k)
        add_quad(tsp.spin_index(v, j), tsp.spin_index(v, k), 2.0 * a);
    }
  }
  // Same form per tour position.
  for (int j = 0; j < n; ++j) {
    for (int v = 0; v < n; ++v) {
      linear[static_cast<std::size_t>(tsp.spin_index(v, j))] -= a;
      for (int w = v + 1; w < n; ++w)
        add_quad(tsp.spin_index(v, j), tsp.spin_index(w, j), 2.0 * a);
    }
  }
  // Tour length: consecutive positions, cyclic.
  for (int j = 0; j < n; ++j) {
    const int jn = (j + 1) % n;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v)
          add_quad(tsp.spin_index(u, j), tsp.spin_index(v, jn),
                   b * tsp.distance(u, v));
  }

  // x_i x_j = (1 + s_i + s_j + s_i s_j) / 4 and x_i = (1 + s_i) / 2. The
  // energy convention carries minus signs on both J and h.
  std::vector<double> h(static_cast<std::size_t>(num_spins), 0.0);
  std::vector<Coupling> couplings;
  couplings.reserve(quad.size());
  for (const auto& [key, c] : quad) {
    const double quarter = c / 4.0;
    if (quarter != 0.0) couplings.push_back({key.first, key.second, -quarter});
    h[static_cast<std::size_t>(key.first)] -= quarter;
    h[static_cast<std::size_t>(key.second)] -= quarter;
  }
  for (int i = 0; i < num_spins; ++i)
    h[static_cast<std::size_t>(i)] -= linear[static_cast<std::size_t>(i)] / 2.0;

  return IsingModel(num_spins, std::move(couplings), std::move(h));
}

TourDecode decode_tour(const TspInstance& tsp, const SpinConfiguration& config) {
  const int n = tsp.num_cities();
  if (config.size() != n * n)
    throw InvalidInputError("decode_tour: configuration has " +
                            std::to_string(config.size()) + " spins, expected " +
                            std::to_string(n * n));
  TourDecode result;
  std::vector<int> row_count(static_cast<std::size_t>(n), 0);
  std::vector<int> col_count(static_cast<std::size_t>(n), 0);
  std::vector<int> city_at(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < n; ++j) {
      if (config[tsp.spin_index(v, j)] > 0) {
        ++row_count[static_cast<std::size_t>(v)];
        ++col_count[static_cast<std::size_t>(j)];
        city_at[static_cast<std::size_t>(j)] = v;
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (row_count[static_cast<std::size_t>(v)] != 1)
      result.violations.push_back(
          "city " + std::to_string(v) + " occupies " +
          std::to_string(row_count[static_cast<std::size_t>(v)]) +
          " positions");
  for (int j = 0; j < n; ++j)
    if (col_count[static_cast<std::size_t>(j)] != 1)
      result.violations.push_back(
          "position " + std::to_string(j) + " holds " +
          std::to_string(col_count[static_cast<std::size_t>(j)]) + " cities");
  if (!result.violations.empty()) return result;

  result.valid = true;
  result.order.assign(city_at.begin(), city_at.end());
  for (int j = 0; j < n; ++j)
    result.length +=
        tsp.distance(result.order[static_cast<std::size_t>(j)],
                     result.order[static_cast<std::size_t>((j + 1) % n)]);
  return result;
}

SpinConfiguration tour_config(const TspInstance& tsp,
                              std::span<const int> order) {
  const int n = tsp.num_cities();
  if (order.size() != static_cast<std::size_t>(n))
    throw InvalidInputError("tour_config: order must list every city once");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : order) {
    if (v < 0 || v >= n)
      throw InvalidInputError("tour_config: city index out of range");
    if (seen[static_cast<std::size_t>(v)])
      throw InvalidInputError("tour_config: city " + std::to_string(v) +
                              " listed twice");
    seen[static_cast<std::size_t>(v)] = true;
  }
  std::vector<std::int8_t> s(static_cast<std::size_t>(n) * n, -1);
  for (int j = 0; j < n; ++j)
    s[static_cast<std::size_t>(
        tsp.spin_index(order[static_cast<std::size_t>(j)], j))] = 1;
  return SpinConfiguration(std::move(s));
}

std::uint64_t cut_size(const IsingModel& model, const SpinConfiguration& config) {
  if (config.size() != model.num_vertices())
    throw InvalidInputError("cut_size: configuration size mismatch");
  std::uint64_t cut = 0;
  for (const auto& c : model.couplings())
    if (config[c.x] != config[c.y]) ++cut;
  return cut;
}

}  // namespace scanneal
