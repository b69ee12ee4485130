#ifndef SCANNEAL_ISING_MODEL_HPP
#define SCANNEAL_ISING_MODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "scanneal/rng.hpp"

namespace scanneal {

// One +/-1 spin per vertex. Value semantics; no model reference kept.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  explicit SpinConfiguration(std::vector<std::int8_t> spins);

  static SpinConfiguration uniform_random(int num_vertices, Rng& rng);
  static SpinConfiguration constant(int num_vertices, std::int8_t spin);

  int size() const { return static_cast<int>(spins_.size()); }
  std::int8_t operator[](int x) const {
    return spins_[static_cast<std::size_t>(x)];
  }
  void flip(int x) {
    spins_[static_cast<std::size_t>(x)] =
        static_cast<std::int8_t>(-spins_[static_cast<std::size_t>(x)]);
  }
  void set(int x, std::int8_t spin);
  std::span<const std::int8_t> spins() const { return spins_; }

  bool operator==(const SpinConfiguration&) const = default;

 private:
  std::vector<std::int8_t> spins_;
};

struct Coupling {
  int x = 0;
  int y = 0;
  double value = 0.0;
};

// Pair interaction energy with local fields:
//   H(s) = -1/2 sum_{x,y} J_{x,y} s_x s_y  -  sum_x h_x s_x
// with J symmetric, zero diagonal. Couplings are stored once per unordered
// pair (canonical x < y) plus a per-vertex adjacency view for O(deg) cavity
// fields. Immutable after construction; safe to share across threads.
class IsingModel {
 public:
  // couplings: one entry per unordered pair, any order, x != y, value != 0,
  // no duplicate pair. fields: length num_vertices, or empty for all-zero.
  IsingModel(int num_vertices, std::vector<Coupling> couplings,
             std::vector<double> fields = {});

  int num_vertices() const { return n_; }
  std::size_t num_couplings() const { return couplings_.size(); }
  const std::vector<Coupling>& couplings() const { return couplings_; }

  std::span<const double> fields() const { return fields_; }
  double field(int x) const { return fields_[static_cast<std::size_t>(x)]; }

  std::span<const std::int32_t> neighbor_indices(int x) const;
  std::span<const double> neighbor_weights(int x) const;

  // sum_y |J_{x,y}|
  double coupling_magnitude_sum(int x) const {
    return abs_row_sum_[static_cast<std::size_t>(x)];
  }
  double max_coupling_magnitude_sum() const;

  double energy(const SpinConfiguration& config) const;

  // Cavity field at x: sum_y J_{x,y} s_y + h_x.
  double cavity_field(const SpinConfiguration& config, int x) const;

  // H(config with x flipped) - H(config) = 2 s_x * cavity_field(config, x).
  double flip_delta(const SpinConfiguration& config, int x) const;

  // Largest eigenvalue of the matrix [-J]. Power iteration with a
  // deterministic start; falls back to a dense Jacobi solve up to 64
  // vertices, beyond that failure to converge raises NumericalError.
  double largest_eigenvalue() const;

 private:
  void check_vertex(int x, const char* op) const;

  int n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<double> fields_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::int32_t> nbr_index_;
  std::vector<double> nbr_weight_;
  std::vector<double> abs_row_sum_;
};

// Gamma = sum_x (q_x + |h_x| + sum_y |J_{x,y}|). pinning must have one
// non-negative entry per vertex.
double gamma_total(const IsingModel& model, std::span<const double> pinning);

std::vector<double> homogeneous_pinning(const IsingModel& model, double q);

// Weakest homogeneous pinning with guaranteed equilibrium behaviour:
// q_x = max(largest_eigenvalue, 0) / 2 everywhere.
std::vector<double> auto_pinning(const IsingModel& model);

}  // namespace scanneal

#endif
