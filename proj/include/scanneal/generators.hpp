#ifndef SCANNEAL_GENERATORS_HPP
#define SCANNEAL_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scanneal/ising_model.hpp"

namespace scanneal {

// Symmetric integer distance table with zero diagonal, plus the two encoding
// weights: A scales the one-hot constraints, B scales tour length.
class TspInstance {
 public:
  TspInstance(int num_cities, std::vector<int> distances, double penalty_a,
              double tour_weight_b);

  int num_cities() const { return n_; }
  int distance(int i, int j) const;
  double penalty_a() const { return a_; }
  double tour_weight_b() const { return b_; }
  std::span<const int> distance_table() const { return d_; }

  // Spin index of the indicator "city v sits at tour position j".
  int spin_index(int city, int position) const { return city * n_ + position; }

 private:
  int n_ = 0;
  std::vector<int> d_;  // row-major n x n
  double a_ = 0.0;
  double b_ = 0.0;
};

struct InstanceMetadata {
  std::string family;     // gaussian | bernoulli | maxcut | tsp | file
  std::uint64_t seed = 0;
  // Generator parameters as ordered key/value strings, e.g. {"p", "0.2"}.
  std::vector<std::pair<std::string, std::string>> params;
};

// A generated (or loaded) problem: the energy function plus enough context
// to interpret results. TSP instances carry their decoder data.
struct InstanceArtifact {
  IsingModel model;
  InstanceMetadata metadata;
  std::optional<TspInstance> tsp;
};

// Complete graph, couplings i.i.d. standard normal, no fields.
InstanceArtifact gen_gaussian_spin_glass(int num_vertices, std::uint64_t seed);

// Complete graph, couplings +1 with probability p else -1, no fields.
InstanceArtifact gen_bernoulli_spin_glass(int num_vertices, double p,
                                          std::uint64_t seed);

// Erdos-Renyi graph with edge probability p, every edge coupling -1.
InstanceArtifact gen_max_cut(int num_vertices, double p, std::uint64_t seed);

// Random symmetric distances in {1..100}; one-hot tour encoding with
// A = max distance and B = 1 over num_cities^2 spins.
InstanceArtifact gen_tsp(int num_cities, std::uint64_t seed);

// One-hot encoding of the tour problem as pair couplings and fields; the
// configuration-independent constant is dropped.
IsingModel encode_tsp(const TspInstance& tsp);

struct TourDecode {
  bool valid = false;
  std::vector<int> order;  // city at each position, when valid
  long long length = 0;    // closed tour length, when valid
  std::vector<std::string> violations;
};

// Reads the one-hot block; any row or column whose indicator count is not
// exactly one is reported as a violation.
TourDecode decode_tour(const TspInstance& tsp, const SpinConfiguration& config);

// Inverse of decode_tour for valid permutations.
SpinConfiguration tour_config(const TspInstance& tsp,
                              std::span<const int> order);

// Number of couplings whose endpoints disagree. For unit-weight edge models
// this is the cut induced by the +/- partition.
std::uint64_t cut_size(const IsingModel& model, const SpinConfiguration& config);

}  // namespace scanneal

#endif
