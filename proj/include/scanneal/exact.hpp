#ifndef SCANNEAL_EXACT_HPP
#define SCANNEAL_EXACT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scanneal/engine.hpp"
#include "scanneal/ising_model.hpp"

namespace scanneal {

// Configuration <-> integer code: bit x holds (s_x + 1)/2, vertex 0 in the
// least significant bit.
std::uint64_t config_code(const SpinConfiguration& config);
SpinConfiguration config_from_code(int num_vertices, std::uint64_t code);

struct GroundStateSet {
  int num_vertices = 0;
  double min_energy = 0.0;
  std::vector<std::uint64_t> states;  // configuration codes, ascending

  // Uniform distribution over the ground states, indexed by code.
  // Only sensible for small num_vertices (allocates 2^N doubles).
  std::vector<double> uniform_distribution() const;
};

// Exhaustive minimization via a Gray-code walk with incremental energies,
// then an exact re-evaluation of the shortlisted candidates so ties are
// decided by full-precision energies. Refuses n > max_vertices.
GroundStateSet brute_force_ground_states(const IsingModel& model,
                                         int max_vertices = 30);

// Dense transition matrix over all 2^N configurations.
struct ExactKernel {
  int num_vertices = 0;
  std::size_t dim = 0;
  EngineSpec spec;
  double beta = 0.0;
  std::vector<double> probs;  // row-major, probs[sigma * dim + tau]

  std::span<const double> row(std::uint64_t sigma) const {
    return {probs.data() + sigma * dim, dim};
  }
  double entry(std::uint64_t sigma, std::uint64_t tau) const {
    return probs[sigma * dim + tau];
  }
};

ExactKernel build_exact_kernel(const IsingModel& model, const EngineSpec& spec,
                               double beta, int max_vertices = 12);

struct StationaryResult {
  std::vector<double> distribution;
  std::uint64_t iterations = 0;
};

// Fixed point of mu -> mu P by iteration from uniform, stopping when
// consecutive iterates are closer than tol in total variation.
StationaryResult stationary_distribution(const ExactKernel& kernel,
                                         double tol = 1e-13,
                                         std::uint64_t max_iterations = 1000000);

double tv_distance(std::span<const double> p, std::span<const double> q);

struct MixingBound {
  double r = 0.0;        // per-step contraction factor
  bool applicable = false;  // r < 1
  std::uint64_t t_bound = 0;  // steps to reach tv <= delta, when applicable
};

// Contraction factor of the pinned parallel chain:
//   r = max_x ( tanh(beta q_x / 2) + sum_y tanh(beta |J_{x,y}| / 2) ).
MixingBound sca_mixing_bound(const IsingModel& model,
                             std::span<const double> pinning, double beta,
                             double delta);

// Contraction factor of the lazy unpinned parallel chain:
//   r = (1 - eps) + eps * max_x sum_y tanh(beta |J_{x,y}| / 2).
MixingBound epsilon_sca_mixing_bound(const IsingModel& model, double epsilon,
                                     double beta, double delta);

struct MixingReport {
  MixingBound bound;
  double delta = 0.0;
  std::uint64_t stationary_iterations = 0;
  // Worst total variation to the stationary law over all point-mass starts
  // after t_bound steps. Empty when the bound is inapplicable.
  std::optional<double> tv_after_bound;
  bool pass = false;  // tv_after_bound <= delta
};

// Checks the predicted mixing time against the exact kernel. Only the two
// parallel engines carry a bound; Glauber input is rejected.
MixingReport verify_mixing(const IsingModel& model, const EngineSpec& spec,
                           double beta, double delta, int max_vertices = 10);

// One-step coupling disagreement between config and config with x flipped:
//   |p(config, x) - p(flipped, x)| + sum_{y ~ x} |p(config, y) - p(flipped, y)|
// where p(c, y) is the per-site probability of drawing +1 at y. For the lazy
// chain the x term equals 1 - epsilon identically.
double coupling_disagreement(const IsingModel& model, const EngineSpec& spec,
                             double beta, const SpinConfiguration& config,
                             int x);

}  // namespace scanneal

#endif
