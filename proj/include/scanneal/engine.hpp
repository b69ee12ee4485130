#ifndef SCANNEAL_ENGINE_HPP
#define SCANNEAL_ENGINE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scanneal/ising_model.hpp"
#include "scanneal/rng.hpp"
#include "scanneal/schedule.hpp"

namespace scanneal {

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-site laws, written once and shared by the samplers, the exact kernel
// builder and the coupling diagnostics so all three agree bit for bit.
//
// Parallel heat-bath law with pinning q at a site with cavity field f and
// current spin s: P(next = t) = logistic(beta * (f + q*s) * t).
inline double pinned_local_prob(double field, double q, double spin,
                                double beta, double next_spin) {
  return logistic(beta * (field + q * spin) * next_spin);
}

// Unpinned flip probability: logistic(-beta * f * s).
inline double bare_flip_prob(double field, double spin, double beta) {
  return pinned_local_prob(field, 0.0, spin, beta, -spin);
}

// Single-site heat-bath: P(next = t) = logistic(2 * beta * f * t).
inline double heat_bath_plus_prob(double field, double beta) {
  return logistic(2.0 * beta * field);
}

// Which Markov dynamics to run, with its engine-specific parameters.
class EngineSpec {
 public:
  enum class Kind { Glauber, Sca, EpsilonSca };

  EngineSpec() = default;  // Glauber

  static EngineSpec glauber();
  // Parallel update with per-vertex pinning q_x >= 0.
  static EngineSpec sca(std::vector<double> pinning);
  // Lazy unpinned parallel update; each site resamples independently with
  // probability epsilon in (0, 1].
  static EngineSpec epsilon_sca(double epsilon);

  Kind kind() const { return kind_; }
  std::span<const double> pinning() const { return pinning_; }
  double epsilon() const { return epsilon_; }

  std::string label() const;
  // Throws InvalidInputError when the parameters cannot drive this model.
  void validate_for(const IsingModel& model) const;

 private:
  Kind kind_ = Kind::Glauber;
  std::vector<double> pinning_;
  double epsilon_ = 1.0;
};

// A chain mid-run: configuration, private generator, steps taken so far.
struct ChainState {
  SpinConfiguration config;
  Rng rng;
  std::uint64_t step_index = 0;
};

// Fresh chain with a uniformly random configuration drawn from seed.
ChainState make_chain_state(const IsingModel& model, std::uint64_t seed);

// Probability that the parallel pinned update at x draws new_spin (+1/-1),
// given the current configuration.
double sca_local_prob(const IsingModel& model, const SpinConfiguration& config,
                      int x, double q_x, double beta, int new_spin);

// Flip probability of the unpinned lazy update before the epsilon coin:
// equals sca_local_prob with q_x = 0 and new_spin = -config[x].
double epsilon_sca_flip_prob(const IsingModel& model,
                             const SpinConfiguration& config, int x,
                             double beta);

// Reusable buffers for the parallel step functions.
struct StepScratch {
  std::vector<double> spins;
  std::vector<double> fields;
  std::vector<double> next;
};

// One synchronous update of every site. Draw order is ascending vertex
// index; identical seeds give identical trajectories.
void sca_step(const IsingModel& model, ChainState& state,
              std::span<const double> pinning, double beta,
              StepScratch* scratch = nullptr);
void epsilon_sca_step(const IsingModel& model, ChainState& state,
                      double epsilon, double beta,
                      StepScratch* scratch = nullptr);

// One single-site heat-bath update at a uniformly chosen vertex.
void glauber_step(const IsingModel& model, ChainState& state, double beta);

// Outcome of one annealed run.
struct TrialRecord {
  EngineSpec engine;
  AnnealingSchedule schedule;
  std::uint64_t seed = 0;
  double min_energy = 0.0;
  SpinConfiguration best_config;
  // Step at which best_config was first reached; 0 is the initial state.
  std::uint64_t best_step = 0;
  SpinConfiguration final_config;
  double duration_seconds = 0.0;
  // Energy after every kernel application, preceded by the initial energy.
  // Filled only when requested.
  std::vector<double> energy_trace;
};

struct AnnealOptions {
  bool record_trace = false;
  // Kernel applications per schedule step; beta is held fixed within a step.
  std::uint64_t applications_per_step = 1;
};

// Run `num_steps` schedule steps of the given dynamics from a seeded random
// start. Step t uses beta_at(first_step() + t).
TrialRecord anneal(const IsingModel& model, const EngineSpec& spec,
                   const AnnealingSchedule& schedule, std::uint64_t num_steps,
                   std::uint64_t seed, const AnnealOptions& options = {});

}  // namespace scanneal

#endif
