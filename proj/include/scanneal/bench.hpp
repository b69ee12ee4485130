#ifndef SCANNEAL_BENCH_HPP
#define SCANNEAL_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scanneal/engine.hpp"
#include "scanneal/generators.hpp"
#include "scanneal/schedule.hpp"

namespace scanneal {

// Where the success reference energy comes from.
enum class ReferencePolicy {
  Empirical,  // best energy seen across all engines in this run
  Oracle,     // exhaustive ground-state search
  Supplied,   // caller-provided value
  None,       // no reference, no success rates
};

struct BenchmarkOptions {
  int workers = 0;  // 0 = hardware concurrency
  int histogram_bins = 50;
  std::optional<std::pair<double, double>> histogram_range;
  ReferencePolicy reference_policy = ReferencePolicy::Empirical;
  double supplied_reference = 0.0;
  // Absolute tolerance override. Default: 0 for integer-valued energy
  // families, 1e-6 relative to the reference otherwise.
  std::optional<double> success_tolerance;
  int oracle_max_vertices = 30;
  std::uint64_t applications_per_step = 1;
};

struct EngineSummary {
  EngineSpec spec;
  std::string label;
  std::vector<TrialRecord> trials;
  double min_energy = 0.0;   // best over trials
  double mean_energy = 0.0;  // mean of per-trial minima
  std::optional<double> rate;  // success rate, when a reference exists
};

struct EnergyHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> labels;                  // one per engine
  std::vector<std::vector<std::uint64_t>> counts;   // [engine][bin]

  int bins() const {
    return counts.empty() ? 0 : static_cast<int>(counts.front().size());
  }
};

struct BenchmarkResult {
  std::vector<EngineSummary> engines;
  EnergyHistogram histogram;
  std::optional<double> reference_min;
  std::string reference_provenance;  // oracle | supplied | empirical | none
  double success_tolerance = 0.0;
  std::uint64_t num_trials = 0;
  std::uint64_t num_steps = 0;
  std::uint64_t master_seed = 0;
  AnnealingSchedule schedule;
};

// Anneal every engine for `trials` independent runs of `steps` steps each.
// Trial t of an engine uses a seed derived from (master_seed, engine kind,
// t), so growing the trial count leaves earlier trials untouched and the
// result does not depend on worker scheduling.
BenchmarkResult run_benchmark(const InstanceArtifact& artifact,
                              const std::vector<EngineSpec>& engines,
                              const AnnealingSchedule& schedule,
                              std::uint64_t trials, std::uint64_t steps,
                              std::uint64_t master_seed,
                              const BenchmarkOptions& options = {});

// Fraction of trials with min_energy <= reference_min + tolerance.
double success_rate(std::span<const TrialRecord> trials, double reference_min,
                    double tolerance);

struct SweepPoint {
  double epsilon = 0.0;
  double min_energy = 0.0;
  double mean_energy = 0.0;
  std::optional<double> rate;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> reference_min;
  std::string reference_provenance;
  double success_tolerance = 0.0;
  std::uint64_t num_trials = 0;
  std::uint64_t num_steps = 0;
  std::uint64_t master_seed = 0;
  AnnealingSchedule schedule;
};

// One lazy-engine benchmark per epsilon, identical seeds across points.
// With the empirical policy the reference pools every point's best energy,
// so rates across the sweep are comparable.
SweepResult epsilon_sweep(const InstanceArtifact& artifact,
                          std::span<const double> epsilons,
                          const AnnealingSchedule& schedule,
                          std::uint64_t trials, std::uint64_t steps,
                          std::uint64_t master_seed,
                          const BenchmarkOptions& options = {});

enum class OutputFormat { Csv, Json, All };

// Writes trials.csv, histogram.csv and summary.json (subset per format)
// into out_dir, creating it if needed. Output bytes depend only on the
// result contents, never on wall-clock times or worker count. Returns the
// paths written.
std::vector<std::filesystem::path> emit_outputs(
    const BenchmarkResult& result, const InstanceArtifact& artifact,
    const std::filesystem::path& out_dir, OutputFormat format = OutputFormat::All);

// Writes sweep.csv and sweep.json, same conventions as emit_outputs.
std::vector<std::filesystem::path> emit_sweep_outputs(
    const SweepResult& result, const InstanceArtifact& artifact,
    const std::filesystem::path& out_dir, OutputFormat format = OutputFormat::All);

}  // namespace scanneal

#endif
