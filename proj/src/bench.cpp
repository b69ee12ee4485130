#include "scanneal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "scanneal/errors.hpp"
#include "scanneal/exact.hpp"
#include "scanneal/format.hpp"

namespace scanneal {

namespace {

using ordered_json = nlohmann::ordered_json;

// Seed streams for per-trial derivation; distinct from the generator streams.
std::uint64_t engine_stream(const EngineSpec& spec) {
  switch (spec.kind()) {
    case EngineSpec::Kind::Glauber:
      return 11;
    case EngineSpec::Kind::Sca:
      return 12;
    case EngineSpec::Kind::EpsilonSca:
      return 13;
  }
  return 0;
}

// Dynamic work pulling keeps cores busy; results land in pre-sized slots so
// the outcome is independent of scheduling.
void parallel_for(std::uint64_t count, int workers,
                  const std::function<void(std::uint64_t)>& body) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  workers = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

bool all_quarter_integers(const IsingModel& m) {
  auto quarter = [](double v) {
    const double scaled = v * 4.0;
    return std::abs(scaled) < 9e15 && scaled == std::floor(scaled);
  };
  for (const auto& c : m.couplings())
    if (!quarter(c.value)) return false;
  for (double h : m.fields())
    if (!quarter(h)) return false;
  return true;
}

// Integer-valued (or exactly representable dyadic) energies admit exact
// comparison; anything else gets a relative band around the reference.
double default_tolerance(const InstanceArtifact& artifact, double reference) {
  const std::string& family = artifact.metadata.family;
  if (family == "bernoulli" || family == "maxcut" || family == "tsp")
    return 0.0;
  if (family == "gaussian")
    return 1e-6 * std::max(1.0, std::abs(reference));
  return all_quarter_integers(artifact.model)
             ? 0.0
             : 1e-6 * std::max(1.0, std::abs(reference));
}

EnergyHistogram build_histogram(const std::vector<EngineSummary>& engines,
                                int bins,
                                std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw InvalidInputError("histogram bins must be >= 1");
  EnergyHistogram h;
  bool any = false;
  double lo = 0.0, hi = 0.0;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(lo < hi))
      throw InvalidInputError("histogram range must satisfy lo < hi");
    any = true;
  } else {
    for (const auto& e : engines) {
      for (const auto& t : e.trials) {
        if (!any) {
          lo = hi = t.min_energy;
          any = true;
        } else {
          lo = std::min(lo, t.min_energy);
          hi = std::max(hi, t.min_energy);
        }
      }
    }
    if (any && lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  if (!any) return h;  // no trials: headers-only outputs downstream

  h.lo = lo;
  h.hi = hi;
  const double width = (hi - lo) / bins;
  for (const auto& e : engines) {
    h.labels.push_back(e.label);
    std::vector<std::uint64_t> row(static_cast<std::size_t>(bins), 0);
    for (const auto& t : e.trials) {
      int idx = static_cast<int>((t.min_energy - lo) / width);
      idx = std::clamp(idx, 0, bins - 1);
      if (t.min_energy < lo || t.min_energy > hi) continue;  // explicit range
      ++row[static_cast<std::size_t>(idx)];
    }
    h.counts.push_back(std::move(row));
  }
  return h;
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

ordered_json instance_json(const InstanceArtifact& artifact) {
  ordered_json j;
  j["family"] = artifact.metadata.family;
  j["num_vertices"] = artifact.model.num_vertices();
  j["num_couplings"] = artifact.model.num_couplings();
  j["seed"] = artifact.metadata.seed;
  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : artifact.metadata.params) params[key] = value;
  j["params"] = std::move(params);
  return j;
}

ordered_json schedule_json(const AnnealingSchedule& s) {
  ordered_json j;
  switch (s.kind()) {
    case AnnealingSchedule::Kind::Exponential:
      j["kind"] = "exponential";
      j["beta0"] = s.beta0();
      j["alpha"] = s.alpha();
      break;
    case AnnealingSchedule::Kind::Logarithmic:
      j["kind"] = "logarithmic";
      j["gamma"] = s.gamma();
      break;
    case AnnealingSchedule::Kind::Constant:
      j["kind"] = "constant";
      j["beta0"] = s.beta0();
      break;
  }
  return j;
}

ordered_json reference_json(const std::optional<double>& ref,
                            const std::string& provenance, double tolerance) {
  ordered_json j;
  if (ref)
    j["min_energy"] = *ref;
  else
    j["min_energy"] = nullptr;
  j["provenance"] = provenance;
  j["success_tolerance"] = tolerance;
  return j;
}

std::filesystem::path prepare_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + out_dir.string() + ": " +
                  ec.message());
  return out_dir;
}

}  // namespace

double success_rate(std::span<const TrialRecord> trials, double reference_min,
                    double tolerance) {
  if (trials.empty())
    throw InvalidInputError("success_rate: no trials");
  if (!(tolerance >= 0.0))
    throw InvalidInputError("success_rate: tolerance must be >= 0");
  std::size_t hits = 0;
  for (const auto& t : trials)
    if (t.min_energy <= reference_min + tolerance) ++hits;
  return static_cast<double>(hits) / static_cast<double>(trials.size());
}

BenchmarkResult run_benchmark(const InstanceArtifact& artifact,
                              const std::vector<EngineSpec>& engines,
                              const AnnealingSchedule& schedule,
                              std::uint64_t trials, std::uint64_t steps,
                              std::uint64_t master_seed,
                              const BenchmarkOptions& options) {
  if (engines.empty())
    throw InvalidInputError("run_benchmark: need at least one engine");
  if (trials < 1) throw InvalidInputError("run_benchmark: trials must be >= 1");
  if (steps < 1) throw InvalidInputError("run_benchmark: steps must be >= 1");
  if (options.success_tolerance && !(*options.success_tolerance >= 0.0))
    throw InvalidInputError("run_benchmark: success tolerance must be >= 0");
  const IsingModel& model = artifact.model;
  for (const auto& spec : engines) spec.validate_for(model);

  BenchmarkResult result;
  result.num_trials = trials;
  result.num_steps = steps;
  result.master_seed = master_seed;
  result.schedule = schedule;

  // Resolve the oracle before burning compute on trials.
  std::optional<double> reference;
  switch (options.reference_policy) {
    case ReferencePolicy::Oracle:
      reference =
          brute_force_ground_states(model, options.oracle_max_vertices)
              .min_energy;
      result.reference_provenance = "oracle";
      break;
    case ReferencePolicy::Supplied:
      reference = options.supplied_reference;
      result.reference_provenance = "supplied";
      break;
    case ReferencePolicy::Empirical:
      result.reference_provenance = "empirical";
      break;
    case ReferencePolicy::None:
      result.reference_provenance = "none";
      break;
  }

  AnnealOptions anneal_options;
  anneal_options.applications_per_step = options.applications_per_step;

  for (const auto& spec : engines) {
    EngineSummary summary;
    summary.spec = spec;
    summary.label = spec.label();
    summary.trials.resize(static_cast<std::size_t>(trials));
    const std::uint64_t stream = engine_stream(spec);
    parallel_for(trials, options.workers, [&](std::uint64_t t) {
      const std::uint64_t seed = derive_seed(master_seed, stream, t);
      summary.trials[static_cast<std::size_t>(t)] =
          anneal(model, spec, schedule, steps, seed, anneal_options);
    });
    summary.min_energy = summary.trials.front().min_energy;
    double sum = 0.0;
    for (const auto& t : summary.trials) {
      summary.min_energy = std::min(summary.min_energy, t.min_energy);
      sum += t.min_energy;
    }
    summary.mean_energy = sum / static_cast<double>(trials);
    result.engines.push_back(std::move(summary));
  }

  if (options.reference_policy == ReferencePolicy::Empirical) {
    double best = result.engines.front().min_energy;
    for (const auto& e : result.engines) best = std::min(best, e.min_energy);
    reference = best;
  }
  result.reference_min = reference;
  result.success_tolerance =
      options.success_tolerance
          ? *options.success_tolerance
          : (reference ? default_tolerance(artifact, *reference) : 0.0);
  if (reference) {
    for (auto& e : result.engines)
      e.rate = success_rate(e.trials, *reference, result.success_tolerance);
  }

  result.histogram = build_histogram(result.engines, options.histogram_bins,
                                     options.histogram_range);
  return result;
}

SweepResult epsilon_sweep(const InstanceArtifact& artifact,
                          std::span<const double> epsilons,
                          const AnnealingSchedule& schedule,
                          std::uint64_t trials, std::uint64_t steps,
                          std::uint64_t master_seed,
                          const BenchmarkOptions& options) {
  if (epsilons.empty())
    throw InvalidInputError("epsilon_sweep: need at least one epsilon");
  for (double eps : epsilons) {
    if (!(eps > 0.0) || !(eps <= 1.0))
      throw InvalidInputError("epsilon_sweep: epsilon must lie in (0, 1], got " +
                              format_double(eps));
  }

  // Rates are recomputed against the pooled reference at the end, so run
  // the per-point benchmarks without a policy of their own.
  BenchmarkOptions point_options = options;
  point_options.reference_policy = ReferencePolicy::None;

  SweepResult result;
  result.num_trials = trials;
  result.num_steps = steps;
  result.master_seed = master_seed;
  result.schedule = schedule;

  std::vector<BenchmarkResult> runs;
  runs.reserve(epsilons.size());
  for (double eps : epsilons) {
    runs.push_back(run_benchmark(artifact, {EngineSpec::epsilon_sca(eps)},
                                 schedule, trials, steps, master_seed,
                                 point_options));
  }

  std::optional<double> reference;
  switch (options.reference_policy) {
    case ReferencePolicy::Oracle:
      reference =
          brute_force_ground_states(artifact.model, options.oracle_max_vertices)
              .min_energy;
      result.reference_provenance = "oracle";
      break;
    case ReferencePolicy::Supplied:
      reference = options.supplied_reference;
      result.reference_provenance = "supplied";
      break;
    case ReferencePolicy::Empirical: {
      double best = runs.front().engines.front().min_energy;
      for (const auto& r : runs)
        best = std::min(best, r.engines.front().min_energy);
      reference = best;
      result.reference_provenance = "empirical";
      break;
    }
    case ReferencePolicy::None:
      result.reference_provenance = "none";
      break;
  }
  result.reference_min = reference;
  result.success_tolerance =
      options.success_tolerance
          ? *options.success_tolerance
          : (reference ? default_tolerance(artifact, *reference) : 0.0);

  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const EngineSummary& e = runs[i].engines.front();
    SweepPoint point;
    point.epsilon = epsilons[i];
    point.min_energy = e.min_energy;
    point.mean_energy = e.mean_energy;
    if (reference)
      point.rate = success_rate(e.trials, *reference, result.success_tolerance);
    result.points.push_back(point);
  }
  return result;
}

std::vector<std::filesystem::path> emit_outputs(
    const BenchmarkResult& result, const InstanceArtifact& artifact,
    const std::filesystem::path& out_dir, OutputFormat format) {
  prepare_dir(out_dir);
  std::vector<std::filesystem::path> written;

  if (format == OutputFormat::Csv || format == OutputFormat::All) {
    const auto trials_path = out_dir / "trials.csv";
    auto out = open_for_writing(trials_path);
    out << "engine,seed,min_energy,best_step\n";
    for (const auto& e : result.engines)
      for (const auto& t : e.trials)
        out << e.label << "," << t.seed << "," << format_double(t.min_energy)
            << "," << t.best_step << "\n";
    finish_write(out, trials_path);
    written.push_back(trials_path);

    const auto hist_path = out_dir / "histogram.csv";
    auto hist = open_for_writing(hist_path);
    hist << "bin_lo,bin_hi";
    for (const auto& label : result.histogram.labels) hist << "," << label;
    hist << "\n";
    const int bins = result.histogram.bins();
    const double width =
        bins > 0 ? (result.histogram.hi - result.histogram.lo) / bins : 0.0;
    for (int b = 0; b < bins; ++b) {
      const double lo = result.histogram.lo + width * b;
      const double hi = b + 1 == bins ? result.histogram.hi
                                      : result.histogram.lo + width * (b + 1);
      hist << format_double(lo) << "," << format_double(hi);
      for (const auto& row : result.histogram.counts)
        hist << "," << row[static_cast<std::size_t>(b)];
      hist << "\n";
    }
    finish_write(hist, hist_path);
    written.push_back(hist_path);
  }

  if (format == OutputFormat::Json || format == OutputFormat::All) {
    ordered_json j;
    j["instance"] = instance_json(artifact);
    ordered_json run;
    run["trials"] = result.num_trials;
    run["steps"] = result.num_steps;
    run["seed"] = result.master_seed;
    run["schedule"] = schedule_json(result.schedule);
    j["run"] = std::move(run);
    j["reference"] = reference_json(result.reference_min,
                                    result.reference_provenance,
                                    result.success_tolerance);
    ordered_json engines = ordered_json::array();
    for (const auto& e : result.engines) {
      ordered_json ej;
      ej["label"] = e.label;
      ej["min_energy"] = e.min_energy;
      ej["mean_energy"] = e.mean_energy;
      if (e.rate)
        ej["success_rate"] = *e.rate;
      else
        ej["success_rate"] = nullptr;
      ej["trials"] = e.trials.size();
      engines.push_back(std::move(ej));
    }
    j["engines"] = std::move(engines);

    const auto summary_path = out_dir / "summary.json";
    auto out = open_for_writing(summary_path);
    out << j.dump(2) << "\n";
    finish_write(out, summary_path);
    written.push_back(summary_path);
  }
  return written;
}

std::vector<std::filesystem::path> emit_sweep_outputs(
    const SweepResult& result, const InstanceArtifact& artifact,
    const std::filesystem::path& out_dir, OutputFormat format) {
  prepare_dir(out_dir);
  std::vector<std::filesystem::path> written;

  if (format == OutputFormat::Csv || format == OutputFormat::All) {
    const auto sweep_path = out_dir / "sweep.csv";
    auto out = open_for_writing(sweep_path);
    out << "epsilon,success_rate,min_energy,mean_energy\n";
    for (const auto& p : result.points) {
      out << format_double(p.epsilon) << ","
          << (p.rate ? format_double(*p.rate) : std::string()) << ","
          << format_double(p.min_energy) << ","
          << format_double(p.mean_energy) << "\n";
    }
    finish_write(out, sweep_path);
    written.push_back(sweep_path);
  }

  if (format == OutputFormat::Json || format == OutputFormat::All) {
    ordered_json j;
    j["instance"] = instance_json(artifact);
    ordered_json run;
    run["trials"] = result.num_trials;
    run["steps"] = result.num_steps;
    run["seed"] = result.master_seed;
    run["schedule"] = schedule_json(result.schedule);
    j["run"] = std::move(run);
    j["reference"] = reference_json(result.reference_min,
                                    result.reference_provenance,
                                    result.success_tolerance);
    ordered_json points = ordered_json::array();
    for (const auto& p : result.points) {
      ordered_json pj;
      pj["epsilon"] = p.epsilon;
      if (p.rate)
        pj["success_rate"] = *p.rate;
      else
        pj["success_rate"] = nullptr;
      pj["min_energy"] = p.min_energy;
      pj["mean_energy"] = p.mean_energy;
      points.push_back(std::move(pj));
    }
    j["points"] = std::move(points);

    const auto json_path = out_dir / "sweep.json";
    auto out = open_for_writing(json_path);
    out << j.dump(2) << "\n";
    finish_write(out, json_path);
    written.push_back(json_path);
  }
  return written;
}

}  // namespace scanneal
