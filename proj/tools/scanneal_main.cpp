#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scanneal/bench.hpp"
#include "scanneal/engine.hpp"
#include "scanneal/errors.hpp"
#include "scanneal/exact.hpp"
#include "scanneal/format.hpp"
#include "scanneal/generators.hpp"
#include "scanneal/instance_io.hpp"
#include "scanneal/schedule.hpp"

namespace {

using namespace scanneal;
using ordered_json = nlohmann::ordered_json;

std::string default_out_dir() {
  const char* env = std::getenv("SCANNEAL_OUT_DIR");
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string(".");
}

std::vector<double> resolve_pinning(const IsingModel& model,
                                    const std::string& token) {
  if (token == "auto") return auto_pinning(model);
  return homogeneous_pinning(model, parse_double(token));
}

// "exp" and "const" come straight from the flags; "log" derives its rate
// from the instance and the pinning in force, warning on weak pinning.
AnnealingSchedule resolve_schedule(const std::string& kind, double beta0,
                                   double alpha, const IsingModel& model,
                                   const std::string& pinning_token) {
  if (kind == "exp") return AnnealingSchedule::exponential(beta0, alpha);
  if (kind == "const") return AnnealingSchedule::constant(beta0);
  auto log = make_log_schedule(model, resolve_pinning(model, pinning_token));
  if (!log.warning.empty()) std::cerr << "warning: " << log.warning << "\n";
  return log.schedule;
}

std::vector<EngineSpec> resolve_engines(const std::vector<std::string>& names,
                                        double epsilon,
                                        const std::string& pinning_token,
                                        const IsingModel& model) {
  std::vector<EngineSpec> specs;
  for (const auto& name : names) {
    if (name == "glauber") {
      specs.push_back(EngineSpec::glauber());
    } else if (name == "sca") {
      specs.push_back(EngineSpec::sca(resolve_pinning(model, pinning_token)));
    } else {
      specs.push_back(EngineSpec::epsilon_sca(epsilon));
    }
  }
  return specs;
}

void apply_reference(const std::string& token, BenchmarkOptions& options) {
  if (token == "empirical") {
    options.reference_policy = ReferencePolicy::Empirical;
  } else if (token == "oracle") {
    options.reference_policy = ReferencePolicy::Oracle;
  } else {
    options.reference_policy = ReferencePolicy::Supplied;
    options.supplied_reference = parse_double(token);
  }
}

OutputFormat resolve_format(const std::string& token) {
  if (token == "csv") return OutputFormat::Csv;
  if (token == "json") return OutputFormat::Json;
  return OutputFormat::All;
}

std::string spin_string(const SpinConfiguration& config) {
  std::string s;
  s.reserve(static_cast<std::size_t>(config.size()));
  for (int x = 0; x < config.size(); ++x) s += config[x] > 0 ? '+' : '-';
  return s;
}

void write_json_file(const ordered_json& j, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

struct GenerateArgs {
  std::string family;
  int size = 0;
  double p = 0.5;
  std::uint64_t seed = 1;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  InstanceArtifact inst = [&] {
    if (a.family == "gaussian") return gen_gaussian_spin_glass(a.size, a.seed);
    if (a.family == "bernoulli")
      return gen_bernoulli_spin_glass(a.size, a.p, a.seed);
    if (a.family == "maxcut") return gen_max_cut(a.size, a.p, a.seed);
    return gen_tsp(a.size, a.seed);
  }();
  std::filesystem::path out = a.out;
  if (out.empty()) {
    out = std::filesystem::path(default_out_dir()) /
          (a.family + "-" + std::to_string(a.size) + "-" +
           std::to_string(a.seed) + ".txt");
  }
  save_instance(inst, out);
  std::cout << "wrote " << out.string() << " (" << inst.model.num_vertices()
            << " vertices, " << inst.model.num_couplings() << " couplings)\n";
  return 0;
}

struct RunArgs {
  std::string instance;
  std::vector<std::string> engines{"esca"};
  double epsilon = 0.5;
  std::string pinning = "auto";
  std::string schedule = "exp";
  double beta0 = 1e-3;
  double alpha = 1e-3;
  std::uint64_t trials = 1000;
  std::uint64_t steps = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir();
  std::string format = "all";
  std::string reference = "empirical";
  int bins = 50;
  int workers = 0;
  std::uint64_t sweeps_per_step = 1;
  std::vector<double> epsilons;  // sweep only
};

int run_run(const RunArgs& a) {
  auto inst = load_instance(a.instance);
  auto schedule =
      resolve_schedule(a.schedule, a.beta0, a.alpha, inst.model, a.pinning);
  BenchmarkOptions options;
  options.workers = a.workers;
  options.histogram_bins = a.bins;
  options.applications_per_step = a.sweeps_per_step;
  apply_reference(a.reference, options);

  auto engines = resolve_engines(a.engines, a.epsilon, a.pinning, inst.model);
  auto result = run_benchmark(inst, engines, schedule, a.trials, a.steps,
                              a.seed, options);
  auto written =
      emit_outputs(result, inst, a.out_dir, resolve_format(a.format));

  if (result.reference_min) {
    std::cout << "reference " << format_double(*result.reference_min) << " ("
              << result.reference_provenance << ", tolerance "
              << format_double(result.success_tolerance) << ")\n";
  }
  for (const auto& e : result.engines) {
    std::cout << e.label << ": min " << format_double(e.min_energy)
              << ", mean " << format_double(e.mean_energy);
    if (e.rate) std::cout << ", success " << format_double(*e.rate);
    std::cout << "\n";
  }
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int run_sweep(const RunArgs& a) {
  auto inst = load_instance(a.instance);
  auto schedule =
      resolve_schedule(a.schedule, a.beta0, a.alpha, inst.model, a.pinning);
  BenchmarkOptions options;
  options.workers = a.workers;
  options.histogram_bins = a.bins;
  options.applications_per_step = a.sweeps_per_step;
  apply_reference(a.reference, options);

  auto result = epsilon_sweep(inst, a.epsilons, schedule, a.trials, a.steps,
                              a.seed, options);
  auto written =
      emit_sweep_outputs(result, inst, a.out_dir, resolve_format(a.format));

  if (result.reference_min) {
    std::cout << "reference " << format_double(*result.reference_min) << " ("
              << result.reference_provenance << ", tolerance "
              << format_double(result.success_tolerance) << ")\n";
  }
  for (const auto& p : result.points) {
    std::cout << "epsilon " << format_double(p.epsilon) << ": min "
              << format_double(p.min_energy) << ", mean "
              << format_double(p.mean_energy);
    if (p.rate) std::cout << ", success " << format_double(*p.rate);
    std::cout << "\n";
  }
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

struct VerifyArgs {
  std::string instance;
  std::vector<std::string> engines{"sca", "esca"};
  double beta = 0.1;
  double delta = 0.01;
  double epsilon = 0.5;
  std::string pinning = "auto";
  int max_vertices = 10;
  std::string out_dir = default_out_dir();
};

int run_verify(const VerifyArgs& a) {
  auto inst = load_instance(a.instance);
  auto engines =
      resolve_engines(a.engines, a.epsilon, a.pinning, inst.model);

  ordered_json j;
  j["instance"] = a.instance;
  j["beta"] = a.beta;
  j["delta"] = a.delta;
  ordered_json rows = ordered_json::array();
  bool any_failed = false;
  for (const auto& spec : engines) {
    auto report =
        verify_mixing(inst.model, spec, a.beta, a.delta, a.max_vertices);
    std::cout << spec.label() << ": r " << format_double(report.bound.r);
    ordered_json row;
    row["engine"] = spec.label();
    row["r"] = report.bound.r;
    row["applicable"] = report.bound.applicable;
    if (report.bound.applicable) {
      std::cout << ", t_bound " << report.bound.t_bound << ", tv "
                << format_double(*report.tv_after_bound) << " ("
                << (report.pass ? "pass" : "FAIL") << ")\n";
      row["t_bound"] = report.bound.t_bound;
      row["stationary_iterations"] = report.stationary_iterations;
      row["tv_after_bound"] = *report.tv_after_bound;
      row["pass"] = report.pass;
      if (!report.pass) any_failed = true;
    } else {
      std::cout << " (no contraction, bound not applicable)\n";
    }
    rows.push_back(std::move(row));
  }
  j["engines"] = std::move(rows);
  const auto path = std::filesystem::path(a.out_dir) / "verify.json";
  write_json_file(j, path);
  std::cout << "wrote " << path.string() << "\n";
  return any_failed ? 3 : 0;
}

struct ExactArgs {
  std::string instance;
  int cap = 30;
  int max_states = 64;
  std::string out_dir = default_out_dir();
};

int run_exact(const ExactArgs& a) {
  auto inst = load_instance(a.instance);
  auto gs = brute_force_ground_states(inst.model, a.cap);

  std::cout << "min energy " << format_double(gs.min_energy) << ", "
            << gs.states.size() << " ground state"
            << (gs.states.size() == 1 ? "" : "s") << "\n";
  ordered_json j;
  j["instance"] = a.instance;
  j["num_vertices"] = gs.num_vertices;
  j["min_energy"] = gs.min_energy;
  j["num_ground_states"] = gs.states.size();
  ordered_json states = ordered_json::array();
  std::size_t shown = 0;
  for (auto code : gs.states) {
    if (shown == static_cast<std::size_t>(a.max_states)) break;
    const auto s = spin_string(config_from_code(gs.num_vertices, code));
    std::cout << "  " << s << "\n";
    states.push_back(s);
    ++shown;
  }
  if (shown < gs.states.size())
    std::cout << "  ... " << gs.states.size() - shown << " more\n";
  j["states"] = std::move(states);
  j["states_truncated"] = shown < gs.states.size();
  const auto path = std::filesystem::path(a.out_dir) / "exact.json";
  write_json_file(j, path);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annealed Ising dynamics: generators, samplers, exact checks"};
  app.set_config("--config");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a random instance");
  generate->configurable()->fallthrough();
  generate->add_option("--family", gen.family, "instance family")
      ->required()
      ->check(CLI::IsMember({"gaussian", "bernoulli", "maxcut", "tsp"}));
  generate->add_option("--size", gen.size,
                       "vertex count (cities for the tsp family)")
      ->required();
  generate->add_option("--p", gen.p,
                       "+1 probability (bernoulli) or edge probability (maxcut)");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen.out,
                       "output path (default <family>-<size>-<seed>.txt)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "benchmark engines on an instance");
  run_cmd->configurable()->fallthrough();
  RunArgs sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "benchmark the lazy engine across epsilons");
  sweep_cmd->configurable()->fallthrough();
  auto add_run_options = [](CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--instance", a.instance, "instance file")->required();
    cmd->add_option("--epsilon", a.epsilon, "laziness for esca engines");
    cmd->add_option("--pinning", a.pinning,
                    "per-vertex pinning: 'auto' or a number");
    cmd->add_option("--schedule", a.schedule, "annealing schedule")
        ->check(CLI::IsMember({"exp", "log", "const"}));
    cmd->add_option("--beta0", a.beta0, "initial (or constant) beta");
    cmd->add_option("--alpha", a.alpha, "exponential growth rate");
    cmd->add_option("--trials", a.trials, "independent trials per engine");
    cmd->add_option("--steps", a.steps, "schedule steps per trial");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--out-dir", a.out_dir, "output directory");
    cmd->add_option("--format", a.format, "which outputs to write")
        ->check(CLI::IsMember({"csv", "json", "all"}));
    cmd->add_option("--reference", a.reference,
                    "'empirical', 'oracle', or an energy value");
    cmd->add_option("--bins", a.bins, "histogram bins");
    cmd->add_option("--workers", a.workers, "worker threads (0 = all cores)");
    cmd->add_option("--sweeps-per-step", a.sweeps_per_step,
                    "kernel applications per schedule step");
  };
  add_run_options(run_cmd, run);
  run_cmd
      ->add_option("--engine", run.engines,
                   "engines to benchmark (repeatable)")
      ->check(CLI::IsMember({"glauber", "sca", "esca"}));
  add_run_options(sweep_cmd, sweep);
  sweep_cmd
      ->add_option("--epsilons", sweep.epsilons,
                   "comma-separated laziness values")
      ->required()
      ->delimiter(',');

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand(
      "verify", "check mixing-time bounds against exact kernels");
  verify_cmd->configurable()->fallthrough();
  verify_cmd->add_option("--instance", verify.instance, "instance file")
      ->required();
  verify_cmd
      ->add_option("--engine", verify.engines,
                   "parallel engines to verify (repeatable)")
      ->check(CLI::IsMember({"sca", "esca"}));
  verify_cmd->add_option("--beta", verify.beta, "inverse temperature");
  verify_cmd->add_option("--delta", verify.delta, "target accuracy");
  verify_cmd->add_option("--epsilon", verify.epsilon, "laziness for esca");
  verify_cmd->add_option("--pinning", verify.pinning,
                         "per-vertex pinning: 'auto' or a number");
  verify_cmd->add_option("--max-vertices", verify.max_vertices,
                         "largest system to enumerate");
  verify_cmd->add_option("--out-dir", verify.out_dir, "output directory");

  ExactArgs exact;
  auto* exact_cmd =
      app.add_subcommand("exact", "enumerate ground states exhaustively");
  exact_cmd->configurable()->fallthrough();
  exact_cmd->add_option("--instance", exact.instance, "instance file")
      ->required();
  exact_cmd->add_option("--cap", exact.cap, "largest system to enumerate");
  exact_cmd->add_option("--max-states", exact.max_states,
                        "ground states to print");
  exact_cmd->add_option("--out-dir", exact.out_dir, "output directory");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return run_generate(gen);
    if (run_cmd->parsed()) return run_run(run);
    if (sweep_cmd->parsed()) return run_sweep(sweep);
    if (verify_cmd->parsed()) return run_verify(verify);
    if (exact_cmd->parsed()) return run_exact(exact);
  } catch (const CLI::ParseError& e) {
    // Flag mistakes are configuration errors; help and version are not.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
