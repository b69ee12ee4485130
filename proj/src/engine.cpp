#include "scanneal/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstring>

#include "scanneal/errors.hpp"
#include "scanneal/format.hpp"

namespace scanneal {

namespace {

// Cavity fields of every site plus the configuration energy, in one pass:
//   H(s) = -1/2 sum_x s_x (f_x + h_x)   with   f_x = sum_y J_{x,y} s_y + h_x.
// Spins live in doubles (+1.0/-1.0) so the inner gather stays cheap; four
// accumulators break the dependency chain in the dominant dot product.
double fields_and_energy(const IsingModel& m, const double* s, double* fields) {
  const int n = m.num_vertices();
  double acc = 0.0;
  for (int x = 0; x < n; ++x) {
    const auto idx = m.neighbor_indices(x);
    const auto w = m.neighbor_weights(x);
    const std::size_t len = idx.size();
    double f0 = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      f0 += w[i] * s[idx[i]];
      f1 += w[i + 1] * s[idx[i + 1]];
      f2 += w[i + 2] * s[idx[i + 2]];
      f3 += w[i + 3] * s[idx[i + 3]];
    }
    for (; i < len; ++i) f0 += w[i] * s[idx[i]];
    const double h = m.field(x);
    const double f = ((f0 + f1) + (f2 + f3)) + h;
    fields[x] = f;
    acc += s[x] * (f + h);
  }
  return -0.5 * acc;
}

// Synchronous pinned draw, ascending vertex order, one uniform per site.
void pinned_parallel_draw(std::span<const double> fields,
                          std::span<const double> spins,
                          std::span<const double> pinning, double beta,
                          Rng& rng, std::span<double> out) {
  const std::size_t n = spins.size();
  for (std::size_t x = 0; x < n; ++x) {
    const double p_plus =
        pinned_local_prob(fields[x], pinning[x], spins[x], beta, 1.0);
    out[x] = rng.uniform01() < p_plus ? 1.0 : -1.0;
  }
}

// Synchronous lazy draw: flip site x with probability eps * flip-prob.
void lazy_parallel_draw(std::span<const double> fields,
                        std::span<const double> spins, double eps, double beta,
                        Rng& rng, std::span<double> out) {
  const std::size_t n = spins.size();
  for (std::size_t x = 0; x < n; ++x) {
    const double p_flip = eps * bare_flip_prob(fields[x], spins[x], beta);
    out[x] = rng.uniform01() < p_flip ? -spins[x] : spins[x];
  }
}

// One heat-bath update at a uniform site; returns the energy change.
double heat_bath_update(const IsingModel& m, std::vector<double>& spins,
                        double beta, Rng& rng) {
  const int x = static_cast<int>(
      rng.uniform_below(static_cast<std::uint64_t>(m.num_vertices())));
  const auto idx = m.neighbor_indices(x);
  const auto w = m.neighbor_weights(x);
  double f = m.field(x);
  for (std::size_t i = 0; i < idx.size(); ++i)
    f += w[i] * spins[static_cast<std::size_t>(idx[i])];
  const double p_plus = heat_bath_plus_prob(f, beta);
  const double next = rng.uniform01() < p_plus ? 1.0 : -1.0;
  const double old = spins[static_cast<std::size_t>(x)];
  if (next == old) return 0.0;
  spins[static_cast<std::size_t>(x)] = next;
  return 2.0 * old * f;
}

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidInputError("beta must be finite and >= 0");
}

void check_config_size(const IsingModel& model, const SpinConfiguration& c,
                       const char* op) {
  if (c.size() != model.num_vertices())
    throw InvalidInputError(std::string(op) + ": configuration has " +
                            std::to_string(c.size()) + " spins, model has " +
                            std::to_string(model.num_vertices()));
}

void spins_to_doubles(const SpinConfiguration& c, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(c.size()));
  for (int i = 0; i < c.size(); ++i) out[static_cast<std::size_t>(i)] = c[i];
}

SpinConfiguration doubles_to_config(std::span<const double> s) {
  std::vector<std::int8_t> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    v[i] = s[i] > 0.0 ? std::int8_t{1} : std::int8_t{-1};
  return SpinConfiguration(std::move(v));
}

void check_pinning_values(std::span<const double> pinning) {
  for (std::size_t x = 0; x < pinning.size(); ++x) {
    if (!(pinning[x] >= 0.0) || !std::isfinite(pinning[x]))
      throw InvalidInputError("pinning at vertex " + std::to_string(x) +
                              " must be finite and >= 0");
  }
}

}  // namespace

EngineSpec EngineSpec::glauber() { return EngineSpec{}; }

EngineSpec EngineSpec::sca(std::vector<double> pinning) {
  check_pinning_values(pinning);
  EngineSpec s;
  s.kind_ = Kind::Sca;
  s.pinning_ = std::move(pinning);
  return s;
}

EngineSpec EngineSpec::epsilon_sca(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw InvalidInputError("epsilon must lie in (0, 1], got " +
                            format_double(epsilon));
  EngineSpec s;
  s.kind_ = Kind::EpsilonSca;
  s.epsilon_ = epsilon;
  return s;
}

std::string EngineSpec::label() const {
  switch (kind_) {
    case Kind::Glauber:
      return "glauber";
    case Kind::Sca:
      return "sca";
    case Kind::EpsilonSca:
      return "esca(" + format_double(epsilon_) + ")";
  }
  return "";
}

void EngineSpec::validate_for(const IsingModel& model) const {
  if (kind_ == Kind::Sca &&
      pinning_.size() != static_cast<std::size_t>(model.num_vertices()))
    throw InvalidInputError("sca pinning has " + std::to_string(pinning_.size()) +
                            " entries, model has " +
                            std::to_string(model.num_vertices()) + " vertices");
}

ChainState make_chain_state(const IsingModel& model, std::uint64_t seed) {
  Rng rng(seed);
  auto config = SpinConfiguration::uniform_random(model.num_vertices(), rng);
  return ChainState{std::move(config), rng, 0};
}

double sca_local_prob(const IsingModel& model, const SpinConfiguration& config,
                      int x, double q_x, double beta, int new_spin) {
  check_config_size(model, config, "sca_local_prob");
  check_beta(beta);
  if (!(q_x >= 0.0) || !std::isfinite(q_x))
    throw InvalidInputError("sca_local_prob: q_x must be finite and >= 0");
  if (new_spin != 1 && new_spin != -1)
    throw InvalidInputError("sca_local_prob: new_spin must be +1 or -1");
  const double f = model.cavity_field(config, x);
  return pinned_local_prob(f, q_x, config[x], beta, new_spin);
}

double epsilon_sca_flip_prob(const IsingModel& model,
                             const SpinConfiguration& config, int x,
                             double beta) {
  return sca_local_prob(model, config, x, 0.0, beta, -config[x]);
}

void sca_step(const IsingModel& model, ChainState& state,
              std::span<const double> pinning, double beta,
              StepScratch* scratch) {
  check_config_size(model, state.config, "sca_step");
  check_beta(beta);
  if (pinning.size() != static_cast<std::size_t>(model.num_vertices()))
    throw InvalidInputError("sca_step: pinning length mismatch");
  check_pinning_values(pinning);
  StepScratch local;
  StepScratch& s = scratch ? *scratch : local;
  spins_to_doubles(state.config, s.spins);
  s.fields.resize(s.spins.size());
  s.next.resize(s.spins.size());
  fields_and_energy(model, s.spins.data(), s.fields.data());
  pinned_parallel_draw(s.fields, s.spins, pinning, beta, state.rng, s.next);
  state.config = doubles_to_config(s.next);
  ++state.step_index;
}

void epsilon_sca_step(const IsingModel& model, ChainState& state,
                      double epsilon, double beta, StepScratch* scratch) {
  check_config_size(model, state.config, "epsilon_sca_step");
  check_beta(beta);
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw InvalidInputError("epsilon_sca_step: epsilon must lie in (0, 1]");
  StepScratch local;
  StepScratch& s = scratch ? *scratch : local;
  spins_to_doubles(state.config, s.spins);
  s.fields.resize(s.spins.size());
  s.next.resize(s.spins.size());
  fields_and_energy(model, s.spins.data(), s.fields.data());
  lazy_parallel_draw(s.fields, s.spins, epsilon, beta, state.rng, s.next);
  state.config = doubles_to_config(s.next);
  ++state.step_index;
}

void glauber_step(const IsingModel& model, ChainState& state, double beta) {
  check_config_size(model, state.config, "glauber_step");
  check_beta(beta);
  std::vector<double> spins;
  spins_to_doubles(state.config, spins);
  heat_bath_update(model, spins, beta, state.rng);
  state.config = doubles_to_config(spins);
  ++state.step_index;
}

TrialRecord anneal(const IsingModel& model, const EngineSpec& spec,
                   const AnnealingSchedule& schedule, std::uint64_t num_steps,
                   std::uint64_t seed, const AnnealOptions& options) {
  spec.validate_for(model);
  if (num_steps < 1)
    throw InvalidInputError("anneal: num_steps must be >= 1");
  if (options.applications_per_step < 1)
    throw InvalidInputError("anneal: applications_per_step must be >= 1");

  const auto t_start = std::chrono::steady_clock::now();
  const int n = model.num_vertices();
  const std::size_t sn = static_cast<std::size_t>(n);

  Rng rng(seed);
  std::vector<double> spins(sn), next(sn), fields(sn);
  for (auto& s : spins) s = rng.random_pm1();

  TrialRecord rec;
  rec.engine = spec;
  rec.schedule = schedule;
  rec.seed = seed;

  double e = fields_and_energy(model, spins.data(), fields.data());
  rec.min_energy = e;
  rec.best_config = doubles_to_config(spins);
  rec.best_step = 0;
  if (options.record_trace) rec.energy_trace.push_back(e);

  const std::uint64_t t0 = schedule.first_step();
  std::uint64_t applications = 0;
  for (std::uint64_t step = 0; step < num_steps; ++step) {
    const double beta = schedule.beta_at(t0 + step);
    for (std::uint64_t rep = 0; rep < options.applications_per_step; ++rep) {
      switch (spec.kind()) {
        case EngineSpec::Kind::Glauber:
          e += heat_bath_update(model, spins, beta, rng);
          break;
        case EngineSpec::Kind::Sca:
          pinned_parallel_draw(fields, spins, spec.pinning(), beta, rng, next);
          spins.swap(next);
          e = fields_and_energy(model, spins.data(), fields.data());
          break;
        case EngineSpec::Kind::EpsilonSca:
          lazy_parallel_draw(fields, spins, spec.epsilon(), beta, rng, next);
          spins.swap(next);
          e = fields_and_energy(model, spins.data(), fields.data());
          break;
      }
      ++applications;
      if (e < rec.min_energy) {
        rec.min_energy = e;
        rec.best_config = doubles_to_config(spins);
        rec.best_step = applications;
      }
      if (options.record_trace) rec.energy_trace.push_back(e);
    }
  }

  rec.final_config = doubles_to_config(spins);
  rec.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rec;
}

}  // namespace scanneal
