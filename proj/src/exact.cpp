#include "scanneal/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "scanneal/errors.hpp"

namespace scanneal {

namespace {

constexpr int kHardEnumerationLimit = 62;  // shift safety for 64-bit codes

void check_probability_args(double beta, double delta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidInputError("beta must be finite and >= 0");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw InvalidInputError("delta must lie in (0, 1)");
}

std::uint64_t steps_for_contraction(double r, int num_vertices, double delta) {
  if (r == 0.0) return 1;
  const double ratio =
      (std::log(static_cast<double>(num_vertices)) - std::log(delta)) /
      std::log(1.0 / r);
  const double t = std::ceil(ratio);
  return t < 1.0 ? 1 : static_cast<std::uint64_t>(t);
}

// C = A * B, row-major d x d.
std::vector<double> mat_mul(const std::vector<double>& a,
                            const std::vector<double>& b, std::size_t d) {
  std::vector<double> c(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double* ai = a.data() + i * d;
    double* ci = c.data() + i * d;
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.data() + k * d;
      for (std::size_t j = 0; j < d; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

std::vector<double> mat_power(std::vector<double> base, std::size_t d,
                              std::uint64_t t) {
  std::vector<double> result(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) result[i * d + i] = 1.0;
  while (t > 0) {
    if (t & 1) result = mat_mul(result, base, d);
    t >>= 1;
    if (t > 0) base = mat_mul(base, base, d);
  }
  return result;
}

// Probability of drawing +1 at site y for the parallel engines. Shares the
// per-site law helpers with the samplers.
double parallel_plus_prob(const IsingModel& model, const EngineSpec& spec,
                          double beta, const SpinConfiguration& config,
                          int y) {
  const double f = model.cavity_field(config, y);
  const double s = config[y];
  if (spec.kind() == EngineSpec::Kind::Sca) {
    return pinned_local_prob(f, spec.pinning()[static_cast<std::size_t>(y)], s,
                             beta, 1.0);
  }
  const double flip = spec.epsilon() * bare_flip_prob(f, s, beta);
  return s > 0.0 ? 1.0 - flip : flip;
}

}  // namespace

std::uint64_t config_code(const SpinConfiguration& config) {
  if (config.size() > kHardEnumerationLimit)
    throw InvalidInputError("config_code: more than " +
                            std::to_string(kHardEnumerationLimit) + " spins");
  std::uint64_t code = 0;
  for (int x = 0; x < config.size(); ++x)
    if (config[x] > 0) code |= std::uint64_t{1} << x;
  return code;
}

SpinConfiguration config_from_code(int num_vertices, std::uint64_t code) {
  if (num_vertices < 0 || num_vertices > kHardEnumerationLimit)
    throw InvalidInputError("config_from_code: vertex count out of range");
  if (num_vertices < kHardEnumerationLimit &&
      code >= (std::uint64_t{1} << num_vertices))
    throw InvalidInputError("config_from_code: code out of range for " +
                            std::to_string(num_vertices) + " vertices");
  std::vector<std::int8_t> s(static_cast<std::size_t>(num_vertices));
  for (int x = 0; x < num_vertices; ++x)
    s[static_cast<std::size_t>(x)] =
        (code >> x) & 1 ? std::int8_t{1} : std::int8_t{-1};
  return SpinConfiguration(std::move(s));
}

std::vector<double> GroundStateSet::uniform_distribution() const {
  if (num_vertices > 26)
    throw InvalidInputError(
        "GroundStateSet::uniform_distribution: too many vertices to "
        "materialize 2^N entries");
  std::vector<double> d(std::size_t{1} << num_vertices, 0.0);
  const double w = 1.0 / static_cast<double>(states.size());
  for (auto code : states) d[code] = w;
  return d;
}

GroundStateSet brute_force_ground_states(const IsingModel& model,
                                         int max_vertices) {
  const int n = model.num_vertices();
  if (max_vertices < 1 || max_vertices > kHardEnumerationLimit)
    throw InvalidInputError("brute_force_ground_states: max_vertices must lie in [1, " +
                            std::to_string(kHardEnumerationLimit) + "]");
  if (n > max_vertices)
    throw InvalidInputError("brute_force_ground_states: " + std::to_string(n) +
                            " vertices exceeds the exhaustive cap of " +
                            std::to_string(max_vertices));

  const std::uint64_t total = std::uint64_t{1} << n;
  const std::size_t sn = static_cast<std::size_t>(n);

  // Gray-code walk: one flip per visited configuration, cavity fields
  // maintained incrementally. Iteration i visits code i ^ (i >> 1).
  auto walk = [&](auto&& visit) {
    std::vector<double> s(sn, -1.0);
    std::vector<double> cav(sn);
    SpinConfiguration start = config_from_code(n, 0);
    for (int x = 0; x < n; ++x)
      cav[static_cast<std::size_t>(x)] = model.cavity_field(start, x);
    double e = model.energy(start);
    visit(std::uint64_t{0}, e);
    for (std::uint64_t i = 1; i < total; ++i) {
      const int x = std::countr_zero(i);
      const std::size_t sx = static_cast<std::size_t>(x);
      e += 2.0 * s[sx] * cav[sx];
      s[sx] = -s[sx];
      const auto idx = model.neighbor_indices(x);
      const auto w = model.neighbor_weights(x);
      for (std::size_t k = 0; k < idx.size(); ++k)
        cav[static_cast<std::size_t>(idx[k])] += 2.0 * w[k] * s[sx];
      visit(i ^ (i >> 1), e);
    }
  };

  double min_inc = std::numeric_limits<double>::infinity();
  walk([&](std::uint64_t, double e) { min_inc = std::min(min_inc, e); });

  // Shortlist within a window wide enough to absorb the incremental
  // rounding drift, then settle ties with full-precision energies.
  const double window = 1e-7 * (1.0 + std::abs(min_inc));
  constexpr std::size_t kShortlistCap = std::size_t{1} << 22;
  std::vector<std::uint64_t> shortlist;
  walk([&](std::uint64_t code, double e) {
    if (e <= min_inc + window) {
      if (shortlist.size() >= kShortlistCap)
        throw NumericalError(
            "brute_force_ground_states: shortlist exceeded " +
            std::to_string(kShortlistCap) +
            " configurations; degeneracy too large for exact tie-breaking");
      shortlist.push_back(code);
    }
  });

  GroundStateSet result;
  result.num_vertices = n;
  double exact_min = std::numeric_limits<double>::infinity();
  std::vector<double> exact(shortlist.size());
  for (std::size_t i = 0; i < shortlist.size(); ++i) {
    exact[i] = model.energy(config_from_code(n, shortlist[i]));
    exact_min = std::min(exact_min, exact[i]);
  }
  for (std::size_t i = 0; i < shortlist.size(); ++i)
    if (exact[i] == exact_min) result.states.push_back(shortlist[i]);
  std::sort(result.states.begin(), result.states.end());
  result.min_energy = exact_min;
  return result;
}

ExactKernel build_exact_kernel(const IsingModel& model, const EngineSpec& spec,
                               double beta, int max_vertices) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidInputError("build_exact_kernel: beta must be finite and >= 0");
  spec.validate_for(model);
  const int n = model.num_vertices();
  if (max_vertices < 1 || max_vertices > 26)
    throw InvalidInputError("build_exact_kernel: max_vertices must lie in [1, 26]");
  if (n > max_vertices)
    throw InvalidInputError("build_exact_kernel: " + std::to_string(n) +
                            " vertices exceeds the dense-kernel cap of " +
                            std::to_string(max_vertices));

  ExactKernel kernel;
  kernel.num_vertices = n;
  kernel.dim = std::size_t{1} << n;
  kernel.spec = spec;
  kernel.beta = beta;
  kernel.probs.assign(kernel.dim * kernel.dim, 0.0);

  std::vector<double> p_plus(static_cast<std::size_t>(n));
  for (std::uint64_t sigma = 0; sigma < kernel.dim; ++sigma) {
    const SpinConfiguration config = config_from_code(n, sigma);
    double* row = kernel.probs.data() + sigma * kernel.dim;

    if (spec.kind() == EngineSpec::Kind::Glauber) {
      const double inv_n = 1.0 / static_cast<double>(n);
      double stay = 0.0;
      for (int x = 0; x < n; ++x) {
        // Field along the current spin; both branches are computed directly
        // so saturated probabilities keep full relative precision.
        const double toward =
            config[x] > 0 ? model.cavity_field(config, x)
                          : -model.cavity_field(config, x);
        row[sigma ^ (std::uint64_t{1} << x)] =
            heat_bath_plus_prob(-toward, beta) * inv_n;
        stay += heat_bath_plus_prob(toward, beta);
      }
      row[sigma] = stay * inv_n;
      continue;
    }

    for (int x = 0; x < n; ++x)
      p_plus[static_cast<std::size_t>(x)] =
          parallel_plus_prob(model, spec, beta, config, x);

    // Product measure over independent sites: doubling fill, one site at a
    // time, so row[tau] ends as the product of per-site probabilities.
    row[0] = 1.0;
    std::size_t size = 1;
    for (int x = 0; x < n; ++x) {
      const double plus = p_plus[static_cast<std::size_t>(x)];
      const double minus = 1.0 - plus;
      for (std::size_t i = 0; i < size; ++i) {
        row[i + size] = row[i] * plus;
        row[i] *= minus;
      }
      size <<= 1;
    }
  }
  return kernel;
}

StationaryResult stationary_distribution(const ExactKernel& kernel, double tol,
                                         std::uint64_t max_iterations) {
  if (!(tol > 0.0))
    throw InvalidInputError("stationary_distribution: tol must be positive");
  const std::size_t d = kernel.dim;
  std::vector<double> mu(d, 1.0 / static_cast<double>(d));
  std::vector<double> nu(d);
  double gap = 0.0;
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    std::fill(nu.begin(), nu.end(), 0.0);
    for (std::size_t sigma = 0; sigma < d; ++sigma) {
      const double m = mu[sigma];
      if (m == 0.0) continue;
      const double* row = kernel.probs.data() + sigma * d;
      for (std::size_t tau = 0; tau < d; ++tau) nu[tau] += m * row[tau];
    }
    gap = tv_distance(mu, nu);
    mu.swap(nu);
    if (gap < tol) return StationaryResult{std::move(mu), it};
  }
  throw NumericalError(
      "stationary_distribution: no fixed point within " +
      std::to_string(max_iterations) + " iterations (dim=" + std::to_string(d) +
      ", last successive tv=" + std::to_string(gap) + ", tol=" +
      std::to_string(tol) + ")");
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidInputError("tv_distance: length mismatch (" +
                            std::to_string(p.size()) + " vs " +
                            std::to_string(q.size()) + ")");
  double sp = 0.0, sq = 0.0, d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    d += std::abs(p[i] - q[i]);
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw InvalidInputError("tv_distance: inputs must each sum to 1");
  return 0.5 * d;
}

MixingBound sca_mixing_bound(const IsingModel& model,
                             std::span<const double> pinning, double beta,
                             double delta) {
  check_probability_args(beta, delta);
  if (pinning.size() != static_cast<std::size_t>(model.num_vertices()))
    throw InvalidInputError("sca_mixing_bound: pinning length mismatch");
  double r = 0.0;
  for (int x = 0; x < model.num_vertices(); ++x) {
    const double q = pinning[static_cast<std::size_t>(x)];
    if (!(q >= 0.0))
      throw InvalidInputError("sca_mixing_bound: pinning must be >= 0");
    double row = std::tanh(beta * q / 2.0);
    for (double w : model.neighbor_weights(x))
      row += std::tanh(beta * std::abs(w) / 2.0);
    r = std::max(r, row);
  }
  MixingBound b;
  b.r = r;
  b.applicable = r < 1.0;
  if (b.applicable)
    b.t_bound = steps_for_contraction(r, model.num_vertices(), delta);
  return b;
}

MixingBound epsilon_sca_mixing_bound(const IsingModel& model, double epsilon,
                                     double beta, double delta) {
  check_probability_args(beta, delta);
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw InvalidInputError("epsilon_sca_mixing_bound: epsilon must lie in (0, 1]");
  double worst = 0.0;
  for (int x = 0; x < model.num_vertices(); ++x) {
    double row = 0.0;
    for (double w : model.neighbor_weights(x))
      row += std::tanh(beta * std::abs(w) / 2.0);
    worst = std::max(worst, row);
  }
  MixingBound b;
  b.r = (1.0 - epsilon) + epsilon * worst;
  b.applicable = b.r < 1.0;
  if (b.applicable)
    b.t_bound = steps_for_contraction(b.r, model.num_vertices(), delta);
  return b;
}

MixingReport verify_mixing(const IsingModel& model, const EngineSpec& spec,
                           double beta, double delta, int max_vertices) {
  MixingReport report;
  report.delta = delta;
  switch (spec.kind()) {
    case EngineSpec::Kind::Sca:
      report.bound = sca_mixing_bound(model, spec.pinning(), beta, delta);
      break;
    case EngineSpec::Kind::EpsilonSca:
      report.bound =
          epsilon_sca_mixing_bound(model, spec.epsilon(), beta, delta);
      break;
    case EngineSpec::Kind::Glauber:
      throw InvalidInputError(
          "verify_mixing: no contraction bound for the single-site chain");
  }

  const ExactKernel kernel = build_exact_kernel(model, spec, beta, max_vertices);
  auto stationary = stationary_distribution(kernel);
  report.stationary_iterations = stationary.iterations;
  if (!report.bound.applicable) return report;

  const std::size_t d = kernel.dim;
  const std::vector<double> powered =
      mat_power(kernel.probs, d, report.bound.t_bound);
  double worst = 0.0;
  for (std::size_t sigma = 0; sigma < d; ++sigma) {
    const std::span<const double> row{powered.data() + sigma * d, d};
    worst = std::max(worst, tv_distance(row, stationary.distribution));
  }
  report.tv_after_bound = worst;
  report.pass = worst <= delta;
  return report;
}

double coupling_disagreement(const IsingModel& model, const EngineSpec& spec,
                             double beta, const SpinConfiguration& config,
                             int x) {
  if (spec.kind() == EngineSpec::Kind::Glauber)
    throw InvalidInputError(
        "coupling_disagreement: defined for the parallel engines only");
  spec.validate_for(model);
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidInputError("coupling_disagreement: beta must be finite and >= 0");
  if (config.size() != model.num_vertices())
    throw InvalidInputError("coupling_disagreement: configuration size mismatch");
  if (x < 0 || x >= model.num_vertices())
    throw InvalidInputError("coupling_disagreement: vertex out of range");

  SpinConfiguration flipped = config;
  flipped.flip(x);
  double total = std::abs(parallel_plus_prob(model, spec, beta, config, x) -
                          parallel_plus_prob(model, spec, beta, flipped, x));
  for (int y : model.neighbor_indices(x))
    total += std::abs(parallel_plus_prob(model, spec, beta, config, y) -
                      parallel_plus_prob(model, spec, beta, flipped, y));
  return total;
}

}  // namespace scanneal
