#include "scanneal/ising_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scanneal/errors.hpp"

namespace scanneal {

namespace {

std::string vertex_range_msg(const char* op, int x, int n) {
  return std::string(op) + ": vertex " + std::to_string(x) +
         " out of range [0, " + std::to_string(n) + ")";
}

// Cyclic Jacobi sweeps, eigenvalues only. a is row-major symmetric n x n.
double jacobi_max_eigenvalue(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * n + j];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-26 * (n * n)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double best = at(0, 0);
  for (int i = 1; i < n; ++i) best = std::max(best, at(i, i));
  return best;
}

}  // namespace

SpinConfiguration::SpinConfiguration(std::vector<std::int8_t> spins)
    : spins_(std::move(spins)) {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] != 1 && spins_[i] != -1) {
      throw InvalidInputError("SpinConfiguration: entry " + std::to_string(i) +
                              " is " + std::to_string(int(spins_[i])) +
                              ", expected +1 or -1");
    }
  }
}

SpinConfiguration SpinConfiguration::uniform_random(int num_vertices,
                                                    Rng& rng) {
  if (num_vertices < 0)
    throw InvalidInputError("SpinConfiguration: negative size");
  std::vector<std::int8_t> s(static_cast<std::size_t>(num_vertices));
  for (auto& v : s) v = static_cast<std::int8_t>(rng.random_pm1());
  return SpinConfiguration(std::move(s));
}

SpinConfiguration SpinConfiguration::constant(int num_vertices,
                                              std::int8_t spin) {
  if (num_vertices < 0)
    throw InvalidInputError("SpinConfiguration: negative size");
  if (spin != 1 && spin != -1)
    throw InvalidInputError("SpinConfiguration: spin must be +1 or -1");
  return SpinConfiguration(
      std::vector<std::int8_t>(static_cast<std::size_t>(num_vertices), spin));
}

void SpinConfiguration::set(int x, std::int8_t spin) {
  if (x < 0 || x >= size())
    throw InvalidInputError(vertex_range_msg("SpinConfiguration::set", x, size()));
  if (spin != 1 && spin != -1)
    throw InvalidInputError("SpinConfiguration::set: spin must be +1 or -1");
  spins_[static_cast<std::size_t>(x)] = spin;
}

IsingModel::IsingModel(int num_vertices, std::vector<Coupling> couplings,
                       std::vector<double> fields)
    : n_(num_vertices), couplings_(std::move(couplings)),
      fields_(std::move(fields)) {
  if (n_ <= 0) throw InvalidInputError("IsingModel: num_vertices must be positive");
  if (fields_.empty()) {
    fields_.assign(static_cast<std::size_t>(n_), 0.0);
  } else if (fields_.size() != static_cast<std::size_t>(n_)) {
    throw InvalidInputError("IsingModel: fields length " +
                            std::to_string(fields_.size()) + " != num_vertices " +
                            std::to_string(n_));
  }
  for (double h : fields_) {
    if (!std::isfinite(h))
      throw InvalidInputError("IsingModel: non-finite field value");
  }

  for (auto& c : couplings_) {
    if (c.x < 0 || c.x >= n_ || c.y < 0 || c.y >= n_)
      throw InvalidInputError("IsingModel: coupling (" + std::to_string(c.x) +
                              ", " + std::to_string(c.y) + ") out of range");
    if (c.x == c.y)
      throw InvalidInputError("IsingModel: self-coupling at vertex " +
                              std::to_string(c.x));
    if (c.value == 0.0)
      throw InvalidInputError("IsingModel: zero coupling at (" +
                              std::to_string(c.x) + ", " + std::to_string(c.y) +
                              ")");
    if (!std::isfinite(c.value))
      throw InvalidInputError("IsingModel: non-finite coupling at (" +
                              std::to_string(c.x) + ", " + std::to_string(c.y) +
                              ")");
    if (c.x > c.y) std::swap(c.x, c.y);
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) {
              return a.x != b.x ? a.x < b.x : a.y < b.y;
            });
  for (std::size_t i = 1; i < couplings_.size(); ++i) {
    if (couplings_[i - 1].x == couplings_[i].x &&
        couplings_[i - 1].y == couplings_[i].y)
      throw InvalidInputError("IsingModel: duplicate coupling for pair (" +
                              std::to_string(couplings_[i].x) + ", " +
                              std::to_string(couplings_[i].y) + ")");
  }

  std::vector<std::size_t> degree(static_cast<std::size_t>(n_), 0);
  for (const auto& c : couplings_) {
    ++degree[static_cast<std::size_t>(c.x)];
    ++degree[static_cast<std::size_t>(c.y)];
  }
  row_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int x = 0; x < n_; ++x)
    row_offsets_[static_cast<std::size_t>(x) + 1] =
        row_offsets_[static_cast<std::size_t>(x)] +
        degree[static_cast<std::size_t>(x)];
  nbr_index_.resize(row_offsets_.back());
  nbr_weight_.resize(row_offsets_.back());
  std::vector<std::size_t> cursor(row_offsets_.begin(), row_offsets_.end() - 1);
  for (const auto& c : couplings_) {
    nbr_index_[cursor[static_cast<std::size_t>(c.x)]] = c.y;
    nbr_weight_[cursor[static_cast<std::size_t>(c.x)]++] = c.value;
    nbr_index_[cursor[static_cast<std::size_t>(c.y)]] = c.x;
    nbr_weight_[cursor[static_cast<std::size_t>(c.y)]++] = c.value;
  }

  abs_row_sum_.assign(static_cast<std::size_t>(n_), 0.0);
  for (int x = 0; x < n_; ++x) {
    double s = 0.0;
    for (auto w : neighbor_weights(x)) s += std::abs(w);
    abs_row_sum_[static_cast<std::size_t>(x)] = s;
  }
}

void IsingModel::check_vertex(int x, const char* op) const {
  if (x < 0 || x >= n_) throw InvalidInputError(vertex_range_msg(op, x, n_));
}

std::span<const std::int32_t> IsingModel::neighbor_indices(int x) const {
  check_vertex(x, "neighbor_indices");
  const auto b = row_offsets_[static_cast<std::size_t>(x)];
  const auto e = row_offsets_[static_cast<std::size_t>(x) + 1];
  return {nbr_index_.data() + b, e - b};
}

std::span<const double> IsingModel::neighbor_weights(int x) const {
  check_vertex(x, "neighbor_weights");
  const auto b = row_offsets_[static_cast<std::size_t>(x)];
  const auto e = row_offsets_[static_cast<std::size_t>(x) + 1];
  return {nbr_weight_.data() + b, e - b};
}

double IsingModel::max_coupling_magnitude_sum() const {
  double m = 0.0;
  for (double s : abs_row_sum_) m = std::max(m, s);
  return m;
}

double IsingModel::energy(const SpinConfiguration& config) const {
  if (config.size() != n_)
    throw InvalidInputError("energy: configuration has " +
                            std::to_string(config.size()) + " spins, model has " +
                            std::to_string(n_) + " vertices");
  double e = 0.0;
  for (const auto& c : couplings_)
    e -= c.value * (config[c.x] * config[c.y]);
  for (int x = 0; x < n_; ++x)
    e -= fields_[static_cast<std::size_t>(x)] * config[x];
  return e;
}

double IsingModel::cavity_field(const SpinConfiguration& config, int x) const {
  if (config.size() != n_)
    throw InvalidInputError("cavity_field: configuration has " +
                            std::to_string(config.size()) + " spins, model has " +
                            std::to_string(n_) + " vertices");
  check_vertex(x, "cavity_field");
  const auto idx = neighbor_indices(x);
  const auto w = neighbor_weights(x);
  double f = fields_[static_cast<std::size_t>(x)];
  for (std::size_t i = 0; i < idx.size(); ++i) f += w[i] * config[idx[i]];
  return f;
}

double IsingModel::flip_delta(const SpinConfiguration& config, int x) const {
  return 2.0 * config[x] * cavity_field(config, x);
}

double IsingModel::largest_eigenvalue() const {
  // [-J] has zero trace, so its top eigenvalue is >= 0 and the shifted
  // matrix B = -J + cI with c = max_x sum_y |J_{x,y}| is positive
  // semidefinite by Gershgorin: power iteration converges to the top.
  const double c = max_coupling_magnitude_sum();
  if (c == 0.0) return 0.0;  // no couplings at all
  const std::size_t n = static_cast<std::size_t>(n_);

  std::vector<double> v(n), w(n);
  Rng rng(derive_seed(0x5ca11e1dULL, 0, static_cast<std::uint64_t>(n_)));
  for (auto& e : v) e = rng.uniform01() - 0.5;
  auto normalize = [&](std::vector<double>& u) {
    double s = 0.0;
    for (double e : u) s += e * e;
    s = std::sqrt(s);
    if (s == 0.0) {
      u[0] = 1.0;
      return;
    }
    for (double& e : u) e /= s;
  };
  normalize(v);

  const double tol = 1e-9 * std::max(1.0, c);
  const long cap = std::max<long>(
      200, static_cast<long>(10.0 * n_ * std::log(static_cast<double>(n_) + 1.0)));
  double mu = 0.0;
  double resid = 0.0;
  for (long it = 0; it < cap; ++it) {
    for (int x = 0; x < n_; ++x) {
      const auto idx = neighbor_indices(x);
      const auto wt = neighbor_weights(x);
      double acc = c * v[static_cast<std::size_t>(x)];
      for (std::size_t i = 0; i < idx.size(); ++i)
        acc -= wt[i] * v[static_cast<std::size_t>(idx[i])];
      w[static_cast<std::size_t>(x)] = acc;
    }
    mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += v[i] * w[i];
    resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      resid = std::max(resid, std::abs(w[i] - mu * v[i]));
    if (resid <= tol) return mu - c;
    v.swap(w);
    normalize(v);
  }

  if (n_ <= 64) {
    std::vector<double> dense(n * n, 0.0);
    for (const auto& cp : couplings_) {
      dense[static_cast<std::size_t>(cp.x) * n + cp.y] = -cp.value;
      dense[static_cast<std::size_t>(cp.y) * n + cp.x] = -cp.value;
    }
    return jacobi_max_eigenvalue(std::move(dense), n_);
  }
  throw NumericalError(
      "largest_eigenvalue: power iteration did not converge (n=" +
      std::to_string(n_) + ", iterations=" + std::to_string(cap) +
      ", residual=" + std::to_string(resid) + ", tolerance=" +
      std::to_string(tol) + ")");
}

double gamma_total(const IsingModel& model, std::span<const double> pinning) {
  if (pinning.size() != static_cast<std::size_t>(model.num_vertices()))
    throw InvalidInputError("gamma_total: pinning length " +
                            std::to_string(pinning.size()) +
                            " != num_vertices " +
                            std::to_string(model.num_vertices()));
  double g = 0.0;
  for (int x = 0; x < model.num_vertices(); ++x) {
    const double q = pinning[static_cast<std::size_t>(x)];
    if (!(q >= 0.0))
      throw InvalidInputError("gamma_total: pinning at vertex " +
                              std::to_string(x) + " must be >= 0");
    g += q + std::abs(model.field(x)) + model.coupling_magnitude_sum(x);
  }
  return g;
}

std::vector<double> homogeneous_pinning(const IsingModel& model, double q) {
  if (!(q >= 0.0))
    throw InvalidInputError("homogeneous_pinning: q must be >= 0");
  return std::vector<double>(static_cast<std::size_t>(model.num_vertices()), q);
}

std::vector<double> auto_pinning(const IsingModel& model) {
  const double lambda = model.largest_eigenvalue();
  return homogeneous_pinning(model, std::max(lambda, 0.0) / 2.0);
}

}  // namespace scanneal
