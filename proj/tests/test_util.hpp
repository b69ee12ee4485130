#ifndef SCANNEAL_TEST_UTIL_HPP
#define SCANNEAL_TEST_UTIL_HPP

// Independent reference implementations for the test suites. Everything here
// recomputes results through a different route than the library (dense
// matrices, direct enumeration, characteristic polynomials) so agreement is
// meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "scanneal/exact.hpp"
#include "scanneal/ising_model.hpp"
#include "scanneal/rng.hpp"

namespace test_util {

// Energy via a dense symmetric matrix and the quadratic form, not the
// coupling list walk the library uses.
inline double dense_energy(const scanneal::IsingModel& m,
                           const scanneal::SpinConfiguration& c) {
  const int n = m.num_vertices();
  std::vector<double> j(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& cp : m.couplings()) {
    j[static_cast<std::size_t>(cp.x) * n + cp.y] = cp.value;
    j[static_cast<std::size_t>(cp.y) * n + cp.x] = cp.value;
  }
  double quad = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      quad += j[static_cast<std::size_t>(x) * n + y] * c[x] * c[y];
  double e = -0.5 * quad;
  for (int x = 0; x < n; ++x) e -= m.field(x) * c[x];
  return e;
}

struct EnumeratedGroundStates {
  double min_energy = 0.0;
  std::vector<std::uint64_t> states;
};

// Plain full-energy evaluation of every configuration; no incremental
// arithmetic anywhere.
inline EnumeratedGroundStates enumerate_ground_states(
    const scanneal::IsingModel& m) {
  const int n = m.num_vertices();
  EnumeratedGroundStates result;
  result.min_energy = std::numeric_limits<double>::infinity();
  std::vector<double> energies(std::size_t{1} << n);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    const double e = m.energy(scanneal::config_from_code(n, code));
    energies[code] = e;
    result.min_energy = std::min(result.min_energy, e);
  }
  for (std::uint64_t code = 0; code < energies.size(); ++code)
    if (energies[code] == result.min_energy) result.states.push_back(code);
  return result;
}

// --- characteristic polynomial oracle (n <= 4) ---

using Poly = std::vector<double>;  // p[i] is the coefficient of x^i

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) c[i + k] += a[i] * b[k];
  return c;
}

inline Poly poly_add(Poly a, const Poly& b, double scale) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

inline double poly_eval(const Poly& p, double x) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

// det(xI - M) by Laplace expansion over polynomial entries.
inline Poly char_poly(const std::vector<double>& m, int n) {
  std::vector<std::vector<Poly>> entries(
      static_cast<std::size_t>(n), std::vector<Poly>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = -m[static_cast<std::size_t>(i) * n + j];
      entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          i == j ? Poly{v, 1.0} : Poly{v};
    }
  std::vector<int> cols(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j)] = j;
  std::function<Poly(int, std::vector<int>)> det =
      [&](int row, std::vector<int> active) -> Poly {
    if (active.size() == 1)
      return entries[static_cast<std::size_t>(row)]
                    [static_cast<std::size_t>(active[0])];
    Poly acc{0.0};
    for (std::size_t k = 0; k < active.size(); ++k) {
      std::vector<int> rest;
      for (std::size_t r = 0; r < active.size(); ++r)
        if (r != k) rest.push_back(active[r]);
      const Poly minor = det(row + 1, std::move(rest));
      const Poly term = poly_mul(
          entries[static_cast<std::size_t>(row)]
                 [static_cast<std::size_t>(active[k])],
          minor);
      acc = poly_add(std::move(acc), term, (k % 2 == 0) ? 1.0 : -1.0);
    }
    return acc;
  };
  return det(0, cols);
}

// All real roots by recursive critical-point isolation and bisection.
// Exact enough for symmetric matrices with simple extreme eigenvalues.
inline std::vector<double> poly_real_roots(Poly p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  if (p.size() <= 1) return {};
  if (p.size() == 2) return {-p[0] / p[1]};

  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i)
    d[i - 1] = p[i] * static_cast<double>(i);
  std::vector<double> crit = poly_real_roots(d);

  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    bound = std::max(bound, std::abs(p[i] / p.back()));
  bound += 1.0;

  std::vector<double> points{-bound};
  for (double c : crit)
    if (c > -bound && c < bound) points.push_back(c);
  points.push_back(bound);
  std::sort(points.begin(), points.end());

  auto bisect = [&](double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (poly_eval(p, lo) * poly_eval(p, mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    const double fa = poly_eval(p, a);
    const double fb = poly_eval(p, b);
    if (fa == 0.0) roots.push_back(a);
    if (fa * fb < 0.0) roots.push_back(bisect(a, b));
  }
  // Even-multiplicity roots only touch zero: catch them at critical points.
  for (double c : crit)
    if (std::abs(poly_eval(p, c)) < 1e-9 * std::max(1.0, std::abs(poly_eval(p, bound))))
      roots.push_back(c);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  return roots;
}

// Largest eigenvalue of [-J] straight from the characteristic polynomial.
inline double char_poly_max_eigenvalue(const scanneal::IsingModel& m) {
  const int n = m.num_vertices();
  std::vector<double> neg_j(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& cp : m.couplings()) {
    neg_j[static_cast<std::size_t>(cp.x) * n + cp.y] = -cp.value;
    neg_j[static_cast<std::size_t>(cp.y) * n + cp.x] = -cp.value;
  }
  const auto roots = poly_real_roots(char_poly(neg_j, n));
  return roots.back();
}

// --- fixtures ---

inline scanneal::IsingModel triangle(double j) {
  return scanneal::IsingModel(3, {{0, 1, j}, {0, 2, j}, {1, 2, j}});
}

inline scanneal::IsingModel complete(int n, double j) {
  std::vector<scanneal::Coupling> c;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) c.push_back({x, y, j});
  return scanneal::IsingModel(n, std::move(c));
}

inline scanneal::IsingModel path(int n, double j) {
  std::vector<scanneal::Coupling> c;
  for (int x = 0; x + 1 < n; ++x) c.push_back({x, x + 1, j});
  return scanneal::IsingModel(n, std::move(c));
}

inline scanneal::IsingModel ring(int n, double j) {
  std::vector<scanneal::Coupling> c;
  for (int x = 0; x < n; ++x) c.push_back({x, (x + 1) % n, j});
  return scanneal::IsingModel(n, std::move(c));
}

// Dense random couplings and fields; used where the structure is irrelevant.
inline scanneal::IsingModel random_model(int n, std::uint64_t seed,
                                         bool with_fields = true,
                                         double density = 1.0) {
  scanneal::Rng rng(seed);
  std::vector<scanneal::Coupling> c;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (rng.uniform01() < density) {
        double v;
        do {
          v = rng.standard_normal();
        } while (v == 0.0);
        c.push_back({x, y, v});
      }
  std::vector<double> h;
  if (with_fields) {
    h.resize(static_cast<std::size_t>(n));
    for (auto& v : h) v = rng.standard_normal();
  }
  return scanneal::IsingModel(n, std::move(c), std::move(h));
}

inline scanneal::SpinConfiguration random_config(int n, std::uint64_t seed) {
  scanneal::Rng rng(seed);
  return scanneal::SpinConfiguration::uniform_random(n, rng);
}

}  // namespace test_util

#endif
