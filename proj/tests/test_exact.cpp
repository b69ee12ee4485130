#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "scanneal/engine.hpp"
#include "scanneal/errors.hpp"
#include "scanneal/exact.hpp"
#include "scanneal/generators.hpp"
#include "scanneal/schedule.hpp"
#include "test_util.hpp"

using namespace scanneal;

namespace {

void check_rows_stochastic(const ExactKernel& k, double tol = 1e-12) {
  for (std::uint64_t sigma = 0; sigma < k.dim; ++sigma) {
    double sum = 0.0;
    for (double p : k.row(sigma)) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= tol);
  }
}

std::vector<double> gibbs_distribution(const IsingModel& m, double beta) {
  const std::size_t dim = std::size_t{1} << m.num_vertices();
  std::vector<double> pi(dim);
  double z = 0.0;
  for (std::uint64_t code = 0; code < dim; ++code) {
    pi[code] = std::exp(-beta * m.energy(config_from_code(m.num_vertices(), code)));
    z += pi[code];
  }
  for (double& p : pi) p /= z;
  return pi;
}

}  // namespace

TEST_CASE("configuration codes round trip with vertex 0 least significant") {
  SpinConfiguration c({1, -1, -1, 1});
  CHECK(config_code(c) == 0b1001);
  CHECK(config_from_code(4, 0b1001) == c);
  CHECK(config_code(config_from_code(3, 0)) == 0);
  for (std::uint64_t code = 0; code < 32; ++code)
    CHECK(config_code(config_from_code(5, code)) == code);
  CHECK_THROWS_AS(config_from_code(3, 8), InvalidInputError);
}

TEST_CASE("brute force on solvable instances") {
  IsingModel pair(2, {{0, 1, 1.0}});
  auto gs = brute_force_ground_states(pair);
  CHECK(gs.min_energy == -1.0);
  REQUIRE(gs.states.size() == 2);
  CHECK(gs.states[0] == 0b00);
  CHECK(gs.states[1] == 0b11);

  // Antiferromagnetic triangle is frustrated: six states at energy -1.
  auto tri = test_util::triangle(-1.0);
  auto tri_gs = brute_force_ground_states(tri);
  CHECK(tri_gs.min_energy == -1.0);
  CHECK(tri_gs.states.size() == 6);

  IsingModel lone(1, {}, {5.0});
  auto lone_gs = brute_force_ground_states(lone);
  CHECK(lone_gs.min_energy == -5.0);
  REQUIRE(lone_gs.states.size() == 1);
  CHECK(lone_gs.states[0] == 1);

  auto dist = lone_gs.uniform_distribution();
  REQUIRE(dist.size() == 2);
  CHECK(dist[0] == 0.0);
  CHECK(dist[1] == 1.0);
}

TEST_CASE("brute force agrees with direct enumeration") {
  auto gaussian = test_util::random_model(10, 77);
  auto expected = test_util::enumerate_ground_states(gaussian);
  auto got = brute_force_ground_states(gaussian);
  CHECK(got.min_energy == expected.min_energy);
  CHECK(got.states == expected.states);

  auto bern = gen_bernoulli_spin_glass(12, 0.5, 3).model;
  auto expected_b = test_util::enumerate_ground_states(bern);
  auto got_b = brute_force_ground_states(bern);
  CHECK(got_b.min_energy == expected_b.min_energy);
  CHECK(got_b.states == expected_b.states);
}

TEST_CASE("brute force refuses oversized instances by name") {
  auto m = test_util::random_model(12, 5);
  CHECK_THROWS_WITH_AS(brute_force_ground_states(m, 10),
                       doctest::Contains("exceeds the exhaustive cap"),
                       InvalidInputError);
}

TEST_CASE("kernels are row-stochastic for every engine") {
  auto tri = test_util::triangle(-1.0);
  auto rand8 = test_util::random_model(8, 42);
  for (const IsingModel* m : {&tri, &rand8}) {
    for (double beta : {0.0, 0.5, 2.0}) {
      check_rows_stochastic(
          build_exact_kernel(*m, EngineSpec::sca(auto_pinning(*m)), beta));
      check_rows_stochastic(
          build_exact_kernel(*m, EngineSpec::epsilon_sca(0.6), beta));
      check_rows_stochastic(
          build_exact_kernel(*m, EngineSpec::glauber(), beta));
    }
  }
}

TEST_CASE("parallel kernels put positive mass everywhere") {
  auto m = test_util::random_model(6, 18);
  auto k = build_exact_kernel(m, EngineSpec::sca(homogeneous_pinning(m, 0.5)),
                              1.5);
  double least = 1.0;
  for (double p : k.probs) least = std::min(least, p);
  CHECK(least > 0.0);
}

TEST_CASE("kernel entries at infinite temperature") {
  auto tri = test_util::triangle(1.0);
  // Every parallel row is uniform at beta = 0.
  auto sca0 = build_exact_kernel(tri, EngineSpec::sca({0.0, 0.0, 0.0}), 0.0);
  for (double p : sca0.probs) CHECK(p == doctest::Approx(0.125).epsilon(1e-14));
  // The single-site chain moves mass 1/(2N) to each neighbor, keeps the rest.
  auto g0 = build_exact_kernel(tri, EngineSpec::glauber(), 0.0);
  for (std::uint64_t sigma = 0; sigma < 8; ++sigma) {
    for (std::uint64_t tau = 0; tau < 8; ++tau) {
      const int dist = std::popcount(sigma ^ tau);
      const double expected = dist == 0 ? 0.5 : (dist == 1 ? 1.0 / 6.0 : 0.0);
      CHECK(g0.entry(sigma, tau) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernel golden entry: aligned pair staying aligned") {
  // Ferromagnetic pair at beta 2, no pinning: each site keeps +1 with
  // probability logistic(2), so the (++ -> ++) entry is its square.
  IsingModel pair(2, {{0, 1, 1.0}});
  auto k = build_exact_kernel(pair, EngineSpec::sca({0.0, 0.0}), 2.0);
  CHECK(k.entry(0b11, 0b11) ==
        doctest::Approx(0.775803492574376).epsilon(1e-13));
  // Row for (+-): site 0 sees field -1, site 1 sees +1; independent draws.
  const double keep = logistic(-2.0);
  CHECK(k.entry(0b01, 0b01) ==
        doctest::Approx(keep * keep).epsilon(1e-13));
}

TEST_CASE("kernel size cap is enforced") {
  auto m = test_util::random_model(13, 90, false, 0.3);
  CHECK_THROWS_WITH_AS(build_exact_kernel(m, EngineSpec::glauber(), 0.5),
                       doctest::Contains("dense-kernel cap"),
                       InvalidInputError);
}

TEST_CASE("lazy chain at epsilon 1 collapses onto the unpinned parallel chain") {
  for (int n : {2, 3, 4}) {
    auto m = test_util::random_model(n, 500 + static_cast<std::uint64_t>(n));
    for (double beta : {0.0, 0.4, 1.7}) {
      auto esca = build_exact_kernel(m, EngineSpec::epsilon_sca(1.0), beta);
      auto sca = build_exact_kernel(
          m, EngineSpec::sca(homogeneous_pinning(m, 0.0)), beta);
      for (std::size_t i = 0; i < esca.probs.size(); ++i)
        CHECK(esca.probs[i] == doctest::Approx(sca.probs[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-site kernel satisfies detailed balance in the Gibbs measure") {
  for (int n : {3, 4}) {
    auto m = test_util::random_model(n, 700 + static_cast<std::uint64_t>(n));
    const double beta = 0.7;
    auto k = build_exact_kernel(m, EngineSpec::glauber(), beta);
    auto pi = gibbs_distribution(m, beta);
    for (std::uint64_t a = 0; a < k.dim; ++a)
      for (std::uint64_t b = 0; b < k.dim; ++b) {
        const double lhs = pi[a] * k.entry(a, b);
        const double rhs = pi[b] * k.entry(b, a);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      }
  }
}

TEST_CASE("stationary distribution fixes the kernel") {
  auto m = test_util::random_model(5, 31);
  auto k = build_exact_kernel(m, EngineSpec::epsilon_sca(0.7), 0.9);
  auto st = stationary_distribution(k);
  CHECK(st.iterations >= 1);
  // One more application moves nothing.
  std::vector<double> after(k.dim, 0.0);
  for (std::uint64_t sigma = 0; sigma < k.dim; ++sigma)
    for (std::uint64_t tau = 0; tau < k.dim; ++tau)
      after[tau] += st.distribution[sigma] * k.entry(sigma, tau);
  CHECK(tv_distance(st.distribution, after) <= 1e-12);
}

TEST_CASE("stationary distribution at infinite temperature is uniform") {
  auto m = test_util::triangle(1.0);
  auto k = build_exact_kernel(m, EngineSpec::sca({0.0, 0.0, 0.0}), 0.0);
  auto st = stationary_distribution(k);
  for (double p : st.distribution)
    CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("stationary iteration reports non-convergence") {
  auto m = test_util::random_model(4, 8);
  auto k = build_exact_kernel(m, EngineSpec::epsilon_sca(0.5), 3.0);
  CHECK_THROWS_AS(stationary_distribution(k, 1e-13, 1), NumericalError);
}

TEST_CASE("total variation distance on worked values") {
  std::vector<double> p{0.5, 0.5, 0.0, 0.0};
  std::vector<double> q{0.0, 0.25, 0.5, 0.25};
  CHECK(tv_distance(p, q) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(tv_distance(p, p) == 0.0);
  std::vector<double> bad{0.5, 0.2, 0.0, 0.0};
  CHECK_THROWS_AS(tv_distance(p, bad), InvalidInputError);
  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(tv_distance(p, shorter), InvalidInputError);
}

TEST_CASE("contraction factors on the unit triangle, frozen values") {
  auto tri = test_util::triangle(-1.0);
  const double beta = 0.1;

  auto sca = sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), beta, 0.01);
  CHECK(sca.applicable);
  // 2 * tanh(0.05)
  CHECK(sca.r == doctest::Approx(0.09991674991575994).epsilon(1e-12));
  CHECK(sca.t_bound == 3);
  CHECK(sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), beta, 0.1).t_bound ==
        2);

  auto esca = epsilon_sca_mixing_bound(tri, 0.5, beta, 0.01);
  CHECK(esca.applicable);
  // (1 - 0.5) + 0.5 * 2 * tanh(0.05)
  CHECK(esca.r == doctest::Approx(0.54995837495788).epsilon(1e-12));
  CHECK(esca.t_bound == 10);
  CHECK(epsilon_sca_mixing_bound(tri, 0.5, beta, 0.1).t_bound == 6);
}

TEST_CASE("contraction degenerates gracefully at infinite temperature") {
  auto tri = test_util::triangle(1.0);
  auto sca = sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), 0.0, 0.01);
  CHECK(sca.r == 0.0);
  CHECK(sca.applicable);
  CHECK(sca.t_bound == 1);

  auto esca = epsilon_sca_mixing_bound(tri, 0.25, 0.0, 0.01);
  CHECK(esca.r == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("bounds report inapplicability instead of nonsense") {
  auto tri = test_util::triangle(-1.0);
  auto strong = sca_mixing_bound(tri, homogeneous_pinning(tri, 100.0), 5.0, 0.01);
  CHECK(!strong.applicable);
  CHECK(strong.r >= 1.0);

  CHECK_THROWS_AS(sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), 0.1, 0.0),
                  InvalidInputError);
  CHECK_THROWS_AS(sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), 0.1, 1.0),
                  InvalidInputError);
  CHECK_THROWS_AS(epsilon_sca_mixing_bound(tri, 0.0, 0.1, 0.5),
                  InvalidInputError);
  CHECK_THROWS_AS(sca_mixing_bound(tri, std::vector<double>{0.0, 0.0}, 0.1, 0.5),
                  InvalidInputError);
}

TEST_CASE("mixing verification on the worked lazy-triangle example") {
  auto tri = test_util::triangle(-1.0);
  auto report = verify_mixing(tri, EngineSpec::epsilon_sca(0.5), 0.1, 0.01);
  CHECK(report.bound.applicable);
  CHECK(report.bound.r == doctest::Approx(0.54995837495788).epsilon(1e-9));
  CHECK(report.bound.t_bound == 10);
  REQUIRE(report.tv_after_bound.has_value());
  CHECK(*report.tv_after_bound <= 0.01);
  CHECK(report.pass);
  CHECK(report.stationary_iterations >= 1);
}

TEST_CASE("mixing verification is immediate at infinite temperature") {
  auto tri = test_util::triangle(1.0);
  auto report =
      verify_mixing(tri, EngineSpec::sca(homogeneous_pinning(tri, 0.0)), 0.0,
                    0.05);
  CHECK(report.bound.t_bound == 1);
  REQUIRE(report.tv_after_bound.has_value());
  CHECK(*report.tv_after_bound <= 1e-12);
  CHECK(report.pass);
}

TEST_CASE("mixing verification declines when the bound is inapplicable") {
  auto tri = test_util::triangle(-1.0);
  auto report =
      verify_mixing(tri, EngineSpec::sca(homogeneous_pinning(tri, 100.0)), 5.0,
                    0.01);
  CHECK(!report.bound.applicable);
  CHECK(!report.tv_after_bound.has_value());
  CHECK(!report.pass);

  CHECK_THROWS_AS(verify_mixing(tri, EngineSpec::glauber(), 0.5, 0.01),
                  InvalidInputError);
}

TEST_CASE("coupling disagreement: lazy chain keeps its own term at 1 - epsilon") {
  // Vertex 2 is isolated, so only the flipped-site term remains.
  IsingModel m(3, {{0, 1, 2.0}});
  for (double eps : {0.2, 0.5, 0.9, 1.0}) {
    auto spec = EngineSpec::epsilon_sca(eps);
    for (std::uint64_t code = 0; code < 8; ++code) {
      const double d =
          coupling_disagreement(m, spec, 0.7, config_from_code(3, code), 2);
      CHECK(std::abs(d - (1.0 - eps)) <= 1e-15);
    }
  }
}

TEST_CASE("coupling disagreement never exceeds the contraction factor") {
  auto tri = test_util::triangle(-1.0);
  auto rand8 = test_util::random_model(8, 64, false, 0.6);

  struct Case {
    const IsingModel* m;
    EngineSpec spec;
    double beta;
    double r;
  };
  std::vector<Case> cases;
  cases.push_back({&tri, EngineSpec::epsilon_sca(0.5), 0.1,
                   epsilon_sca_mixing_bound(tri, 0.5, 0.1, 0.5).r});
  cases.push_back({&tri, EngineSpec::sca(homogeneous_pinning(tri, 0.0)), 0.1,
                   sca_mixing_bound(tri, homogeneous_pinning(tri, 0.0), 0.1, 0.5).r});
  cases.push_back({&tri, EngineSpec::sca(auto_pinning(tri)), 0.3,
                   sca_mixing_bound(tri, auto_pinning(tri), 0.3, 0.5).r});
  cases.push_back({&rand8, EngineSpec::epsilon_sca(0.8), 0.05,
                   epsilon_sca_mixing_bound(rand8, 0.8, 0.05, 0.5).r});
  cases.push_back({&rand8, EngineSpec::sca(auto_pinning(rand8)), 0.02,
                   sca_mixing_bound(rand8, auto_pinning(rand8), 0.02, 0.5).r});

  for (const auto& c : cases) {
    const std::uint64_t dim = std::uint64_t{1} << c.m->num_vertices();
    for (std::uint64_t code = 0; code < dim; ++code) {
      const auto config = config_from_code(c.m->num_vertices(), code);
      for (int x = 0; x < c.m->num_vertices(); ++x)
        CHECK(coupling_disagreement(*c.m, c.spec, c.beta, config, x) <=
              c.r + 1e-12);
    }
  }
}

TEST_CASE("one-step sampler frequencies match the kernel row") {
  const std::uint64_t samples = 1000000;
  auto check_against_row = [samples](const IsingModel& m, const EngineSpec& spec,
                                     double beta,
                                     const SpinConfiguration& start) {
    auto kernel = build_exact_kernel(m, spec, beta);
    const std::uint64_t row = config_code(start);
    std::vector<std::uint64_t> counts(kernel.dim, 0);
    ChainState state{start, Rng(2024), 0};
    StepScratch scratch;
    for (std::uint64_t i = 0; i < samples; ++i) {
      state.config = start;
      switch (spec.kind()) {
        case EngineSpec::Kind::Sca:
          sca_step(m, state, spec.pinning(), beta, &scratch);
          break;
        case EngineSpec::Kind::EpsilonSca:
          epsilon_sca_step(m, state, spec.epsilon(), beta, &scratch);
          break;
        case EngineSpec::Kind::Glauber:
          glauber_step(m, state, beta);
          break;
      }
      ++counts[config_code(state.config)];
    }
    for (std::uint64_t tau = 0; tau < kernel.dim; ++tau) {
      const double p = kernel.entry(row, tau);
      const double freq =
          static_cast<double>(counts[tau]) / static_cast<double>(samples);
      const double sigma =
          std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(samples));
      CHECK(std::abs(freq - p) <= 4.0 * sigma);
    }
  };

  IsingModel pair(2, {{0, 1, 1.0}});
  check_against_row(pair, EngineSpec::sca({0.3, 0.2}), 0.7,
                    SpinConfiguration({-1, 1}));
  auto tri = test_util::triangle(-1.0);
  check_against_row(tri, EngineSpec::epsilon_sca(0.6), 0.5,
                    SpinConfiguration({1, -1, 1}));
  check_against_row(pair, EngineSpec::glauber(), 0.9,
                    SpinConfiguration({1, -1}));
}

TEST_CASE("annealed distribution drifts toward the ground states") {
  // Ferromagnetic 6-ring under the log schedule: the distribution after 1e5
  // inhomogeneous parallel steps must be closer to uniform-over-ground-states
  // than it was after 1e2 steps.
  auto ring = test_util::ring(6, 1.0);
  auto pinning = auto_pinning(ring);
  auto schedule = make_log_schedule(ring, pinning).schedule;
  auto spec = EngineSpec::sca(pinning);

  auto target = brute_force_ground_states(ring).uniform_distribution();

  const std::size_t dim = 64;
  std::vector<double> mu(dim, 1.0 / 64.0), nu(dim);
  double tv_1e2 = -1.0;
  for (std::uint64_t t = 1; t <= 100000; ++t) {
    auto kernel = build_exact_kernel(ring, spec, schedule.beta_at(t));
    std::fill(nu.begin(), nu.end(), 0.0);
    for (std::uint64_t sigma = 0; sigma < dim; ++sigma) {
      const double w = mu[sigma];
      const double* row = kernel.probs.data() + sigma * dim;
      for (std::uint64_t tau = 0; tau < dim; ++tau) nu[tau] += w * row[tau];
    }
    mu.swap(nu);
    if (t == 100) tv_1e2 = tv_distance(mu, target);
  }
  const double tv_1e5 = tv_distance(mu, target);
  CHECK(tv_1e2 > 0.0);
  CHECK(tv_1e5 < tv_1e2);
}

TEST_CASE("annealing never beats the exhaustive oracle and does reach it") {
  struct Fixture {
    IsingModel model;
    double epsilon;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({test_util::random_model(10, 90210, false), 0.7});
  fixtures.push_back({gen_bernoulli_spin_glass(12, 0.5, 3).model, 0.7});
  fixtures.push_back({gen_max_cut(14, 0.3, 9).model, 0.7});

  auto schedule = AnnealingSchedule::exponential(1e-3, 1e-3);
  for (const auto& f : fixtures) {
    auto oracle = brute_force_ground_states(f.model);
    const double guard = 1e-9 * (1.0 + std::abs(oracle.min_energy));
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto rec = anneal(f.model, EngineSpec::epsilon_sca(f.epsilon), schedule,
                        10000, derive_seed(42, 0, seed));
      CHECK(rec.min_energy >= oracle.min_energy - guard);
      best = std::min(best, rec.min_energy);
    }
    CHECK(best == doctest::Approx(oracle.min_energy).epsilon(1e-12));
  }
}
