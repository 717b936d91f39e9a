#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tsph/error.hpp"
#include "tsph/theory.hpp"

using namespace tsph;
using namespace tsph::theory;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const IntervalPair kPair{1, 2, 1.5, 2.5};

std::vector<std::pair<double, IntervalPair>> pair_points() {
  return {{1.0, {1, 2, 1.5, 2.5}},   {0.5, {0.2, 1.0, 0.7, 1.9}}, {2.0, {1, 1.4, 1.6, 2.3}},
          {1.3, {0.5, 0.9, 0.6, 1.2}}, {0.8, {2, 3.5, 2.5, 3.6}},  {1.7, {0.1, 0.6, 0.6, 1.1}}};
}

}  // namespace

TEST_SUITE("theory") {
  TEST_CASE("reference values") {
    CHECK(geometric_parameter(1, 0.5) == doctest::Approx(0.6321205588).epsilon(1e-10));
    CHECK(expected_quadrant_content(1, 0.5) == doctest::Approx(0.5819767069).epsilon(1e-10));
    CHECK(intensity_density(1, 0.5) == doctest::Approx(7.970).epsilon(1e-3));
    CHECK(expected_excess(1, 0.5) == doctest::Approx(0.4586751454).epsilon(1e-9));
    CHECK(winding_covariance(1, kPair) == doctest::Approx(0.0665918).epsilon(1e-6));
    const auto e = exit_probabilities(1, 0.5, 0.5);
    CHECK(e.up == doctest::Approx((1 - std::exp(-1.0)) / (1 - std::exp(-2.0))).epsilon(1e-14));
    CHECK(e.up == doctest::Approx(0.7311).epsilon(1e-4));
  }

  TEST_CASE("elementary identities") {
    for (double m : {0.3, 1.0, 2.5}) {
      for (double delta : {0.01, 0.5, 3.0}) {
        const double p = geometric_parameter(m, delta);
        CHECK(p > 0);
        CHECK(p < 1);
        CHECK(rel(expected_quadrant_content(m, delta), decay(m, delta) / p) < 1e-12);
        CHECK(rel(geometric_parameter(2 * m, delta / 2), p) < 1e-14);
      }
    }
    CHECK(geometric_parameter(1, 50) == doctest::Approx(1.0));
    CHECK_THROWS_AS(geometric_parameter(0, 1), ValidationError);
    CHECK_THROWS_AS(expected_quadrant_content(1, -1), ValidationError);
  }

  TEST_CASE("exit probabilities") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 3);
    for (int i = 0; i < 200; ++i) {
      const auto e = exit_probabilities(u(rng), u(rng), u(rng));
      CHECK(std::abs(e.up + e.down - 1.0) < 1e-14);
    }
    const auto far = exit_probabilities(1.2, 0.7, 1e3);
    const auto inf = exit_probabilities(1.2, 0.7, INFINITY);
    CHECK(rel(far.down, std::exp(-2 * 1.2 * 0.7)) < 1e-12);
    CHECK(rel(inf.down, far.down) < 1e-12);
  }

  TEST_CASE("harmonic numbers") {
    CHECK(harmonic(1) == Rational(1));
    CHECK(harmonic(2) == Rational(3, 2));
    CHECK(harmonic(4) == Rational(25, 12));
    CHECK(harmonic(4).to_string() == "25/12");
    CHECK(harmonic(0) == Rational(0));
  }

  TEST_CASE("excess as a harmonic series") {
    for (double m : {0.5, 1.0, 2.0}) {
      for (double delta : {0.2, 0.5, 1.5}) {
        const double p = geometric_parameter(m, delta);
        const double q = 1 - p;
        double sum = 0, hk = 0, qk = 1;
        for (int k = 1; k < 100000; ++k) {
          hk += 1.0 / k;
          qk *= q;
          const double term = hk * p * qk;
          sum += term;
          if (term < 1e-20) break;
        }
        CHECK(rel(expected_excess(m, delta), sum) < 1e-12);
      }
    }
  }

  TEST_CASE("small-interval asymptotics") {
    const double md = 1e-3;
    CHECK(std::abs(expected_excess(1, md) / std::abs(std::log(2 * md)) - 1) < 1e-2);
    CHECK(std::abs(intensity_density(1, md) * md * md * md - 1) < 1e-2);
    CHECK(std::abs(intensity_density(2, md / 2) * 2 * std::pow(md / 2, 3) - 1) < 1e-2);
  }

  TEST_CASE("intensity equals the mixed derivative of the quadrant content") {
    const double pts[][3] = {{1, 1, 1.5}, {1, 0.2, 1.2}, {0.5, 2, 2.7}, {2, 1, 1.3}, {1.5, 0.5, 1.4},
                             {0.7, 3, 3.9}, {1, 1, 1.3}, {1.2, 0.4, 0.8}, {3, 1, 1.35}, {0.9, 2, 3}};
    for (const auto& p : pts) {
      CHECK(rel(intensity_density_numeric(p[0], p[1], p[2]), intensity_density(p[0], p[2] - p[1])) < 1e-6);
    }
  }

  TEST_CASE("shift invariance") {
    for (double c : {0.1, 1.0, 7.5}) {
      const IntervalPair s{kPair.b1 + c, kPair.d1 + c, kPair.b2 + c, kPair.d2 + c};
      CHECK(rel(winding_covariance(1, s), winding_covariance(1, kPair)) < 1e-12);
      CHECK(rel(two_interval_gf(1, s, 0.3, 0.7), two_interval_gf(1, kPair, 0.3, 0.7)) < 1e-12);
      CHECK(rel(intensity_density_numeric(1, 1 + c, 1.5 + c), intensity_density(1, 0.5)) < 1e-6);
    }
  }

  TEST_CASE("two-interval generating function") {
    for (const auto& [m, iv] : pair_points()) {
      CHECK(std::abs(two_interval_gf(m, iv, 1, 1) - 1) < 1e-12);
      for (double x : {0.0, 0.4, 1.0}) {
        for (double y : {-0.5, 0.3, 1.0}) {
          CHECK(rel(two_interval_gf_exponential(m, iv, x, y), two_interval_gf(m, iv, x, y)) < 1e-10);
        }
      }
      // dH/dx at (1, 1) is the mean winding count around the first interval.
      const double h = 1e-5;
      const double dx = (two_interval_gf(m, iv, 1 + h, 1) - two_interval_gf(m, iv, 1 - h, 1)) / (2 * h);
      CHECK(rel(dx, expected_quadrant_content(m, iv.d1 - iv.b1)) < 1e-6);
      const double dy = (two_interval_gf(m, iv, 1, 1 + h) - two_interval_gf(m, iv, 1, 1 - h)) / (2 * h);
      CHECK(rel(dy, expected_quadrant_content(m, iv.d2 - iv.b2)) < 1e-6);
    }
    CHECK_THROWS_AS(two_interval_gf(1, kPair, 10, 10), DivergenceError);
    CHECK_THROWS_AS(two_interval_gf(1, {1, 3, 1.5, 2.5}, 1, 1), ValidationError);
  }

  TEST_CASE("covariance equals the mixed derivative of log H") {
    for (const auto& [m, iv] : pair_points()) {
      CHECK(rel(winding_covariance_numeric(m, iv), winding_covariance(m, iv)) < 1e-6);
    }
    CHECK(winding_covariance(1, {1, 2, 20, 40}) < 1e-15);
  }

  TEST_CASE("g2 by Richardson extrapolation") {
    const auto r = g2_density(1, kPair);
    CHECK(r.convergence < 1e-6);
    CHECK(rel(r.value, oracle::g2_analytic(1, 1, 2, 1.5, 2.5)) < 1e-6);
    CHECK(r.printed == doctest::Approx(g2_printed(1, kPair)));

    for (const auto& [m, iv] : pair_points()) {
      const auto g = g2_density(m, iv, 1e-2 / m);
      CHECK(rel(g.value, oracle::g2_analytic(m, iv.b1, iv.d1, iv.b2, iv.d2)) < 1e-5);
    }

    // Level shifts leave g2 unchanged; scaling levels by 1/s and m by s
    // scales it by s^4.
    const IntervalPair shifted{kPair.b1 + 0.7, kPair.d1 + 0.7, kPair.b2 + 0.7, kPair.d2 + 0.7};
    CHECK(rel(g2_density(1, shifted).value, r.value) < 1e-6);
    const double s = 2.0;
    const IntervalPair scaled{kPair.b1 / s, kPair.d1 / s, kPair.b2 / s, kPair.d2 / s};
    CHECK(rel(g2_density(s, scaled, 1e-2 / s).value / std::pow(s, 4), r.value) < 1e-6);

    // Swapping the two interval lengths with d2 - b1 fixed is a symmetry.
    const IntervalPair swapped{kPair.b1, kPair.b1 + (kPair.d2 - kPair.b2), kPair.d2 - (kPair.d1 - kPair.b1), kPair.d2};
    const IntervalPair other{0.5, 1.2, 0.9, 2.0};
    const IntervalPair other_swapped{0.5, 0.5 + 1.1, 2.0 - 0.7, 2.0};
    CHECK(rel(g2_density(1, swapped).value, r.value) < 1e-6);
    CHECK(rel(g2_density(1, other_swapped).value, g2_density(1, other).value) < 1e-6);
  }
}
