#include "tsph/theory.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsph/error.hpp"

namespace tsph::theory {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw ValidationError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  return Rational(a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den);
}

Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num, b.den); }

Rational operator/(const Rational& a, std::int64_t k) {
  const std::int64_t g = std::gcd(a.num < 0 ? -a.num : a.num, k < 0 ? -k : k);
  return g == 0 ? Rational(0) : Rational(a.num / g, a.den * (k / g));
}

namespace {

void require_positive(double m, double delta) {
  if (!(m > 0.0) || !(delta > 0.0)) throw ValidationError("drift and interval length must be positive");
}

}  // namespace

double decay(double m, double s) { return std::exp(-2.0 * m * s); }

double geometric_parameter(double m, double delta) {
  require_positive(m, delta);
  return -std::expm1(-2.0 * m * delta);
}

double expected_quadrant_content(double m, double delta) {
  require_positive(m, delta);
  return 1.0 / std::expm1(2.0 * m * delta);
}

double intensity_density(double m, double delta) {
  require_positive(m, delta);
  const double e = std::exp(2.0 * m * delta);
  const double em1 = std::expm1(2.0 * m * delta);
  return 4.0 * m * m * e * (1.0 + e) / (em1 * em1 * em1);
}

Rational harmonic(int k) {
  if (k < 0) throw ValidationError("harmonic number needs k >= 0");
  Rational h(0);
  for (int j = 1; j <= k; ++j) h = h + Rational(1, j);
  return h;
}

double expected_excess(double m, double delta) {
  require_positive(m, delta);
  return -std::log(-std::expm1(-2.0 * m * delta));
}

ExitProbabilities exit_probabilities(double m, double dl, double dr) {
  if (!(m > 0.0) || !(dl > 0.0) || !(dr > 0.0)) {
    throw ValidationError("exit probabilities need m, dl, dr > 0");
  }
  if (std::isinf(dr)) {
    const double down = decay(m, dl);
    return {1.0 - down, down};
  }
  // (1 - E(dl)) / (1 - E(dl + dr)), written with expm1 for small arguments.
  const double denom = -std::expm1(-2.0 * m * (dl + dr));
  const double up = -std::expm1(-2.0 * m * dl) / denom;
  const double down = decay(m, dl) * (-std::expm1(-2.0 * m * dr)) / denom;
  return {up, down};
}

void IntervalPair::validate() const {
  if (!(b1 < d1) || !(b2 < d2)) throw ValidationError("intervals need b < d");
  if (!(b1 < b2) || !(d1 < d2)) {
    throw ValidationError("intervals must be non-nested with b1 < b2 and d1 < d2");
  }
}

namespace {

struct PairWeights {
  double p, q, p1, q1, p2, q2;
};

PairWeights pair_weights(double m, const IntervalPair& iv) {
  iv.validate();
  const auto top = exit_probabilities(m, iv.d2 - iv.b2, INFINITY);
  const auto first = exit_probabilities(m, iv.d1 - iv.b1, iv.d2 - iv.d1);
  const auto second = exit_probabilities(m, iv.b2 - iv.b1, iv.d2 - iv.b2);
  return {top.up, top.down, first.up, first.down, second.up, second.down};
}

}  // namespace

double two_interval_gf(double m, const IntervalPair& iv, double x, double y) {
  const auto w = pair_weights(m, iv);
  // The series has non-negative coefficients, so it converges at (x, y) iff
  // the denominator stays positive along t (|x|, |y|), t in [0, 1].
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double lin = ax * w.q1 + ay * w.q * w.p2;
  const double quad = ax * ay * w.q * (w.q1 * w.p2 - w.p1 * w.q2);
  auto denom_at = [&](double t) { return 1.0 - t * lin + t * t * quad; };
  bool converges = denom_at(1.0) > 0.0;
  if (quad > 0.0) {
    const double vertex = lin / (2.0 * quad);
    if (vertex > 0.0 && vertex < 1.0) converges = converges && denom_at(vertex) > 0.0;
  }
  if (!converges) throw DivergenceError("generating function diverges at the evaluation point");
  return w.p * w.p1 / (1.0 - x * w.q1 - y * w.q * w.p2 + x * y * w.q * (w.q1 * w.p2 - w.p1 * w.q2));
}

double two_interval_gf_exponential(double m, const IntervalPair& iv, double x, double y) {
  iv.validate();
  // Factors exp(2 m level), rescaled by exp(-2 m b1) to keep them O(1).
  auto e = [&](double level) { return std::exp(2.0 * m * (level - iv.b1)); };
  const double eb1 = e(iv.b1), ed1 = e(iv.d1), eb2 = e(iv.b2), ed2 = e(iv.d2);
  const double num = (eb1 - ed1) * (eb2 - ed2);
  const double den = ed1 * (eb1 - ed2) + eb1 * (ed2 - ed1) * x + ed1 * (eb2 - eb1) * y +
                     eb1 * (ed1 - eb2) * x * y;
  return -num / den;
}

double winding_covariance(double m, const IntervalPair& iv) {
  iv.validate();
  if (!(m > 0.0)) throw ValidationError("drift must be positive");
  return decay(m, iv.d2 - iv.b1) / (std::expm1(-2.0 * m * (iv.d1 - iv.b1)) *
                                    std::expm1(-2.0 * m * (iv.d2 - iv.b2)));
}

double mixed_partial(const std::function<double(double, double)>& f, double x, double y,
                     double hx, double hy) {
  return (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)) /
         (4.0 * hx * hy);
}

double intensity_density_numeric(double m, double b, double d) {
  if (!(b < d)) throw ValidationError("intensity needs b < d");
  require_positive(m, d - b);
  using R = long double;
  auto q = [m](R bb, R dd) { return 1 / std::expm1(2 * R(m) * (dd - bb)); };
  auto diff = [&](R h) {
    return (q(b + h, d + h) - q(b + h, d - h) - q(b - h, d + h) + q(b - h, d - h)) / (4 * h * h);
  };
  const R h = 0.02L * (d - b);
  return -static_cast<double>((4 * diff(h / 2) - diff(h)) / 3);
}

double winding_covariance_numeric(double m, const IntervalPair& iv, double h) {
  auto log_h = [&](double x, double y) { return std::log(two_interval_gf(m, iv, x, y)); };
  return mixed_partial(log_h, 1.0, 1.0, h, h);
}

namespace {

using Real = long double;

Real covariance_ld(Real m, Real b1, Real d1, Real b2, Real d2) {
  return std::exp(-2 * m * (d2 - b1)) /
         (std::expm1(-2 * m * (d1 - b1)) * std::expm1(-2 * m * (d2 - b2)));
}

// Product of four central differences, one per coordinate.
Real fourth_mixed(Real m, const IntervalPair& iv, Real h) {
  Real sum = 0;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<Real, 4> s{};
    int sign = 1;
    for (int k = 0; k < 4; ++k) {
      s[k] = (mask >> k) & 1 ? -h : h;
      if ((mask >> k) & 1) sign = -sign;
    }
    sum += sign * covariance_ld(m, iv.b1 + s[0], iv.d1 + s[1], iv.b2 + s[2], iv.d2 + s[3]);
  }
  return sum / (16 * h * h * h * h);
}

Real richardson(Real m, const IntervalPair& iv, Real h) {
  return (4 * fourth_mixed(m, iv, h / 2) - fourth_mixed(m, iv, h)) / 3;
}

}  // namespace

G2Report g2_density(double m, const IntervalPair& iv, double h) {
  iv.validate();
  if (!(m > 0.0) || !(h > 0.0)) throw ValidationError("g2 needs m > 0 and h > 0");
  G2Report r{};
  r.coarse_value = static_cast<double>(richardson(m, iv, h));
  r.value = static_cast<double>(richardson(m, iv, h / 2));
  r.convergence = std::abs(r.value - r.coarse_value) / std::abs(r.value);
  r.printed = g2_printed(m, iv);
  r.printed_ratio = r.printed / r.value;
  return r;
}

double g2_printed(double m, const IntervalPair& iv) {
  iv.validate();
  const double a = std::exp(2.0 * m * iv.b1) - std::exp(2.0 * m * iv.d1);
  const double b = std::exp(2.0 * m * iv.b2) - std::exp(2.0 * m * iv.d2);
  return 64.0 * std::pow(m, 4) * std::exp(2.0 * iv.b1 + iv.b2 + 2.0 * iv.d1 + iv.d2) /
         (a * a * a * b * b * b);
}

}  // namespace tsph::theory
