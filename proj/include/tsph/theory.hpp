#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace tsph::theory {

/// Exact fraction with a positive denominator in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, std::int64_t k);
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// exp(-2 m s).
double decay(double m, double s);

/// Success parameter 1 - exp(-2 m delta) of the straddle-count law.
double geometric_parameter(double m, double delta);

/// Expected number of finite bars straddling an interval of length delta.
double expected_quadrant_content(double m, double delta);

/// Density of the PH0 intensity measure at distance delta from the diagonal.
double intensity_density(double m, double delta);

Rational harmonic(int k);

/// Expected excess of F over M bars straddling an interval of length delta.
double expected_excess(double m, double delta);

struct ExitProbabilities {
  double up;    // leaves [s - dl, s + dr] through the upper end
  double down;  // ... through the lower end
};

/// Exit law of Brownian motion with drift m started inside [s - dl, s + dr];
/// dr may be +infinity.
ExitProbabilities exit_probabilities(double m, double dl, double dr);

/// Two non-nested intervals [b1, d1] and [b2, d2] with b1 < b2, d1 < d2.
struct IntervalPair {
  double b1, d1, b2, d2;
  void validate() const;
};

/// Joint generating function of the winding counts around two intervals
/// (p/q form). Throws DivergenceError outside the domain of convergence.
double two_interval_gf(double m, const IntervalPair& iv, double x, double y);

/// The same function written with exp(2 m level) factors.
double two_interval_gf_exponential(double m, const IntervalPair& iv, double x, double y);

double winding_covariance(double m, const IntervalPair& iv);

/// Central mixed second difference d^2 f / dx dy.
double mixed_partial(const std::function<double(double, double)>& f, double x, double y,
                     double hx, double hy);

/// -d^2 q / db dd of the expected quadrant content, by Richardson-extrapolated
/// central differences in extended precision.
double intensity_density_numeric(double m, double b, double d);

/// d^2 log H / dx dy at (1, 1) by central differences.
double winding_covariance_numeric(double m, const IntervalPair& iv, double h = 1e-4);

struct G2Report {
  double value;           // Richardson estimate on the finer step pair
  double coarse_value;    // Richardson estimate on the coarser step pair
  double convergence;     // relative difference of the two
  double printed;         // closed form as printed in the source
  double printed_ratio;   // printed / value
};

/// Mixed fourth derivative of the winding covariance in (b1, d1, b2, d2),
/// computed with central differences and Richardson extrapolation over
/// steps {h, h/2} and {h/2, h/4}.
G2Report g2_density(double m, const IntervalPair& iv, double h = 1e-2);

/// The closed form exactly as transcribed, kept for the discrepancy report.
double g2_printed(double m, const IntervalPair& iv);

}  // namespace tsph::theory
