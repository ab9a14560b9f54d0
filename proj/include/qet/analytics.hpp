#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qet {

// Closed-form teleportation predictions for the infinite critical chain.
//
//   h(n)     = prod_{k=1}^{n-1} k^{n-k}
//   Delta(n) = (2/pi)^n 2^{2n(n-1)} h(n)^4 / ((4n^2 - 1) h(2n))
//   E_B(n)   = (2J/pi) [sqrt(1 + (pi Delta(n) / 2)^2) - 1]
//   Delta(n) ~ (1/4) e^{1/4} 2^{1/12} c^{-3} n^{-9/4}   (large n)
//   E_r      = (6/pi - 1) J
//
// Every product is accumulated in the log domain; 2^{2n(n-1)} alone leaves
// double range at n = 16.

inline constexpr double kDefaultAsymptoticConstant = 1.28;

struct AnalyticConfig {
  double coupling = 1.0;
  double c_constant = kDefaultAsymptoticConstant;
  void validate() const;
};

double log_h(std::int64_t n);
double log_delta(std::int64_t n);
double delta(std::int64_t n);

double eb_closed_form(const AnalyticConfig& cfg, std::int64_t n);

double asymptotic_prefactor(double c_constant);
double delta_asymptotic(const AnalyticConfig& cfg, double n);

double residual_energy_analytic(const AnalyticConfig& cfg);

// Least-squares c in log Delta(n) = log(prefactor(c)) - (9/4) log n over
// n in [n_lo, n_hi], with the exponent held fixed.
double fit_asymptotic_constant(std::int64_t n_lo, std::int64_t n_hi);

// -d log Delta / d log n from the forward difference at n.
double local_delta_exponent(std::int64_t n);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Slope of log E_B(n) against log n for integer n in [n_lo, n_hi].
double closed_form_loglog_slope(const AnalyticConfig& cfg, std::int64_t n_lo, std::int64_t n_hi);

}  // namespace qet
