#include "qet/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qet {

namespace {

void check_index(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1, got " + std::to_string(n));
}

// Kahan-compensated long double sum of (n - k) log k.
long double log_h_ld(std::int64_t n) {
  long double sum = 0.0L;
  long double carry = 0.0L;
  for (std::int64_t k = 2; k < n; ++k) {
    const long double term = static_cast<long double>(n - k) * std::log(static_cast<long double>(k)) - carry;
    const long double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

}  // namespace

void AnalyticConfig::validate() const {
  if (!(coupling > 0.0) || !std::isfinite(coupling)) throw std::invalid_argument("coupling J must be positive");
  if (!(c_constant > 0.0) || !std::isfinite(c_constant)) throw std::invalid_argument("c must be positive");
}

double log_h(std::int64_t n) {
  check_index(n);
  return static_cast<double>(log_h_ld(n));
}

double log_delta(std::int64_t n) {
  check_index(n);
  const long double nn = static_cast<long double>(n);
  const long double ln2 = std::numbers::ln2_v<long double>;
  const long double ln_pi = std::log(std::numbers::pi_v<long double>);
  const long double value = nn * (ln2 - ln_pi) + 2.0L * nn * (nn - 1.0L) * ln2 + 4.0L * log_h_ld(n) -
                            std::log(4.0L * nn * nn - 1.0L) - log_h_ld(2 * n);
  return static_cast<double>(value);
}

double delta(std::int64_t n) { return std::exp(log_delta(n)); }

double eb_closed_form(const AnalyticConfig& cfg, std::int64_t n) {
  cfg.validate();
  const double x = 0.5 * std::numbers::pi * delta(n);
  // sqrt(1 + x^2) - 1 == x^2 / (sqrt(1 + x^2) + 1)
  return 2.0 * cfg.coupling / std::numbers::pi * (x * x / (std::sqrt(1.0 + x * x) + 1.0));
}

double asymptotic_prefactor(double c_constant) {
  return 0.25 * std::exp(0.25) * std::pow(2.0, 1.0 / 12.0) / (c_constant * c_constant * c_constant);
}

double delta_asymptotic(const AnalyticConfig& cfg, double n) {
  cfg.validate();
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  return asymptotic_prefactor(cfg.c_constant) * std::pow(n, -2.25);
}

double residual_energy_analytic(const AnalyticConfig& cfg) {
  cfg.validate();
  return (6.0 / std::numbers::pi - 1.0) * cfg.coupling;
}

double fit_asymptotic_constant(std::int64_t n_lo, std::int64_t n_hi) {
  check_index(n_lo);
  if (n_hi < n_lo) throw std::invalid_argument("empty fit range");
  // log Delta = log K - 3 log c - 9/4 log n; least squares in log c is the mean residual.
  const double log_k = std::log(asymptotic_prefactor(1.0));
  double sum = 0.0;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    sum += (log_k - 2.25 * std::log(static_cast<double>(n)) - log_delta(n)) / 3.0;
  }
  return std::exp(sum / static_cast<double>(n_hi - n_lo + 1));
}

double local_delta_exponent(std::int64_t n) {
  check_index(n);
  const double dn = std::log(static_cast<double>(n + 1)) - std::log(static_cast<double>(n));
  return -(log_delta(n + 1) - log_delta(n)) / dn;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two or more matched points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double closed_form_loglog_slope(const AnalyticConfig& cfg, std::int64_t n_lo, std::int64_t n_hi) {
  check_index(n_lo);
  std::vector<double> x, y;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(eb_closed_form(cfg, n)));
  }
  return fit_line(x, y).slope;
}

}  // namespace qet
