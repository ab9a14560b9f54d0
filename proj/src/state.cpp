#include "qet/state.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qet/pauli.hpp"

namespace qet {

void check_same_shape(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension() || a.n_sites() != b.n_sites()) {
    throw std::invalid_argument("state dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
  }
}

StateVector::StateVector(std::size_t n_sites) : n_sites_(n_sites) {
  if (n_sites == 0 || n_sites > kMaxSites) {
    throw std::invalid_argument("state vector needs 1.." + std::to_string(kMaxSites) + " sites");
  }
  amplitudes_.assign(std::size_t{1} << n_sites, Complex{0.0, 0.0});
}

StateVector::StateVector(std::size_t n_sites, std::vector<Complex> amplitudes) : StateVector(n_sites) {
  if (amplitudes.size() != amplitudes_.size()) {
    throw std::invalid_argument("amplitude count does not match 2^n_sites");
  }
  amplitudes_ = std::move(amplitudes);
}

StateVector StateVector::basis(std::size_t n_sites, std::uint64_t index) {
  StateVector out(n_sites);
  if (index >= out.dimension()) throw std::out_of_range("basis index out of range");
  out.amplitudes_[index] = 1.0;
  return out;
}

StateVector StateVector::random(std::size_t n_sites, std::uint64_t seed) {
  StateVector out(n_sites);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& a : out.amplitudes_) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    a = {re, im};
  }
  out.normalize();
  return out;
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

double StateVector::normalize() {
  const double n = norm();
  if (n == 0.0 || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero or non-finite state");
  const double inv = 1.0 / n;
  for (auto& a : amplitudes_) a *= inv;
  return n;
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

void StateVector::fix_global_phase() {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    const double m = std::abs(amplitudes_[i]);
    if (m > best_mag * (1.0 + 1e-12)) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag <= 0.0) return;
  const Complex phase = std::conj(amplitudes_[best]) / best_mag;
  for (auto& a : amplitudes_) a *= phase;
  amplitudes_[best] = {best_mag, 0.0};
}

StateVector& StateVector::operator+=(const StateVector& other) { return axpy(1.0, other); }
StateVector& StateVector::operator-=(const StateVector& other) { return axpy(-1.0, other); }

StateVector& StateVector::operator*=(Complex factor) {
  for (auto& a : amplitudes_) a *= factor;
  return *this;
}

StateVector& StateVector::axpy(Complex factor, const StateVector& other) {
  check_same_shape(*this, other);
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) amplitudes_[i] += factor * other.amplitudes_[i];
  return *this;
}

StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
StateVector operator*(Complex factor, StateVector state) { return state *= factor; }

Complex inner(const StateVector& bra, const StateVector& ket) {
  check_same_shape(bra, ket);
  Complex s{0.0, 0.0};
  const auto b = bra.amplitudes();
  const auto k = ket.amplitudes();
  for (std::size_t i = 0; i < b.size(); ++i) s += std::conj(b[i]) * k[i];
  return s;
}

StateVector apply_single_qubit(const Eigen::Matrix2cd& gate, std::size_t site, const StateVector& state) {
  if (site >= state.n_sites()) throw std::out_of_range("gate site out of range");
  StateVector out(state.n_sites());
  const std::uint64_t bit = std::uint64_t{1} << site;
  const auto in = state.amplitudes();
  auto res = out.amplitudes();
  for (std::uint64_t i = 0; i < in.size(); ++i) {
    if (i & bit) continue;
    const Complex a0 = in[i];
    const Complex a1 = in[i | bit];
    res[i] = gate(0, 0) * a0 + gate(0, 1) * a1;
    res[i | bit] = gate(1, 0) * a0 + gate(1, 1) * a1;
  }
  return out;
}

Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, std::span<const std::size_t> sites) {
  std::uint64_t mask = 0;
  for (auto s : sites) {
    if (s >= state.n_sites()) throw std::out_of_range("reduced density matrix site out of range");
    const std::uint64_t bit = std::uint64_t{1} << s;
    if (mask & bit) throw std::invalid_argument("duplicate site in reduced density matrix");
    mask |= bit;
  }
  const std::size_t local_dim = std::size_t{1} << sites.size();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(local_dim),
                                                static_cast<Eigen::Index>(local_dim));
  const auto amps = state.amplitudes();
  // Enumerate environment configurations (bits outside mask), then all local pairs.
  for (std::uint64_t env = 0; env < amps.size(); ++env) {
    if (env & mask) continue;
    for (std::size_t r = 0; r < local_dim; ++r) {
      std::uint64_t ir = env;
      for (std::size_t k = 0; k < sites.size(); ++k) ir |= static_cast<std::uint64_t>((r >> k) & 1U) << sites[k];
      for (std::size_t c = 0; c < local_dim; ++c) {
        std::uint64_t ic = env;
        for (std::size_t k = 0; k < sites.size(); ++k) ic |= static_cast<std::uint64_t>((c >> k) & 1U) << sites[k];
        rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
            amps[ir] * std::conj(amps[ic]);
      }
    }
  }
  return rho;
}

}  // namespace qet
