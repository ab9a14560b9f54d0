#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace qet {

using Complex = std::complex<double>;

// Pure state on n qubits. Basis index bit n is the spin at site n;
// bit value 0 is the sigma^z = +1 state.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t n_sites);  // all amplitudes zero
  StateVector(std::size_t n_sites, std::vector<Complex> amplitudes);

  static StateVector basis(std::size_t n_sites, std::uint64_t index);
  // Normalized complex Gaussian vector from a seeded generator.
  static StateVector random(std::size_t n_sites, std::uint64_t seed);

  std::size_t n_sites() const { return n_sites_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  double norm_squared() const;
  // Scales to unit norm and returns the previous norm; throws on a zero vector.
  double normalize();
  bool is_normalized(double tol = 1e-12) const;
  // Rotates the global phase so the largest-magnitude amplitude is real positive.
  void fix_global_phase();

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex factor);
  // this += factor * other
  StateVector& axpy(Complex factor, const StateVector& other);

 private:
  std::size_t n_sites_ = 0;
  std::vector<Complex> amplitudes_;
};

StateVector operator+(StateVector lhs, const StateVector& rhs);
StateVector operator-(StateVector lhs, const StateVector& rhs);
StateVector operator*(Complex factor, StateVector state);

// <bra|ket>, conjugate-linear in bra.
Complex inner(const StateVector& bra, const StateVector& ket);

// Applies a 2x2 matrix to one qubit (row/column 0 is bit value 0).
StateVector apply_single_qubit(const Eigen::Matrix2cd& gate, std::size_t site, const StateVector& state);

// Reduced density matrix on the given sites; local basis bit k is sites[k].
Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, std::span<const std::size_t> sites);

void check_same_shape(const StateVector& a, const StateVector& b);

}  // namespace qet
