#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qet/eigensolver.hpp"
#include "qet/pauli.hpp"
#include "qet/state.hpp"

namespace qet {

enum class Boundary { Periodic, Open };

Boundary parse_boundary(std::string_view name);
std::string to_string(Boundary b);

// Critical transverse-field Ising chain
//   T_n = -J Z_n - (J/2) X_n (X_{n+1} + X_{n-1}) - eps_n,   H = sum_n T_n.
struct ChainSpec {
  std::size_t n_sites = 8;
  double coupling = 1.0;
  Boundary boundary = Boundary::Periodic;
  std::vector<double> epsilon;  // empty means all zero
  std::size_t site_a = 0;
  std::size_t site_b = 1;

  // Throws std::invalid_argument on any broken invariant.
  void validate() const;
  double epsilon_at(std::size_t n) const { return epsilon.empty() ? 0.0 : epsilon.at(n); }
  // Circular on periodic chains: min(d, N - d).
  std::size_t distance(std::size_t m, std::size_t n) const;
  std::vector<std::size_t> neighbours(std::size_t n) const;
  // Sites touched by T_n, ascending.
  std::vector<std::size_t> density_support(std::size_t n) const;
  // Scale for tolerances quoted "in units of J"; never zero.
  double energy_scale() const { return coupling > 0.0 ? coupling : 1.0; }
};

HermitianOperator build_energy_density(const ChainSpec& spec, std::size_t n);
std::vector<HermitianOperator> build_energy_densities(const ChainSpec& spec);
HermitianOperator build_hamiltonian(const ChainSpec& spec);

// eps_n = <g| -J Z_n - (J/2) X_n (X_{n+1} + X_{n-1}) |g>, so the returned
// offsets make every <g|T_n|g> vanish. Throws if g is not normalized.
std::vector<double> calibrate_epsilon(const ChainSpec& spec, const StateVector& ground);

struct LocalSpectrum {
  std::size_t site = 0;
  std::vector<std::size_t> support;    // local qubit k is support[k]
  std::vector<double> eigenvalues;     // distinct, ascending
  std::vector<std::size_t> multiplicities;
  Eigen::MatrixXcd local_matrix;       // T_n on its support
  Eigen::MatrixXcd eigenvectors;       // all 2^|support| columns, ascending eigenvalue

  double minimum() const { return eigenvalues.front(); }
};

inline constexpr double kMultiplicityTolerance = 1e-10;

LocalSpectrum local_density_spectrum(const ChainSpec& spec, std::size_t n);

// Weights |g_{nu}|^2 summed within each distinct eigenvalue of T_n.
std::vector<double> spectral_weights(const LocalSpectrum& spectrum, const StateVector& state);

struct CorrelationCheck {
  double lhs = 0.0;  // <g|T_n O_m|g>
  double rhs = 0.0;  // <g|T_n|g><g|O_m|g>
  double gap = 0.0;
};

// Throws std::invalid_argument when the two operators' supports overlap.
CorrelationCheck correlation_check(const StateVector& g, const HermitianOperator& density,
                                   const HermitianOperator& local_op);

// A calibrated chain with its ground state, ready for the protocol.
struct CalibratedChain {
  ChainSpec spec;  // epsilon filled in
  HermitianOperator hamiltonian;
  std::vector<HermitianOperator> densities;
  EigenResult ground;     // energy is <g|H|g> for the calibrated H
  double raw_energy = 0.0;  // lowest eigenvalue before calibration
};

inline constexpr double kCalibrationTolerance = 1e-10;

CalibratedChain calibrate_chain(ChainSpec spec, SolverOptions options = {});

}  // namespace qet
