#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "qet/pauli.hpp"
#include "qet/state.hpp"

namespace qet {

// Matrix-free product: each Pauli string permutes amplitudes by its X mask
// and phases them by its Z mask and Y count.
StateVector apply(const PauliSum& op, const StateVector& state);
StateVector apply(const HermitianOperator& op, const StateVector& state);
void apply_into(const PauliSum& op, const StateVector& state, StateVector& out);

// Real part of <psi|O|psi>. Throws std::logic_error if the imaginary part
// exceeds 1e-12 (relative to the operator's coefficient norm).
double expectation(const StateVector& state, const HermitianOperator& op);
// <bra|O|ket> without any reality check.
Complex matrix_element(const StateVector& bra, const PauliSum& op, const StateVector& ket);

// Dense 2^n x 2^n matrix; only meant for small n.
Eigen::MatrixXcd dense_matrix(const PauliSum& op);

enum class SolverMethod { Auto, Lanczos, Dense };

struct SolverOptions {
  double tol = 1e-10;            // residual ||Hv - Ev||
  std::size_t max_iter = 3000;   // total matrix-vector products
  std::size_t krylov_dim = 96;   // basis size before a restart
  std::uint64_t seed = 0;
  double degeneracy_threshold = 1e-8;
  SolverMethod method = SolverMethod::Auto;
};

struct EigenResult {
  double energy = 0.0;
  StateVector state;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Distance to the next Ritz value when available.
  std::optional<double> gap;
  bool near_degenerate = false;
  SolverMethod method_used = SolverMethod::Lanczos;
};

// Dense path is allowed up to this many sites.
inline constexpr std::size_t kDenseMaxSites = 10;

// Lanczos with full reorthogonalization and explicit restarts from the Ritz
// vector. Auto falls back to a dense solve for n <= kDenseMaxSites when
// Lanczos does not converge. Throws std::runtime_error on non-convergence
// without fallback, reporting the best residual.
EigenResult ground_state(const HermitianOperator& op, const SolverOptions& options = {});
EigenResult lanczos_ground_state(const HermitianOperator& op, const SolverOptions& options = {});
EigenResult dense_ground_state(const HermitianOperator& op, const SolverOptions& options = {});

}  // namespace qet
