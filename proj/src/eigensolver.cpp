#include "qet/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace qet {

namespace {

Complex string_phase(const PauliString& term) {
  switch (term.y_count() % 4) {
    case 0: return term.coefficient;
    case 1: return term.coefficient * Complex{0.0, 1.0};
    case 2: return -term.coefficient;
    default: return term.coefficient * Complex{0.0, -1.0};
  }
}

void check_dimensions(const PauliSum& op, const StateVector& state) {
  if (op.n_sites() != state.n_sites()) {
    std::ostringstream msg;
    msg << "operator acts on " << op.n_sites() << " sites but state has " << state.n_sites();
    throw std::invalid_argument(msg.str());
  }
}

struct TridiagonalEigen {
  double lowest = 0.0;
  std::optional<double> second;
  Eigen::VectorXd lowest_vector;
};

TridiagonalEigen solve_tridiagonal(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag(m);
  Eigen::VectorXd off(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index i = 0; i < m; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < m; ++i) off(i) = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  TridiagonalEigen out;
  out.lowest = es.eigenvalues()(0);
  if (m > 1) out.second = es.eigenvalues()(1);
  out.lowest_vector = es.eigenvectors().col(0);
  return out;
}

double residual_norm(const HermitianOperator& op, const StateVector& v, double energy) {
  StateVector r = apply(op, v);
  r.axpy(-energy, v);
  return r.norm();
}

void finalize(EigenResult& result, const SolverOptions& options) {
  result.state.fix_global_phase();
  result.near_degenerate = result.gap.has_value() && *result.gap < options.degeneracy_threshold;
}

}  // namespace

void apply_into(const PauliSum& op, const StateVector& state, StateVector& out) {
  check_dimensions(op, state);
  check_same_shape(state, out);
  const auto in = state.amplitudes();
  auto res = out.amplitudes();
  std::fill(res.begin(), res.end(), Complex{0.0, 0.0});
  const std::uint64_t dim = in.size();
  for (const auto& term : op.terms()) {
    const Complex factor = string_phase(term);
    const std::uint64_t x = term.x_mask;
    const std::uint64_t z = term.z_mask;
    if (z == 0) {
      for (std::uint64_t b = 0; b < dim; ++b) res[b ^ x] += factor * in[b];
    } else {
      for (std::uint64_t b = 0; b < dim; ++b) {
        const Complex v = factor * in[b];
        if (std::popcount(b & z) & 1) {
          res[b ^ x] -= v;
        } else {
          res[b ^ x] += v;
        }
      }
    }
  }
}

StateVector apply(const PauliSum& op, const StateVector& state) {
  check_dimensions(op, state);
  StateVector out(state.n_sites());
  apply_into(op, state, out);
  return out;
}

StateVector apply(const HermitianOperator& op, const StateVector& state) { return apply(op.sum(), state); }

Complex matrix_element(const StateVector& bra, const PauliSum& op, const StateVector& ket) {
  return inner(bra, apply(op, ket));
}

double expectation(const StateVector& state, const HermitianOperator& op) {
  const Complex value = matrix_element(state, op.sum(), state);
  const double scale = std::max(1.0, op.sum().coefficient_norm());
  if (std::abs(value.imag()) > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "expectation has imaginary part " << value.imag() << "; operator is not Hermitian";
    throw std::logic_error(msg.str());
  }
  return value.real();
}

Eigen::MatrixXcd dense_matrix(const PauliSum& op) {
  if (op.n_sites() > 14) throw std::invalid_argument("dense matrix limited to 14 sites");
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << op.n_sites());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : op.terms()) {
    const Complex factor = string_phase(term);
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
      const double sign = (std::popcount(b & term.z_mask) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(b ^ term.x_mask), static_cast<Eigen::Index>(b)) += sign * factor;
    }
  }
  return m;
}

EigenResult dense_ground_state(const HermitianOperator& op, const SolverOptions& options) {
  if (op.n_sites() > kDenseMaxSites) {
    throw std::invalid_argument("dense eigensolve limited to " + std::to_string(kDenseMaxSites) + " sites");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(op.sum()));
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
  EigenResult result;
  result.method_used = SolverMethod::Dense;
  result.energy = es.eigenvalues()(0);
  if (es.eigenvalues().size() > 1) result.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
  std::vector<Complex> amps(es.eigenvectors().col(0).data(),
                            es.eigenvectors().col(0).data() + es.eigenvectors().rows());
  result.state = StateVector(op.n_sites(), std::move(amps));
  result.state.normalize();
  result.residual = residual_norm(op, result.state, result.energy);
  result.iterations = 1;
  result.converged = result.residual < options.tol;
  finalize(result, options);
  return result;
}

EigenResult lanczos_ground_state(const HermitianOperator& op, const SolverOptions& options) {
  const std::size_t n = op.n_sites();
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t krylov = std::max<std::size_t>(2, std::min(options.krylov_dim, dim));
  const double scale = std::max(1.0, op.sum().coefficient_norm());

  EigenResult result;
  result.method_used = SolverMethod::Lanczos;
  result.residual = std::numeric_limits<double>::infinity();

  StateVector start = StateVector::random(n, options.seed);
  std::vector<StateVector> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  StateVector w(n);
  std::size_t matvecs = 0;

  while (matvecs < options.max_iter) {
    basis.clear();
    alpha.clear();
    beta.clear();
    basis.push_back(start);
    TridiagonalEigen ritz;

    for (std::size_t j = 0;; ++j) {
      apply_into(op.sum(), basis[j], w);
      ++matvecs;
      const double a = inner(basis[j], w).real();
      alpha.push_back(a);
      w.axpy(-a, basis[j]);
      if (j > 0) w.axpy(-beta[j - 1], basis[j - 1]);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w.axpy(-inner(q, w), q);
      }
      const double b = w.norm();

      const bool breakdown = b < 1e-13 * scale;
      const bool full = basis.size() >= krylov || matvecs >= options.max_iter;
      const bool check = breakdown || full || j % 4 == 3;
      if (check) {
        ritz = solve_tridiagonal(alpha, beta);
        const double estimate = b * std::abs(ritz.lowest_vector(static_cast<Eigen::Index>(j)));
        if (breakdown || full || estimate < 0.1 * options.tol) break;
      }
      beta.push_back(b);
      StateVector next = w;
      next *= 1.0 / b;
      basis.push_back(std::move(next));
    }

    if (ritz.second) {
      const double g = *ritz.second - ritz.lowest;
      result.gap = result.gap ? std::min(*result.gap, g) : g;
    }

    StateVector x(n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      x.axpy(ritz.lowest_vector(static_cast<Eigen::Index>(k)), basis[k]);
    }
    x.normalize();
    const double rayleigh = expectation(x, op);
    const double r = residual_norm(op, x, rayleigh);
    ++matvecs;
    if (r < result.residual) {
      result.residual = r;
      result.energy = rayleigh;
      result.state = x;
    }
    if (r < options.tol) {
      result.converged = true;
      break;
    }
    start = std::move(x);
  }
  result.iterations = matvecs;
  finalize(result, options);
  return result;
}

EigenResult ground_state(const HermitianOperator& op, const SolverOptions& options) {
  switch (options.method) {
    case SolverMethod::Dense: {
      auto r = dense_ground_state(op, options);
      if (!r.converged) throw std::runtime_error("dense eigensolve residual above tolerance");
      return r;
    }
    case SolverMethod::Lanczos:
    case SolverMethod::Auto: {
      auto r = lanczos_ground_state(op, options);
      if (r.converged) return r;
      if (options.method == SolverMethod::Auto && op.n_sites() <= kDenseMaxSites) {
        auto dense = dense_ground_state(op, options);
        if (dense.converged) return dense;
      }
      std::ostringstream msg;
      msg << "Lanczos did not converge after " << r.iterations << " matrix-vector products (best residual "
          << r.residual << ", tolerance " << options.tol << ")";
      throw std::runtime_error(msg.str());
    }
  }
  throw std::logic_error("unknown solver method");
}

}  // namespace qet
