#include "doctest.h"

#include "oracles.hpp"
#include "qet/chain_model.hpp"
#include "qet/eigensolver.hpp"

using qet::Complex;
using qet::PauliString;
using qet::PauliSum;
using qet::StateVector;

TEST_CASE("apply on basis states") {
  const auto zero = StateVector::basis(3, 0);
  const PauliSum x0(3, {PauliString::from_letters("XII")});
  const auto flipped = qet::apply(x0, zero);
  CHECK(std::abs(flipped[1] - 1.0) < 1e-15);
  CHECK(flipped.norm() == doctest::Approx(1.0));

  const PauliSum z0(3, {PauliString::from_letters("ZII")});
  CHECK(std::abs(qet::apply(z0, zero)[0] - 1.0) < 1e-15);
  CHECK(std::abs(qet::apply(z0, StateVector::basis(3, 1))[1] + 1.0) < 1e-15);

  // Y|0> = i|1>
  const PauliSum y2(3, {PauliString::from_letters("IIY")});
  CHECK(std::abs(qet::apply(y2, zero)[4] - Complex(0, 1)) < 1e-15);
}

TEST_CASE("matrix-free apply agrees with Kronecker-product matrices for N <= 6") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto op = oracle::random_pauli_sum(n, 3 * n, 100 * n + seed, false);
      const auto psi = StateVector::random(n, seed + 11);
      const Eigen::VectorXcd ref = oracle::dense_from_kron(op) * oracle::to_eigen(psi);
      const Eigen::VectorXcd got = oracle::to_eigen(qet::apply(op, psi));
      CHECK((ref - got).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  for (std::size_t n = 3; n <= 6; ++n) {
    qet::ChainSpec spec;
    spec.n_sites = n;
    spec.boundary = n % 2 ? qet::Boundary::Open : qet::Boundary::Periodic;
    const auto h = qet::build_hamiltonian(spec);
    const auto psi = StateVector::random(n, 5);
    const Eigen::VectorXcd ref = oracle::dense_from_kron(h.sum()) * oracle::to_eigen(psi);
    CHECK((ref - oracle::to_eigen(qet::apply(h, psi))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((qet::dense_matrix(h.sum()) - oracle::dense_from_kron(h.sum())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("apply is linear and Hermitian operators are self-adjoint") {
  const std::size_t n = 5;
  const auto op = qet::HermitianOperator(oracle::random_pauli_sum(n, 12, 42, true));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = StateVector::random(n, 2 * seed);
    const auto v = StateVector::random(n, 2 * seed + 1);
    const Complex a(0.3, -0.8), b(-1.2, 0.4);
    auto combo = a * u;
    combo.axpy(b, v);
    auto expect = a * qet::apply(op, u);
    expect.axpy(b, qet::apply(op, v));
    CHECK((qet::apply(op, combo) - expect).norm() < 1e-12);
    CHECK(std::abs(qet::inner(u, qet::apply(op, v)) - qet::inner(qet::apply(op, u), v)) < 1e-12);
  }
}

TEST_CASE("expectation of a scaled identity and reality check") {
  const auto psi = StateVector::random(4, 3);
  CHECK(qet::expectation(psi, qet::HermitianOperator::identity(4, -2.5)) == doctest::Approx(-2.5).epsilon(1e-14));
  PauliSum xy(2, {PauliString::from_letters("XY")});
  // XY is Hermitian (the factors act on different sites), so the check passes.
  CHECK_NOTHROW(qet::expectation(StateVector::random(2, 1), qet::HermitianOperator(xy)));
}

TEST_CASE("uniform field ground state") {
  for (std::size_t n : {4u, 8u, 12u}) {
    PauliSum s(n);
    const double j = 0.7;
    for (std::size_t k = 0; k < n; ++k) s.add(PauliString::single(k, qet::PauliLetter::Z, -j));
    const auto res = qet::ground_state(qet::HermitianOperator(s));
    CHECK(res.energy == doctest::Approx(-j * static_cast<double>(n)).epsilon(1e-12));
    CHECK(std::abs(std::abs(res.state[0]) - 1.0) < 1e-9);
  }
}

TEST_CASE("Lanczos agrees with dense diagonalization for N <= 10") {
  for (std::size_t n = 3; n <= 10; ++n) {
    qet::ChainSpec spec;
    spec.n_sites = n;
    spec.boundary = n % 3 == 0 ? qet::Boundary::Open : qet::Boundary::Periodic;
    const auto h = qet::build_hamiltonian(spec);
    qet::SolverOptions lanczos;
    lanczos.method = qet::SolverMethod::Lanczos;
    qet::SolverOptions dense;
    dense.method = qet::SolverMethod::Dense;
    const auto a = qet::ground_state(h, lanczos);
    const auto b = qet::ground_state(h, dense);
    CHECK(a.converged);
    CHECK(a.method_used == qet::SolverMethod::Lanczos);
    CHECK(std::abs(a.energy - b.energy) < 1e-10);
    CHECK(std::abs(qet::inner(a.state, b.state)) > 1.0 - 1e-9);
    // Independent eigensolve of the Kronecker-built matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::dense_from_kron(h.sum()));
    CHECK(std::abs(a.energy - es.eigenvalues()(0)) < 1e-10);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = qet::HermitianOperator(oracle::random_pauli_sum(7, 20, 900 + seed, true));
    qet::SolverOptions lanczos;
    lanczos.method = qet::SolverMethod::Lanczos;
    lanczos.seed = seed;
    const auto a = qet::ground_state(h, lanczos);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::dense_from_kron(h.sum()));
    CHECK(std::abs(a.energy - es.eigenvalues()(0)) < 1e-10);
  }
}

TEST_CASE("residual and variance witness") {
  qet::ChainSpec spec;
  spec.n_sites = 12;
  const auto h = qet::build_hamiltonian(spec);
  const auto res = qet::ground_state(h);
  REQUIRE(res.converged);
  CHECK(res.residual < 1e-10);
  const auto hg = qet::apply(h, res.state);
  const double variance = hg.norm_squared() - res.energy * res.energy;
  CHECK(variance < 1e-18);
  CHECK(res.state.is_normalized(1e-12));
  CHECK(res.gap.has_value());
  CHECK_FALSE(res.near_degenerate);
}

TEST_CASE("degenerate ground spaces are flagged") {
  // -Z0 Z1 on three sites: 00x and 11x are all ground states.
  PauliSum s(3, {PauliString::from_letters("ZZI", -1.0)});
  qet::SolverOptions dense;
  dense.method = qet::SolverMethod::Dense;
  const auto res = qet::ground_state(qet::HermitianOperator(s), dense);
  CHECK(res.energy == doctest::Approx(-1.0));
  CHECK(res.near_degenerate);
}

TEST_CASE("non-convergence is reported") {
  qet::ChainSpec spec;
  spec.n_sites = 12;
  const auto h = qet::build_hamiltonian(spec);
  qet::SolverOptions opts;
  opts.method = qet::SolverMethod::Lanczos;
  opts.max_iter = 3;
  CHECK_THROWS_AS(qet::ground_state(h, opts), std::runtime_error);
  opts.method = qet::SolverMethod::Dense;
  CHECK_THROWS_AS(qet::ground_state(h, opts), std::invalid_argument);
}
