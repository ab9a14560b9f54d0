#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qet/chain_model.hpp"
#include "qet/eigensolver.hpp"
#include "qet/protocol.hpp"

using qet::Axis;
using qet::MeasurementSetup;
using qet::StateVector;

namespace {

qet::CalibratedChain critical(std::size_t n, std::size_t a = 0, std::size_t b = 1) {
  qet::ChainSpec s;
  s.n_sites = n;
  s.site_a = a;
  s.site_b = b;
  return qet::calibrate_chain(s);
}

const std::vector<Axis>& coordinate_axes() {
  static const std::vector<Axis> axes{Axis::x(), Axis::y(), Axis::z()};
  return axes;
}

}  // namespace

TEST_CASE("axes") {
  CHECK(qet::parse_axis("y") == Axis::y());
  const Axis d = qet::parse_axis("1,1,0");
  CHECK(d.components()[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(Axis(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(qet::parse_axis("0,0,0"), std::invalid_argument);
  CHECK_THROWS_AS(qet::parse_axis("w"), std::invalid_argument);
  CHECK(Axis::z().label() == "z");
}

TEST_CASE("projectors are complementary orthogonal idempotents") {
  const std::size_t n = 3;
  for (const Axis& axis : {Axis::x(), Axis::y(), Axis::z(), qet::parse_axis("0.3,-0.5,0.8")}) {
    const auto p = qet::projectors(axis, 1, n);
    const Eigen::MatrixXcd p0 = oracle::dense_from_kron(p.p0.sum());
    const Eigen::MatrixXcd p1 = oracle::dense_from_kron(p.p1.sum());
    const auto id = Eigen::MatrixXcd::Identity(8, 8);
    CHECK((p0 * p0 - p0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p1 * p1 - p1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p0 * p1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p0 + p1 - id).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::MatrixXcd sigma = oracle::dense_from_kron(qet::pauli_along(axis, 1, n).sum());
    CHECK((sigma * p0 - p0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((sigma * p1 + p1).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("measurement injects positive energy") {
  const auto c = critical(10);
  for (const Axis& axis : coordinate_axes()) {
    const auto m = qet::measure(c.ground.state, qet::projectors(axis, 0, 10), c.hamiltonian);
    CHECK(m.e_a > 0.0);
    CHECK(m.ensemble.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qet::ensemble_energy(m.ensemble, c.hamiltonian) == doctest::Approx(m.e_a).epsilon(1e-12));
    const auto profile = qet::energy_profile(m.ensemble, c.densities);
    double sum = 0.0;
    for (double v : profile) sum += v;
    CHECK(sum == doctest::Approx(m.e_a).epsilon(1e-12));
  }

  // A measurement commuting with H injects nothing.
  qet::PauliSum field(6);
  for (std::size_t k = 0; k < 6; ++k) field.add(qet::PauliString::single(k, qet::PauliLetter::Z, -1.0));
  const qet::HermitianOperator h(field + qet::HermitianOperator::identity(6, 6.0).sum());
  const auto g = StateVector::basis(6, 0);
  const auto m = qet::measure(g, qet::projectors(Axis::z(), 0, 6), h);
  CHECK(std::abs(m.e_a) < 1e-14);
  CHECK(m.ensemble.branches[1].weight == 0.0);
}

TEST_CASE("xi and eta") {
  const auto c = critical(10);
  for (const Axis& a : coordinate_axes()) {
    for (const Axis& b : coordinate_axes()) {
      const auto sa = qet::pauli_along(a, 0, 10);
      const auto sb = qet::pauli_along(b, 3, 10);
      const auto r = qet::xi_eta(c.ground.state, sa, sb, c.hamiltonian);
      CHECK(r.xi >= 0.0);
      CHECK(std::abs(r.eta_imaginary) < 1e-10);
    }
  }
  // Real ground state: sigma_A = x gives a purely imaginary cross term.
  const auto r = qet::xi_eta(c.ground.state, qet::pauli_along(Axis::x(), 0, 10), qet::pauli_along(Axis::x(), 1, 10),
                             c.hamiltonian);
  CHECK(std::abs(r.eta) < 1e-12);
  CHECK_THROWS_AS(qet::xi_eta(c.ground.state, qet::pauli_along(Axis::x(), 0, 10), qet::pauli_along(Axis::x(), 0, 10),
                              c.hamiltonian),
                  std::invalid_argument);
}

TEST_CASE("eta vanishes without ground-state entanglement") {
  // Product state |0...0> and a diagonal Hamiltonian.
  qet::PauliSum diag(6);
  for (std::size_t k = 0; k < 6; ++k) diag.add(qet::PauliString::single(k, qet::PauliLetter::Z, -1.0));
  const qet::HermitianOperator h(diag);
  const auto g = StateVector::basis(6, 0);
  for (const Axis& a : coordinate_axes()) {
    for (const Axis& b : coordinate_axes()) {
      const auto r = qet::xi_eta(g, qet::pauli_along(a, 0, 6), qet::pauli_along(b, 3, 6), h);
      CHECK(std::abs(r.eta) < 1e-14);
    }
  }
  const auto choice = qet::optimal_theta(0.0, 0.0);
  CHECK(choice.degenerate);
  CHECK(choice.theta == 0.0);
  CHECK(qet::teleported_energy(2.0, 0.0) == 0.0);
}

TEST_CASE("eta is the slope of the post-feedback energy at theta = 0") {
  const auto c = critical(10);
  const MeasurementSetup setup{Axis::y(), Axis::x()};
  for (std::size_t b : {1u, 2u, 3u}) {
    const auto sa = qet::pauli_along(setup.axis_a, 0, 10);
    const auto sb = qet::pauli_along(setup.axis_b, b, 10);
    const auto m = qet::measure(c.ground.state, qet::projectors(setup.axis_a, 0, 10), c.hamiltonian);
    const auto r = qet::xi_eta(c.ground.state, sa, sb, c.hamiltonian);
    const double h = 1e-5;
    const double up = qet::ensemble_energy(qet::apply_feedback(m.ensemble, sb, h), c.hamiltonian);
    const double down = qet::ensemble_energy(qet::apply_feedback(m.ensemble, sb, -h), c.hamiltonian);
    const double slope = (up - down) / (2.0 * h);
    CHECK(std::abs(slope - r.eta) < 1e-8);
    const double curvature =
        (up - 2.0 * qet::ensemble_energy(qet::apply_feedback(m.ensemble, sb, 0.0), c.hamiltonian) + down) / (h * h);
    CHECK(std::abs(curvature - 2.0 * r.xi) < 1e-4);
  }
}

TEST_CASE("optimal angle") {
  const auto t = qet::optimal_theta(3.0, 4.0);
  CHECK(std::cos(2.0 * t.theta) == doctest::Approx(0.6));
  CHECK(std::sin(2.0 * t.theta) == doctest::Approx(-0.8));
  CHECK_FALSE(t.degenerate);
  CHECK(qet::teleported_energy(3.0, 4.0) == doctest::Approx(1.0));
  CHECK(qet::predicted_energy(0.0, 3.0, 4.0, t.theta) == doctest::Approx(-1.0));

  for (double xi : {0.0, 0.3, 2.0}) {
    for (double eta : {-1.5, -1e-6, 1e-6, 0.7}) {
      const auto ch = qet::optimal_theta(xi, eta);
      const double best = qet::predicted_energy(0.0, xi, eta, ch.theta);
      CHECK(best == doctest::Approx(-qet::teleported_energy(xi, eta)).epsilon(1e-12));
      for (int k = 0; k < 1000; ++k) {
        const double theta = -std::numbers::pi / 2 + std::numbers::pi * k / 1000.0;
        CHECK(qet::predicted_energy(0.0, xi, eta, theta) >= best - 1e-15);
      }
      CHECK(qet::teleported_energy(xi, eta) > 0.0);
    }
  }
  // Tiny eta: no cancellation.
  CHECK(qet::teleported_energy(1.0, 1e-9) == doctest::Approx(0.25e-18).epsilon(1e-10));
}

TEST_CASE("feedback unitary") {
  const std::size_t n = 6;
  const auto sb = qet::pauli_along(qet::parse_axis("0.2,0.9,-0.4"), 2, n);
  qet::MixedEnsemble ens;
  ens.branches.push_back({0.25, StateVector::random(n, 1), 0});
  ens.branches.push_back({0.75, StateVector::random(n, 2), 1});

  const auto same = qet::apply_feedback(ens, sb, 0.0);
  for (std::size_t i = 0; i < 2; ++i) CHECK((same.branches[i].state - ens.branches[i].state).norm() < 1e-15);

  const auto rotated = qet::apply_feedback(ens, sb, 0.37);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rotated.branches[i].state.is_normalized(1e-13));
    CHECK(rotated.branches[i].weight == ens.branches[i].weight);
  }
  // Unitarity: inner products survive.
  qet::MixedEnsemble pair;
  pair.branches.push_back({1.0, StateVector::random(n, 3), 1});
  pair.branches.push_back({1.0, StateVector::random(n, 4), 1});
  const auto moved = qet::apply_feedback(pair, sb, 1.1);
  CHECK(std::abs(qet::inner(moved.branches[0].state, moved.branches[1].state) -
                 qet::inner(pair.branches[0].state, pair.branches[1].state)) < 1e-13);

  // theta = pi/2 gives i (-1)^mu sigma_B.
  const auto quarter = qet::apply_feedback(ens, sb, std::numbers::pi / 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const double sign = ens.branches[i].outcome == 0 ? 1.0 : -1.0;
    const auto expect = qet::Complex(0.0, sign) * qet::apply(sb, ens.branches[i].state);
    CHECK((quarter.branches[i].state - expect).norm() < 1e-14);
  }
}

TEST_CASE("closed-form energy identity over theta") {
  for (std::size_t n : {8u, 10u}) {
    const auto c = critical(n, 0, 2);
    for (const Axis& a : coordinate_axes()) {
      for (const Axis& b : coordinate_axes()) {
        const auto sa = qet::pauli_along(a, 0, n);
        const auto sb = qet::pauli_along(b, 2, n);
        const auto m = qet::measure(c.ground.state, qet::projectors(a, 0, n), c.hamiltonian);
        const auto r = qet::xi_eta(c.ground.state, sa, sb, c.hamiltonian);
        for (int k = 0; k < 8; ++k) {
          const double theta = -std::numbers::pi / 2 + std::numbers::pi * (k + 0.5) / 8.0;
          const double sim = qet::ensemble_energy(qet::apply_feedback(m.ensemble, sb, theta), c.hamiltonian);
          CHECK(std::abs(sim - qet::predicted_energy(m.e_a, r.xi, r.eta, theta)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("identity breaks for adjacent pairs that both anticommute with a bond") {
  const auto c = critical(8);
  const auto sa = qet::pauli_along(Axis::y(), 0, 8);
  const auto sb = qet::pauli_along(Axis::y(), 1, 8);
  // eta picks up an imaginary part because X_0 X_1 anticommutes with both.
  CHECK_THROWS_AS(qet::xi_eta(c.ground.state, sa, sb, c.hamiltonian), std::logic_error);
  const auto relaxed = qet::xi_eta(c.ground.state, sa, sb, c.hamiltonian, 1e9);
  CHECK(std::abs(relaxed.eta_imaginary) > 1e-3);

  // The ensemble coefficients always describe the simulated curve.
  const auto m = qet::measure(c.ground.state, qet::projectors(Axis::y(), 0, 8), c.hamiltonian);
  const auto ens = qet::ensemble_coefficients(m, sb, c.hamiltonian);
  for (double theta : {-1.2, -0.3, 0.4, 1.0}) {
    const double sim = qet::ensemble_energy(qet::apply_feedback(m.ensemble, sb, theta), c.hamiltonian);
    CHECK(std::abs(sim - qet::predicted_energy(m.e_a, ens.xi, ens.eta, theta)) < 1e-10);
  }
}

TEST_CASE("protocol run: positivity, causality and locality") {
  const std::size_t n = 12;
  for (std::size_t b : {1u, 2u, 4u}) {
    const auto c = critical(n, 0, b);
    const auto r = qet::run_protocol(c, {Axis::y(), Axis::x()});
    CHECK(r.e_a > 0.0);
    CHECK(std::abs(r.eta) > 1e-8);
    CHECK(r.e_b > 0.0);
    CHECK(r.e_b_simulated == doctest::Approx(r.e_b).epsilon(1e-9));
    CHECK(r.identity_residual < 1e-9);
    CHECK(r.final_energy == doctest::Approx(r.e_a - r.e_b).epsilon(1e-10));

    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(r.profiles.ground[k]) < 1e-10);
      if (c.spec.distance(k, 0) >= 2) CHECK(std::abs(r.profiles.measured[k]) < 1e-12);
      if (c.spec.distance(k, b) >= 2) CHECK(std::abs(r.profiles.feedback[k] - r.profiles.measured[k]) < 1e-12);
    }
    double near_b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (c.spec.distance(k, b) <= 1) near_b += r.profiles.feedback[k] - r.profiles.measured[k];
    }
    CHECK(near_b == doctest::Approx(-r.e_b).epsilon(1e-9));
  }
}

TEST_CASE("theta override") {
  const auto c = critical(10);
  const auto r = qet::run_protocol(c, {Axis::y(), Axis::x()}, 0.0);
  CHECK(r.theta_used == 0.0);
  CHECK(r.final_energy == doctest::Approx(r.e_a).epsilon(1e-12));
  CHECK(r.e_b > 0.0);
}

TEST_CASE("axis sweep") {
  const auto c = critical(10);
  const auto sweep = qet::axis_sweep(c);
  CHECK(sweep.table.size() == 9);
  double xx = -1.0;
  std::size_t invalid = 0;
  for (const auto& e : sweep.table) {
    if (e.setup.axis_a == Axis::x() && e.setup.axis_b == Axis::x()) xx = e.e_b;
    if (std::abs(e.eta) < 1e-12) CHECK(e.e_b < 1e-14);
    if (!e.identity_valid) ++invalid;
    if (e.identity_valid) CHECK(e.e_b <= sweep.best_e_b);
  }
  CHECK(xx >= 0.0);
  CHECK(sweep.best_e_b >= xx);
  // X_0 X_1 anticommutes with y or z on both sites.
  CHECK(invalid == 4);
  CHECK(sweep.best.axis_a == Axis::y());
  CHECK(sweep.best.axis_b == Axis::x());

  const auto refined = qet::axis_sweep(c, 3);
  CHECK(refined.best_e_b >= sweep.best_e_b - 1e-14);
  // Two rings of 6, then 3 equatorial azimuths minus the x axis.
  CHECK(qet::spherical_grid(3).size() == 14);
}
