#include "qet/protocol.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qet/eigensolver.hpp"

namespace qet {

namespace {

double sign_of_outcome(int mu) { return mu % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

Axis::Axis(double x, double y, double z) : v_{x, y, z} {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw std::invalid_argument("axis must be a unit vector");
  }
}

Axis Axis::normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("axis vector must be non-zero");
  return {x / norm, y / norm, z / norm};
}

std::string Axis::label() const {
  if (*this == x()) return "x";
  if (*this == y()) return "y";
  if (*this == z()) return "z";
  std::ostringstream out;
  out.precision(17);
  out << "(" << v_[0] << "," << v_[1] << "," << v_[2] << ")";
  return out.str();
}

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x();
  if (text == "y") return Axis::y();
  if (text == "z") return Axis::z();
  std::string s(text);
  for (auto& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  double a = 0.0, b = 0.0, c = 0.0;
  std::string rest;
  if (!(in >> a >> b >> c) || (in >> rest)) {
    throw std::invalid_argument("axis must be x, y, z or 'ax,ay,az', got '" + std::string(text) + "'");
  }
  return Axis::normalized(a, b, c);
}

HermitianOperator pauli_along(const Axis& axis, std::size_t site, std::size_t n_sites) {
  if (site >= n_sites) throw std::out_of_range("Pauli site outside chain");
  const auto& v = axis.components();
  PauliSum s(n_sites);
  s.add(PauliString::single(site, PauliLetter::X, v[0]));
  s.add(PauliString::single(site, PauliLetter::Y, v[1]));
  s.add(PauliString::single(site, PauliLetter::Z, v[2]));
  return HermitianOperator(std::move(s));
}

Projectors projectors(const Axis& axis, std::size_t site, std::size_t n_sites) {
  const HermitianOperator sigma = pauli_along(axis, site, n_sites);
  const HermitianOperator half_identity = HermitianOperator::identity(n_sites, 0.5);
  return {half_identity + sigma.scaled(0.5), half_identity + sigma.scaled(-0.5)};
}

double MixedEnsemble::total_weight() const {
  double s = 0.0;
  for (const auto& b : branches) s += b.weight;
  return s;
}

Measurement measure(const StateVector& g, const Projectors& proj, const HermitianOperator& hamiltonian) {
  Measurement out;
  int mu = 0;
  for (const auto* p : {&proj.p0, &proj.p1}) {
    StateVector v = apply(*p, g);
    const double w = v.norm_squared();
    out.e_a += matrix_element(v, hamiltonian.sum(), v).real();
    Branch branch;
    branch.outcome = mu++;
    if (w < kZeroBranchWeight) {
      branch.weight = 0.0;
    } else {
      branch.weight = w;
      v.normalize();
    }
    branch.state = std::move(v);
    out.ensemble.branches.push_back(std::move(branch));
  }
  return out;
}

XiEta xi_eta(const StateVector& g, const HermitianOperator& sigma_a, const HermitianOperator& sigma_b,
             const HermitianOperator& hamiltonian, double tol) {
  if ((sigma_a.support() & sigma_b.support()) != 0) {
    throw std::invalid_argument("sigma_A and sigma_B must act on different sites");
  }
  const StateVector b_g = apply(sigma_b, g);
  const StateVector a_g = apply(sigma_a, g);
  const StateVector h_b_g = apply(hamiltonian, b_g);
  const StateVector h_g = apply(hamiltonian, g);
  XiEta out;
  out.xi = inner(b_g, h_b_g).real();
  const Complex eta = Complex{0.0, 1.0} * (inner(a_g, h_b_g) - inner(a_g, apply(sigma_b, h_g)));
  out.eta = eta.real();
  out.eta_imaginary = eta.imag();
  if (std::abs(out.eta_imaginary) > tol) {
    std::ostringstream msg;
    msg << "eta has imaginary residue " << out.eta_imaginary << " above tolerance " << tol;
    throw std::logic_error(msg.str());
  }
  return out;
}

XiEta ensemble_coefficients(const Measurement& measurement, const HermitianOperator& sigma_b,
                            const HermitianOperator& hamiltonian) {
  double conjugated = 0.0;
  double cross = 0.0;
  for (const auto& br : measurement.ensemble.branches) {
    if (br.weight == 0.0) continue;
    const StateVector b_psi = apply(sigma_b, br.state);
    const StateVector h_b_psi = apply(hamiltonian, b_psi);
    conjugated += br.weight * inner(b_psi, h_b_psi).real();
    // <psi| i[H, sigma_B] |psi> = -2 Im <psi|H sigma_B|psi>
    cross += br.weight * sign_of_outcome(br.outcome) * (-2.0 * inner(br.state, h_b_psi).imag());
  }
  return {conjugated - measurement.e_a, cross, 0.0};
}

ThetaChoice optimal_theta(double xi, double eta) {
  if (xi == 0.0 && eta == 0.0) return {0.0, true};
  return {0.5 * std::atan2(-eta, xi), false};
}

MixedEnsemble apply_feedback(const MixedEnsemble& ensemble, const HermitianOperator& sigma_b, double theta) {
  MixedEnsemble out;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (const auto& br : ensemble.branches) {
    Branch next = br;
    if (s != 0.0) {
      next.state *= c;
      next.state.axpy(Complex{0.0, sign_of_outcome(br.outcome) * s}, apply(sigma_b, br.state));
    }
    out.branches.push_back(std::move(next));
  }
  return out;
}

double ensemble_energy(const MixedEnsemble& ensemble, const HermitianOperator& hamiltonian) {
  double e = 0.0;
  for (const auto& br : ensemble.branches) {
    if (br.weight == 0.0) continue;
    e += br.weight * expectation(br.state, hamiltonian);
  }
  return e;
}

double predicted_energy(double e_a, double xi, double eta, double theta) {
  return e_a + 0.5 * eta * std::sin(2.0 * theta) + 0.5 * xi * (1.0 - std::cos(2.0 * theta));
}

double teleported_energy(double xi, double eta) {
  const double r = std::hypot(xi, eta);
  if (xi > 0.0) return 0.5 * eta * eta / (r + xi);
  return 0.5 * (r - xi);
}

std::vector<double> energy_profile(const MixedEnsemble& ensemble, const std::vector<HermitianOperator>& densities) {
  std::vector<double> out(densities.size(), 0.0);
  for (const auto& br : ensemble.branches) {
    if (br.weight == 0.0) continue;
    for (std::size_t n = 0; n < densities.size(); ++n) out[n] += br.weight * expectation(br.state, densities[n]);
  }
  return out;
}

std::vector<double> energy_profile(const StateVector& state, const std::vector<HermitianOperator>& densities) {
  std::vector<double> out;
  out.reserve(densities.size());
  for (const auto& t : densities) out.push_back(expectation(state, t));
  return out;
}

ProtocolResult run_protocol(const CalibratedChain& chain, const MeasurementSetup& setup,
                            std::optional<double> theta_override) {
  const auto& spec = chain.spec;
  spec.validate();
  const std::size_t n = spec.n_sites;
  const StateVector& g = chain.ground.state;
  const HermitianOperator sigma_a = pauli_along(setup.axis_a, spec.site_a, n);
  const HermitianOperator sigma_b = pauli_along(setup.axis_b, spec.site_b, n);

  ProtocolResult out;
  out.setup = setup;
  const Measurement m = measure(g, projectors(setup.axis_a, spec.site_a, n), chain.hamiltonian);
  out.e_a = m.e_a;

  const XiEta coeffs = xi_eta(g, sigma_a, sigma_b, chain.hamiltonian);
  out.xi = coeffs.xi;
  out.eta = coeffs.eta;
  const XiEta exact = ensemble_coefficients(m, sigma_b, chain.hamiltonian);
  out.identity_residual = std::max(std::abs(exact.xi - coeffs.xi), std::abs(exact.eta - coeffs.eta));

  const ThetaChoice choice = optimal_theta(coeffs.xi, coeffs.eta);
  out.theta_star = choice.theta;
  out.theta_degenerate = choice.degenerate;
  out.theta_used = theta_override.value_or(choice.theta);
  out.e_b = teleported_energy(coeffs.xi, coeffs.eta);

  const MixedEnsemble fed = apply_feedback(m.ensemble, sigma_b, out.theta_used);
  out.final_energy = ensemble_energy(fed, chain.hamiltonian);
  out.e_b_simulated = out.e_a - out.final_energy;

  out.profiles.ground = energy_profile(g, chain.densities);
  out.profiles.measured = energy_profile(m.ensemble, chain.densities);
  out.profiles.feedback = energy_profile(fed, chain.densities);
  return out;
}

std::vector<Axis> spherical_grid(std::size_t resolution) {
  std::vector<Axis> out;
  if (resolution == 0) return out;
  const double pi = std::numbers::pi;
  const auto is_coordinate = [](const Axis& a) {
    for (const auto& c : {Axis::x(), Axis::y(), Axis::z()}) {
      double d = 0.0;
      for (int i = 0; i < 3; ++i) d += std::abs(a.components()[i] - c.components()[i]);
      if (d < 1e-12) return true;
    }
    return false;
  };
  // Upper hemisphere only: sigma along -v is -sigma along v and yields the same E_B.
  for (std::size_t k = 1; k <= resolution; ++k) {
    const double polar = 0.5 * pi * static_cast<double>(k) / static_cast<double>(resolution);
    const std::size_t azimuths = k == resolution ? resolution : 2 * resolution;
    for (std::size_t l = 0; l < azimuths; ++l) {
      const double phi = pi * static_cast<double>(l) / static_cast<double>(resolution);
      const Axis a = Axis::normalized(std::sin(polar) * std::cos(phi), std::sin(polar) * std::sin(phi),
                                      std::cos(polar));
      if (!is_coordinate(a)) out.push_back(a);
    }
  }
  return out;
}

AxisSweepResult axis_sweep(const CalibratedChain& chain, std::size_t resolution) {
  const auto& spec = chain.spec;
  const std::size_t n = spec.n_sites;
  std::vector<Axis> axes = {Axis::x(), Axis::y(), Axis::z()};
  const auto refined = spherical_grid(resolution);
  axes.insert(axes.end(), refined.begin(), refined.end());

  AxisSweepResult out;
  bool have_best = false;
  for (const auto& axis_a : axes) {
    const HermitianOperator sigma_a = pauli_along(axis_a, spec.site_a, n);
    const Measurement m = measure(chain.ground.state, projectors(axis_a, spec.site_a, n), chain.hamiltonian);
    for (const auto& axis_b : axes) {
      const HermitianOperator sigma_b = pauli_along(axis_b, spec.site_b, n);
      AxisSweepEntry entry{{axis_a, axis_b}, 0.0, 0.0, 0.0, true};
      const XiEta exact = ensemble_coefficients(m, sigma_b, chain.hamiltonian);
      try {
        const XiEta c = xi_eta(chain.ground.state, sigma_a, sigma_b, chain.hamiltonian);
        entry.identity_valid =
            std::max(std::abs(exact.xi - c.xi), std::abs(exact.eta - c.eta)) < kIdentityTolerance;
        entry.xi = c.xi;
        entry.eta = c.eta;
      } catch (const std::logic_error&) {
        entry.identity_valid = false;
      }
      if (!entry.identity_valid) {
        entry.xi = exact.xi;
        entry.eta = exact.eta;
      }
      entry.e_b = teleported_energy(entry.xi, entry.eta);
      if (entry.identity_valid && (!have_best || entry.e_b > out.best_e_b)) {
        out.best = entry.setup;
        out.best_e_b = entry.e_b;
        have_best = true;
      }
      out.table.push_back(std::move(entry));
    }
  }
  return out;
}

}  // namespace qet
