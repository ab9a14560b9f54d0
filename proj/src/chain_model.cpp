#include "qet/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qet {

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::Periodic;
  if (name == "open") return Boundary::Open;
  throw std::invalid_argument("boundary must be 'periodic' or 'open', got '" + std::string(name) + "'");
}

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "open"; }

void ChainSpec::validate() const {
  std::ostringstream err;
  if (n_sites < 3) err << "n_sites must be at least 3 (got " << n_sites << ")";
  else if (n_sites > kMaxSites) err << "n_sites must be at most " << kMaxSites;
  else if (!std::isfinite(coupling) || coupling < 0.0) err << "coupling must be finite and non-negative";
  else if (!epsilon.empty() && epsilon.size() != n_sites) err << "epsilon must be empty or have one entry per site";
  else if (site_a >= n_sites || site_b >= n_sites) err << "protocol sites must lie in [0, " << n_sites << ")";
  else if (site_a == site_b) err << "site_a and site_b must differ";
  const auto msg = err.str();
  if (!msg.empty()) throw std::invalid_argument(msg);
}

std::size_t ChainSpec::distance(std::size_t m, std::size_t n) const {
  const std::size_t d = m > n ? m - n : n - m;
  return boundary == Boundary::Periodic ? std::min(d, n_sites - d) : d;
}

std::vector<std::size_t> ChainSpec::neighbours(std::size_t n) const {
  if (n >= n_sites) throw std::out_of_range("site " + std::to_string(n) + " outside chain");
  std::vector<std::size_t> out;
  if (boundary == Boundary::Periodic) {
    out.push_back((n + 1) % n_sites);
    out.push_back((n + n_sites - 1) % n_sites);
  } else {
    if (n + 1 < n_sites) out.push_back(n + 1);
    if (n > 0) out.push_back(n - 1);
  }
  return out;
}

std::vector<std::size_t> ChainSpec::density_support(std::size_t n) const {
  auto sites = neighbours(n);
  sites.push_back(n);
  std::sort(sites.begin(), sites.end());
  return sites;
}

HermitianOperator build_energy_density(const ChainSpec& spec, std::size_t n) {
  spec.validate();
  const double j = spec.coupling;
  PauliSum t(spec.n_sites);
  t.add(PauliString::single(n, PauliLetter::Z, -j));
  for (auto m : spec.neighbours(n)) {
    t.add(PauliString::single(n, PauliLetter::X, -0.5 * j) * PauliString::single(m, PauliLetter::X));
  }
  t.add(PauliString::identity(-spec.epsilon_at(n)));
  return HermitianOperator(std::move(t), 1e-15 * j);
}

std::vector<HermitianOperator> build_energy_densities(const ChainSpec& spec) {
  std::vector<HermitianOperator> out;
  out.reserve(spec.n_sites);
  for (std::size_t n = 0; n < spec.n_sites; ++n) out.push_back(build_energy_density(spec, n));
  return out;
}

HermitianOperator build_hamiltonian(const ChainSpec& spec) {
  PauliSum h(spec.n_sites);
  for (const auto& t : build_energy_densities(spec)) h += t.sum();
  return HermitianOperator(std::move(h), 1e-15 * spec.coupling);
}

std::vector<double> calibrate_epsilon(const ChainSpec& spec, const StateVector& ground) {
  spec.validate();
  if (ground.n_sites() != spec.n_sites) throw std::invalid_argument("ground state size does not match chain");
  if (!ground.is_normalized(1e-10)) throw std::invalid_argument("ground state is not normalized");
  ChainSpec bare = spec;
  bare.epsilon.clear();
  std::vector<double> eps(spec.n_sites);
  for (std::size_t n = 0; n < spec.n_sites; ++n) eps[n] = expectation(ground, build_energy_density(bare, n));
  return eps;
}

LocalSpectrum local_density_spectrum(const ChainSpec& spec, std::size_t n) {
  const HermitianOperator t = build_energy_density(spec, n);
  LocalSpectrum out;
  out.site = n;
  out.support = spec.density_support(n);

  // Relabel global sites onto local qubits 0..k-1.
  PauliSum local(out.support.size());
  for (const auto& term : t.terms()) {
    PauliString lt = PauliString::identity(term.coefficient);
    for (std::size_t k = 0; k < out.support.size(); ++k) {
      const std::uint64_t bit = std::uint64_t{1} << out.support[k];
      if (term.x_mask & bit) lt.x_mask |= std::uint64_t{1} << k;
      if (term.z_mask & bit) lt.z_mask |= std::uint64_t{1} << k;
    }
    local.add(lt);
  }
  out.local_matrix = dense_matrix(local);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.local_matrix);
  out.eigenvectors = es.eigenvectors();
  const auto& ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!out.eigenvalues.empty() && ev(i) - out.eigenvalues.back() < kMultiplicityTolerance) {
      ++out.multiplicities.back();
    } else {
      out.eigenvalues.push_back(ev(i));
      out.multiplicities.push_back(1);
    }
  }
  return out;
}

std::vector<double> spectral_weights(const LocalSpectrum& spectrum, const StateVector& state) {
  const Eigen::MatrixXcd rho = reduced_density_matrix(state, spectrum.support);
  std::vector<double> weights;
  Eigen::Index col = 0;
  for (auto mult : spectrum.multiplicities) {
    double w = 0.0;
    for (std::size_t k = 0; k < mult; ++k, ++col) {
      const auto v = spectrum.eigenvectors.col(col);
      w += (v.adjoint() * rho * v)(0, 0).real();
    }
    weights.push_back(w);
  }
  return weights;
}

CorrelationCheck correlation_check(const StateVector& g, const HermitianOperator& density,
                                   const HermitianOperator& local_op) {
  if ((density.support() & local_op.support()) != 0) {
    throw std::invalid_argument("correlation check requires operators with disjoint supports");
  }
  CorrelationCheck out;
  out.lhs = inner(apply(density, g), apply(local_op, g)).real();
  out.rhs = expectation(g, density) * expectation(g, local_op);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

CalibratedChain calibrate_chain(ChainSpec spec, SolverOptions options) {
  spec.epsilon.clear();
  spec.validate();
  options.degeneracy_threshold *= spec.energy_scale();
  CalibratedChain out;
  const HermitianOperator bare = build_hamiltonian(spec);
  out.ground = ground_state(bare, options);
  out.raw_energy = out.ground.energy;
  spec.epsilon = calibrate_epsilon(spec, out.ground.state);
  out.spec = spec;
  out.hamiltonian = build_hamiltonian(spec);
  out.densities = build_energy_densities(spec);
  out.ground.energy = expectation(out.ground.state, out.hamiltonian);
  return out;
}

}  // namespace qet
