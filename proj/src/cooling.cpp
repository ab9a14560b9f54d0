#include "qet/cooling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qet/eigensolver.hpp"

namespace qet {

namespace {

Eigen::Matrix2cd matrix_unit(int row, int col) {
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
  e(row, col) = 1.0;
  return e;
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXcd haar_isometry(std::mt19937_64& rng, std::size_t env_dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(2 * env_dim);
  Eigen::MatrixXcd z(rows, 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(r, c) = Complex{re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, 2);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < 2; ++c) {
    const Complex d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

LocalChannel LocalChannel::identity(std::size_t outcomes) {
  LocalChannel ch;
  ch.per_outcome.assign(outcomes, KrausSet{Eigen::Matrix2cd::Identity()});
  return ch;
}

double LocalChannel::completeness_error() const {
  double worst = 0.0;
  for (const auto& set : per_outcome) {
    Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
    for (const auto& m : set) sum += m.adjoint() * m;
    worst = std::max(worst, (sum - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
  }
  return worst;
}

KrausSet kraus_from_isometry(const Eigen::MatrixXcd& isometry) {
  if (isometry.cols() != 2 || isometry.rows() % 2 != 0 || isometry.rows() == 0) {
    throw std::invalid_argument("isometry must be (2 * env_dim) x 2");
  }
  KrausSet out;
  for (Eigen::Index a = 0; a < isometry.rows() / 2; ++a) out.emplace_back(isometry.block(2 * a, 0, 2, 2));
  return out;
}

Eigen::MatrixXcd isometry_from_kraus(const KrausSet& kraus) {
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(2 * kraus.size()), 2);
  for (std::size_t a = 0; a < kraus.size(); ++a) v.block(static_cast<Eigen::Index>(2 * a), 0, 2, 2) = kraus[a];
  return v;
}

std::size_t isometry_parameter_count(std::size_t env_dim) { return 8 * env_dim; }

Eigen::MatrixXcd isometry_from_parameters(std::span<const double> params, std::size_t env_dim) {
  if (env_dim == 0) throw std::invalid_argument("environment dimension must be positive");
  if (params.size() != isometry_parameter_count(env_dim)) {
    throw std::invalid_argument("expected " + std::to_string(isometry_parameter_count(env_dim)) + " parameters");
  }
  const auto rows = static_cast<Eigen::Index>(2 * env_dim);
  const std::size_t half = params.size() / 2;
  Eigen::MatrixXcd z(rows, 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto i = static_cast<std::size_t>(c * rows + r);
      z(r, c) = Complex{params[i], params[half + i]};
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es((z.adjoint() * z).eval());
  Eigen::Vector2d lambda = es.eigenvalues();
  // Rank-deficient Z: nudge so the polar factor stays defined.
  for (Eigen::Index i = 0; i < 2; ++i) lambda(i) = std::max(lambda(i), 1e-300);
  const Eigen::Matrix2cd inv_sqrt =
      es.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  return z * inv_sqrt;
}

LocalChannel random_channel(std::uint64_t seed, std::size_t env_dim, std::size_t outcomes) {
  LocalChannel ch;
  for (std::size_t mu = 0; mu < outcomes; ++mu) {
    auto rng = seeded_rng(seed, 0x5eed, mu);
    ch.per_outcome.push_back(kraus_from_isometry(haar_isometry(rng, env_dim)));
  }
  return ch;
}

MixedEnsemble apply_channel(const MixedEnsemble& ensemble, const LocalChannel& channel, std::size_t site) {
  MixedEnsemble out;
  for (const auto& br : ensemble.branches) {
    if (br.weight < kPruneWeight) continue;
    if (br.outcome < 0 || static_cast<std::size_t>(br.outcome) >= channel.per_outcome.size()) {
      throw std::invalid_argument("channel has no Kraus set for outcome " + std::to_string(br.outcome));
    }
    for (const auto& m : channel.per_outcome[static_cast<std::size_t>(br.outcome)]) {
      StateVector v = apply_single_qubit(m, site, br.state);
      const double p = v.norm_squared();
      const double w = br.weight * p;
      if (w < kPruneWeight) continue;
      v.normalize();
      out.branches.push_back({w, std::move(v), br.outcome});
    }
  }
  return out;
}

double CoolingObjective::outcome_energy(std::size_t mu, const KrausSet& kraus) const {
  if (weights[mu] == 0.0) return 0.0;
  double e = 0.0;
  for (const auto& m : kraus) {
    const Eigen::Vector4cd v(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    e += (v.adjoint() * gram[mu] * v)(0, 0).real();
  }
  return weights[mu] * e;
}

double CoolingObjective::energy(const LocalChannel& channel) const {
  if (channel.per_outcome.size() < weights.size()) throw std::invalid_argument("channel lacks an outcome");
  double e = 0.0;
  for (std::size_t mu = 0; mu < weights.size(); ++mu) e += outcome_energy(mu, channel.per_outcome[mu]);
  return e;
}

CoolingObjective cooling_objective(const MixedEnsemble& ensemble, const HermitianOperator& hamiltonian,
                                   std::size_t site) {
  CoolingObjective obj;
  for (const auto& br : ensemble.branches) {
    const auto mu = static_cast<std::size_t>(br.outcome);
    if (obj.weights.size() <= mu) {
      obj.weights.resize(mu + 1, 0.0);
      obj.gram.resize(mu + 1, Eigen::Matrix4cd::Zero());
    }
    if (br.weight == 0.0) continue;
    if (obj.weights[mu] != 0.0) throw std::invalid_argument("cooling objective expects one branch per outcome");
    obj.weights[mu] = br.weight;
    std::array<StateVector, 4> u;
    std::array<StateVector, 4> hu;
    for (int q = 0; q < 4; ++q) {
      u[q] = apply_single_qubit(matrix_unit(q / 2, q % 2), site, br.state);
      hu[q] = apply(hamiltonian, u[q]);
    }
    for (int q = 0; q < 4; ++q) {
      for (int p = 0; p < 4; ++p) obj.gram[mu](q, p) = inner(u[q], hu[p]);
    }
  }
  return obj;
}

CoolingResult minimize_residual(const CalibratedChain& chain, const MeasurementSetup& setup,
                                const CoolingOptions& options) {
  if (options.restarts == 0) throw std::invalid_argument("at least one restart is required");
  const auto& spec = chain.spec;
  const Measurement m = measure(chain.ground.state, projectors(setup.axis_a, spec.site_a, spec.n_sites),
                                chain.hamiltonian);
  const CoolingObjective obj = cooling_objective(m.ensemble, chain.hamiltonian, spec.site_a);
  const std::size_t outcomes = obj.weights.size();
  const std::size_t n_params = isometry_parameter_count(options.env_dim);

  CoolingResult result;
  result.e_a = m.e_a;
  NelderMeadOptions nm = options.optimizer;
  nm.f_tol *= spec.energy_scale();

  auto decode = [&](std::span<const double> x) { return kraus_from_isometry(isometry_from_parameters(x, options.env_dim)); };

  for (std::size_t r = 0; r < options.restarts; ++r) {
    LocalChannel channel = LocalChannel::identity(outcomes);
    std::vector<double> minima(outcomes, 0.0);
    bool converged = true;
    if (options.joint) {
      auto rng = seeded_rng(options.seed, r, 0xffff);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> start(n_params * outcomes);
      for (auto& s : start) s = gauss(rng);
      const auto res = nelder_mead(
          [&](std::span<const double> x) {
            double e = 0.0;
            for (std::size_t mu = 0; mu < outcomes; ++mu) e += obj.outcome_energy(mu, decode(x.subspan(mu * n_params, n_params)));
            return e;
          },
          start, nm);
      converged = res.converged;
      const std::span<const double> best(res.x);
      for (std::size_t mu = 0; mu < outcomes; ++mu) {
        channel.per_outcome[mu] = decode(best.subspan(mu * n_params, n_params));
        minima[mu] = obj.outcome_energy(mu, channel.per_outcome[mu]);
      }
    } else {
      for (std::size_t mu = 0; mu < outcomes; ++mu) {
        if (obj.weights[mu] == 0.0) continue;
        auto rng = seeded_rng(options.seed, r, mu);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> start(n_params);
        for (auto& s : start) s = gauss(rng);
        const auto res = nelder_mead([&](std::span<const double> x) { return obj.outcome_energy(mu, decode(x)); },
                                     start, nm);
        converged = converged && res.converged;
        channel.per_outcome[mu] = decode(res.x);
        minima[mu] = res.value;
      }
    }
    double total = 0.0;
    for (double v : minima) total += v;
    result.per_restart_minima.push_back(total);
    if (converged) ++result.converged_restarts;
    if (r == 0 || total < result.e_r_numeric) {
      result.e_r_numeric = total;
      result.best_restart = r;
      result.best_channel = std::move(channel);
      result.per_outcome_minima = minima;
    }
  }
  result.restarts_used = options.restarts;
  return result;
}

}  // namespace qet
