#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qet/chain_model.hpp"
#include "qet/nelder_mead.hpp"
#include "qet/protocol.hpp"

namespace qet {

using KrausSet = std::vector<Eigen::Matrix2cd>;

// Outcome-conditioned single-qubit channel: per_outcome[mu] holds the Kraus
// operators M(alpha, mu) applied after measurement outcome mu.
struct LocalChannel {
  std::vector<KrausSet> per_outcome;

  static LocalChannel identity(std::size_t outcomes = 2);
  // max_mu || sum_alpha M^dag M - I ||_max
  double completeness_error() const;
};

inline constexpr std::size_t kDefaultEnvironmentDim = 4;

// Stinespring form: a (2 * env_dim) x 2 isometry V whose row block alpha is
// the Kraus operator M(alpha). V^dag V = I is exactly completeness.
KrausSet kraus_from_isometry(const Eigen::MatrixXcd& isometry);
Eigen::MatrixXcd isometry_from_kraus(const KrausSet& kraus);

// Unconstrained reals -> isometry via the polar factor Z (Z^dag Z)^{-1/2}.
// Needs 8 * env_dim parameters (real and imaginary parts of Z).
std::size_t isometry_parameter_count(std::size_t env_dim = kDefaultEnvironmentDim);
Eigen::MatrixXcd isometry_from_parameters(std::span<const double> params,
                                          std::size_t env_dim = kDefaultEnvironmentDim);

// Haar-distributed isometry per outcome.
LocalChannel random_channel(std::uint64_t seed, std::size_t env_dim = kDefaultEnvironmentDim,
                            std::size_t outcomes = 2);

inline constexpr double kPruneWeight = 1e-14;

// Each branch (w, psi, mu) becomes (w ||M psi||^2, M psi / ||M psi||, mu) per
// Kraus operator; branches below kPruneWeight are dropped.
MixedEnsemble apply_channel(const MixedEnsemble& ensemble, const LocalChannel& channel, std::size_t site);

// Energy after a channel on `site` as a Hermitian form in the Kraus entries:
// for outcome mu, E = w_mu sum_alpha m_alpha^dag G_mu m_alpha with
// m = (M00, M01, M10, M11) and G_mu[q, q'] = <E_q psi_mu| H |E_q' psi_mu>.
struct CoolingObjective {
  std::vector<double> weights;
  std::vector<Eigen::Matrix4cd> gram;

  double outcome_energy(std::size_t mu, const KrausSet& kraus) const;
  double energy(const LocalChannel& channel) const;
};

CoolingObjective cooling_objective(const MixedEnsemble& ensemble, const HermitianOperator& hamiltonian,
                                   std::size_t site);

struct CoolingOptions {
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  std::size_t env_dim = kDefaultEnvironmentDim;
  // The isometry parameterization has gauge directions, so only the value spread is tested.
  NelderMeadOptions optimizer{20000, 1e-12, 0.0, 0.5, true, 8};
  // Optimize all outcomes as one problem instead of one problem per outcome.
  bool joint = false;
};

struct CoolingResult {
  double e_r_numeric = 0.0;
  double e_a = 0.0;
  LocalChannel best_channel;
  std::size_t best_restart = 0;
  std::size_t restarts_used = 0;
  std::vector<double> per_restart_minima;
  std::vector<double> per_outcome_minima;  // of the best restart
  std::size_t converged_restarts = 0;
};

CoolingResult minimize_residual(const CalibratedChain& chain, const MeasurementSetup& setup,
                                const CoolingOptions& options = {});

}  // namespace qet
