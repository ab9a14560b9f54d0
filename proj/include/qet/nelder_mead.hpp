#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qet {

struct NelderMeadOptions {
  std::size_t max_evaluations = 5000;
  double f_tol = 1e-10;  // spread of simplex values
  double x_tol = 1e-8;   // max vertex distance from the best vertex (infinity norm); <= 0 disables
  double initial_step = 0.5;
  // Dimension-dependent coefficients (Gao & Han 2012); classic 1, 2, 0.5, 0.5 otherwise.
  bool adaptive = true;
  std::size_t max_restarts = 0;  // re-seed the simplex at the best point after convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace qet
