#include "qet/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qet {

namespace {

NelderMeadResult run_once(const Objective& f, std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();

  const double n = static_cast<double>(dim);
  const double reflect = 1.0;
  const double expand = options.adaptive ? 1.0 + 2.0 / n : 2.0;
  const double contract = options.adaptive ? 0.75 - 0.5 / n : 0.5;
  const double shrink = options.adaptive ? 1.0 - 1.0 / n : 0.5;

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += start[i] != 0.0 ? options.initial_step * std::max(1.0, std::abs(start[i]))
                                         : options.initial_step;
  }
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(dim + 1);
    std::vector<double> v(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  auto along = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - simplex[dim][j]);
  };

  sort_simplex();
  while (result.evaluations < options.max_evaluations) {
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) x_spread = std::max(x_spread, std::abs(simplex[i][j] - simplex[0][j]));
    }
    if (values[dim] - values[0] <= options.f_tol && (options.x_tol <= 0.0 || x_spread <= options.x_tol)) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (auto& c : centroid) c /= n;

    along(reflect, trial);
    const double f_r = eval(trial);
    if (f_r < values[0]) {
      along(reflect * expand, trial2);
      const double f_e = eval(trial2);
      if (f_e < f_r) {
        simplex[dim] = trial2;
        values[dim] = f_e;
      } else {
        simplex[dim] = trial;
        values[dim] = f_r;
      }
    } else if (f_r < values[dim - 1]) {
      simplex[dim] = trial;
      values[dim] = f_r;
    } else {
      const bool outside = f_r < values[dim];
      along(outside ? reflect * contract : -contract, trial2);
      const double f_c = eval(trial2);
      if (f_c < (outside ? f_r : values[dim])) {
        simplex[dim] = trial2;
        values[dim] = f_c;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) simplex[i][j] = simplex[0][j] + shrink * (simplex[i][j] - simplex[0][j]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }

  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options) {
  if (start.empty()) throw std::invalid_argument("Nelder-Mead needs at least one parameter");
  NelderMeadResult best = run_once(f, std::move(start), options);
  // A collapsed simplex can stall away from the minimum; rebuild it around the
  // best point until a fresh run stops improving.
  for (std::size_t k = 0; k < options.max_restarts && best.converged; ++k) {
    const std::size_t used = best.evaluations;
    if (used >= options.max_evaluations) break;
    NelderMeadOptions again = options;
    again.max_evaluations = options.max_evaluations - used;
    NelderMeadResult next = run_once(f, best.x, again);
    next.evaluations += used;
    const bool improved = next.value < best.value - options.f_tol;
    if (next.value < best.value) {
      best.x = std::move(next.x);
      best.value = next.value;
    }
    best.evaluations = next.evaluations;
    best.converged = next.converged;
    if (!improved) break;
  }
  return best;
}

}  // namespace qet
