#include "qropt/werner.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qropt::werner {

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
}

}  // namespace

double swap_fidelity(double f, double s_q) {
  check_unit(f, "swap_fidelity: f");
  check_unit(s_q, "swap_fidelity: s_q");
  const double x = (4.0 * f - 1.0) / 3.0;
  return 0.25 + s_q * (0.5 + s_q / 4.0) * x * x;
}

double e2e_fidelity(int n_repeaters, double f, double s_q) {
  if (n_repeaters < 0)
    throw std::invalid_argument("e2e_fidelity: n_repeaters must be >= 0");
  check_unit(f, "e2e_fidelity: f");
  check_unit(s_q, "e2e_fidelity: s_q");
  const double x = (4.0 * f - 1.0) / 3.0;
  const double s_n = std::pow(s_q, n_repeaters);
  return 0.25 +
         s_n * (0.5 + s_n / 4.0) * std::pow(x, n_repeaters + 1);
}

double expected_rate(double p_suc, double t_cycle_s, double t_swap_s) {
  if (!(p_suc > 0.0 && p_suc <= 1.0))
    throw std::invalid_argument("expected_rate: p_suc must be in (0, 1]");
  if (!(t_cycle_s > 0.0) || t_swap_s < 0.0)
    throw std::invalid_argument("expected_rate: bad timing parameters");
  return 1.0 / (2.0 * t_cycle_s / p_suc + t_swap_s);
}

ReferenceOptimum reference_global_optimum(const cost::CostConfig& config,
                                          const WernerBaselines& baselines,
                                          double t_cycle_s, double t_swap_s,
                                          int grid_points) {
  config.validate();
  if (grid_points < 2)
    throw std::invalid_argument("reference_global_optimum: grid too coarse");

  const cost::BaselineSet base{{"f_el", baselines.f_b},
                               {"p_suc", baselines.p_suc_b},
                               {"s_q", baselines.s_q_b}};

  const auto feasible_at = [&](double f, double p, double s) {
    return swap_fidelity(f, s) > config.f_min &&
           expected_rate(p, t_cycle_s, t_swap_s) > config.r_min_hz;
  };
  const auto cost_at = [&](double f, double p, double s) {
    const std::array<double, 3> values = {f, p, s};
    return cost::total_cost(values, base, swap_fidelity(f, s),
                            expected_rate(p, t_cycle_s, t_swap_s), config);
  };

  // Grid over [baseline, 1) per axis; the upper endpoint is excluded since a
  // perfect value has infinite cost anyway.
  const std::array<double, 3> lo = {baselines.f_b, baselines.p_suc_b,
                                    baselines.s_q_b};
  std::array<double, 3> best_x = lo;
  double best_cost = cost_at(lo[0], lo[1], lo[2]);
  bool any_feasible = feasible_at(lo[0], lo[1], lo[2]);
  for (int i = 0; i < grid_points; ++i) {
    const double f = lo[0] + (1.0 - lo[0]) * i / grid_points;
    for (int j = 0; j < grid_points; ++j) {
      const double p = lo[1] + (1.0 - lo[1]) * j / grid_points;
      for (int k = 0; k < grid_points; ++k) {
        const double s = lo[2] + (1.0 - lo[2]) * k / grid_points;
        const double c = cost_at(f, p, s);
        any_feasible = any_feasible || feasible_at(f, p, s);
        if (c < best_cost) {
          best_cost = c;
          best_x = {f, p, s};
        }
      }
    }
  }

  // Pattern-search descent; robust against the Heaviside cliffs because only
  // strict improvements are accepted.
  std::array<double, 3> step;
  for (int d = 0; d < 3; ++d) step[d] = (1.0 - lo[d]) / grid_points;
  const double min_step = 1e-6;
  int sweeps = 0;
  while ((step[0] > min_step * (1.0 - lo[0]) ||
          step[1] > min_step * (1.0 - lo[1]) ||
          step[2] > min_step * (1.0 - lo[2])) &&
         ++sweeps < 200000) {
    bool improved = false;
    for (int d = 0; d < 3; ++d) {
      for (double sign : {1.0, -1.0}) {
        std::array<double, 3> trial = best_x;
        trial[d] += sign * step[d];
        trial[d] = std::min(1.0 - 1e-12, std::max(lo[d], trial[d]));
        const double c = cost_at(trial[0], trial[1], trial[2]);
        if (c < best_cost) {
          best_cost = c;
          best_x = trial;
          improved = true;
        }
      }
    }
    if (!improved)
      for (double& s : step) s *= 0.5;
  }

  ReferenceOptimum result;
  result.f = best_x[0];
  result.p_suc = best_x[1];
  result.s_q = best_x[2];
  result.cost = best_cost;
  result.feasible =
      any_feasible && feasible_at(best_x[0], best_x[1], best_x[2]);
  return result;
}

}  // namespace qropt::werner
