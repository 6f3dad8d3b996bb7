#pragma once

#include "qropt/cost.hpp"

namespace qropt::werner {

// End-to-end fidelity after one noisy swap of two Werner links of fidelity f:
// F = 1/4 + s_q (1/2 + s_q/4) ((4f - 1)/3)^2
double swap_fidelity(double f, double s_q);

// N-repeater closed form:
// F = 1/4 + s_q^N (1/2 + s_q^N/4) ((4f - 1)/3)^(N+1)
double e2e_fidelity(int n_repeaters, double f, double s_q);

// Three-node sequential chain: E(T) = 2 T_cycle / p_suc + T_swap, rate = 1/E(T).
double expected_rate(double p_suc, double t_cycle_s, double t_swap_s);

struct WernerBaselines {
  double f_b = 0.5;
  double s_q_b = 0.5;
  double p_suc_b = 1e-10;
};

struct ReferenceOptimum {
  double f = 0.0;
  double s_q = 0.0;
  double p_suc = 0.0;
  double cost = 0.0;
  bool feasible = false;  // both step constraints strictly satisfied
};

// Deterministic ground-truth minimizer of the total cost over (f, s_q, p_suc)
// for the three-node Werner chain, using the closed forms above: a dense grid
// (grid_points^3 evaluations over [baseline, 1) per axis) followed by
// pattern-search coordinate descent refined to relative 1e-6. When no grid
// point satisfies both constraints the best-effort point is returned with
// feasible = false.
ReferenceOptimum reference_global_optimum(const cost::CostConfig& config,
                                          const WernerBaselines& baselines,
                                          double t_cycle_s, double t_swap_s,
                                          int grid_points = 50);

}  // namespace qropt::werner
