#pragma once

#include <span>

#include "qropt/quantum.hpp"

namespace qropt {

// The five-parameter abstract repeater: elementary-link fidelity, per-attempt
// success probability, swap quality, and the two memory coherence times.
struct RepeaterParams {
  double f_el = 1.0;    // in [0, 1]
  double p_suc = 1.0;   // in (0, 1]
  double s_q = 1.0;     // in [0, 1]
  double t1_s = 1.0;    // > 0, may be +inf
  double t2_s = 1.0;    // > 0, t2 <= 2 t1

  void validate() const;
};

// The GA's view of the same five parameters: genes in [0, 1], 1 = perfect.
struct NormalizedParams {
  double f_el = 0.0;
  double p_suc = 0.0;
  double s_q = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

// Time-gene transform. kOriented maps T -> T/(T+1), increasing so that 1 is
// the perfect value as the cost convention requires. kReciprocal is the
// decreasing 1/(T+1) variant, kept for comparison.
enum class TimeGeneConvention { kOriented, kReciprocal };

// F_EL |psi+><psi+| + (1 - F_EL) |00><00|
StateMatrix elementary_link_state(double f_el);

// s_q = prod_i (1 - p_i); the empty product is 1.
double compose_swap_quality(std::span<const double> error_probs);

// Effective T2 of per-attempt induced dephasing:
// T2 = 1 / (1/(2 T1) - ln(1 - 2 p1) / T_cycle), valid for p1 in [0, 1/2).
double induced_dephasing_t2(double t1_s, double p1, double t_cycle_s);

double time_to_gene(double t_s,
                    TimeGeneConvention conv = TimeGeneConvention::kOriented);

// Inverse transform. Throws std::domain_error for gene == 1 (infinite time).
double gene_to_time(double gene,
                    TimeGeneConvention conv = TimeGeneConvention::kOriented);

NormalizedParams normalize(
    const RepeaterParams& params,
    TimeGeneConvention conv = TimeGeneConvention::kOriented);

RepeaterParams denormalize(
    const NormalizedParams& genes,
    TimeGeneConvention conv = TimeGeneConvention::kOriented);

}  // namespace qropt
