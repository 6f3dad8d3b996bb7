#include "qropt/repeater.hpp"

#include <cmath>
#include <stdexcept>

namespace qropt {

void RepeaterParams::validate() const {
  if (!(f_el >= 0.0 && f_el <= 1.0))
    throw std::invalid_argument("RepeaterParams: f_el must be in [0, 1]");
  if (!(p_suc > 0.0 && p_suc <= 1.0))
    throw std::invalid_argument("RepeaterParams: p_suc must be in (0, 1]");
  if (!(s_q >= 0.0 && s_q <= 1.0))
    throw std::invalid_argument("RepeaterParams: s_q must be in [0, 1]");
  if (!(t1_s > 0.0) || !(t2_s > 0.0))
    throw std::invalid_argument("RepeaterParams: T1 and T2 must be > 0");
  if (t2_s > 2.0 * t1_s)
    throw std::invalid_argument("RepeaterParams: T2 > 2 T1 is unphysical");
}

StateMatrix elementary_link_state(double f_el) {
  if (!(f_el >= 0.0 && f_el <= 1.0))
    throw std::invalid_argument("elementary_link_state: f_el must be in [0, 1]");
  StateMatrix up_up = StateMatrix::Zero();
  up_up(0, 0) = 1.0;
  return f_el * bell_state(BellKind::kPsiPlus) + (1.0 - f_el) * up_up;
}

double compose_swap_quality(std::span<const double> error_probs) {
  double s_q = 1.0;
  for (double p : error_probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument(
          "compose_swap_quality: error probabilities must be in [0, 1]");
    s_q *= 1.0 - p;
  }
  return s_q;
}

double induced_dephasing_t2(double t1_s, double p1, double t_cycle_s) {
  if (!(t1_s > 0.0))
    throw std::invalid_argument("induced_dephasing_t2: T1 must be > 0");
  if (!(t_cycle_s > 0.0))
    throw std::invalid_argument("induced_dephasing_t2: T_cycle must be > 0");
  if (!(p1 >= 0.0 && p1 < 0.5))
    throw std::invalid_argument(
        "induced_dephasing_t2: p1 must be in [0, 1/2)");
  return 1.0 / (1.0 / (2.0 * t1_s) - std::log1p(-2.0 * p1) / t_cycle_s);
}

double time_to_gene(double t_s, TimeGeneConvention conv) {
  // the transform itself is defined at 0; parameter validation is what
  // rejects non-positive coherence times
  if (!(t_s >= 0.0))
    throw std::invalid_argument("time_to_gene: time must be >= 0");
  if (conv == TimeGeneConvention::kReciprocal) return 1.0 / (t_s + 1.0);
  if (std::isinf(t_s)) return 1.0;
  return t_s / (t_s + 1.0);
}

double gene_to_time(double gene, TimeGeneConvention conv) {
  if (!(gene >= 0.0 && gene <= 1.0))
    throw std::invalid_argument("gene_to_time: gene must be in [0, 1]");
  if (conv == TimeGeneConvention::kReciprocal) {
    if (gene == 0.0)
      throw std::domain_error("gene_to_time: gene 0 maps to infinite time");
    return 1.0 / gene - 1.0;
  }
  if (gene == 1.0)
    throw std::domain_error("gene_to_time: gene 1 maps to infinite time");
  return gene / (1.0 - gene);
}

NormalizedParams normalize(const RepeaterParams& params,
                           TimeGeneConvention conv) {
  params.validate();
  NormalizedParams genes;
  genes.f_el = params.f_el;
  genes.p_suc = params.p_suc;
  genes.s_q = params.s_q;
  genes.t1 = time_to_gene(params.t1_s, conv);
  genes.t2 = time_to_gene(params.t2_s, conv);
  return genes;
}

RepeaterParams denormalize(const NormalizedParams& genes,
                           TimeGeneConvention conv) {
  RepeaterParams params;
  params.f_el = genes.f_el;
  params.p_suc = genes.p_suc;
  params.s_q = genes.s_q;
  params.t1_s = gene_to_time(genes.t1, conv);
  params.t2_s = gene_to_time(genes.t2, conv);
  params.validate();
  return params;
}

}  // namespace qropt
