#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qropt/repeater.hpp"

namespace qropt::cost {

// Values of exactly 1 (a perfect parameter) carry infinite improvement cost.
inline constexpr double kInfiniteCost =
    std::numeric_limits<double>::infinity();

// Named baseline values on the normalized [0, 1] scale, each strictly inside
// (0, 1). Iteration order is insertion order and defines the value layout
// expected by parameter_cost / total_cost.
class BaselineSet {
 public:
  BaselineSet() = default;
  BaselineSet(std::initializer_list<std::pair<std::string, double>> init);

  void set(std::string name, double value);
  double at(std::string_view name) const;
  bool has(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

struct CostConfig {
  double f_min = 0.7;
  double r_min_hz = 1.0;
  double w1 = 25000.0;  // fidelity penalty weight
  double w2 = 25000.0;  // rate penalty weight
  double w3 = 1.0;      // parameter-cost weight
  // The parameter-cost equation is a sum; the surrounding prose reads it as
  // an average. The sum is the default, this flag divides by the count.
  bool average_parameter_cost = false;

  void validate() const;
};

// x_new = x_b^(1/k), the value reached by improving x_b by a factor k >= 1.
double improve(double x_b, double k);

// Inverse of improve: k = ln(x_b) / ln(x_new). Returns kInfiniteCost when
// x_new == 1; throws outside (0, 1).
double improvement_factor(double x_b, double x_new);

// Theta(0) = 1: hitting a target exactly still counts as missing it.
double heaviside(double x);

// Sum over parameters of the improvement factor from baseline to value.
// `values` is aligned with the baseline set's insertion order.
double parameter_cost(const BaselineSet& baselines,
                      std::span<const double> values);

// w1 Theta(F_min - F) + w2 Theta(R_min - R) + w3 C(values)
double total_cost(std::span<const double> values, const BaselineSet& baselines,
                  double mean_fidelity, double rate_hz,
                  const CostConfig& config);

struct LinkBaseline {
  double f_el = 1.0;
  double p_suc = 1.0;
};

// Turns one candidate (valued against the reference baselines) into per-link
// physical parameters: the f_el and p_suc improvement factors are re-applied
// to each link's own baselines; the length-independent parameters are copied.
// Baseline names used: f_el, p_suc (reference must contain both).
std::vector<RepeaterParams> propagate_link_baselines(
    const BaselineSet& reference, const NormalizedParams& candidate,
    std::span<const LinkBaseline> links,
    TimeGeneConvention conv = TimeGeneConvention::kOriented);

// Reads a [baselines] section with physical values (f_el, p_suc, s_q, t1_s,
// t2_s), normalizes the times, and validates every entry lies in (0, 1).
BaselineSet load_baselines(const std::filesystem::path& path);

// Gene layout shared by the five-parameter baseline files and histories.
std::vector<double> baseline_values(const BaselineSet& baselines);

}  // namespace qropt::cost
