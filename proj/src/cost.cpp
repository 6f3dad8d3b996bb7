#include "qropt/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "qropt/ini.hpp"

namespace qropt::cost {

namespace {

void check_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument(std::string(what) +
                                " must be strictly inside (0, 1)");
}

}  // namespace

BaselineSet::BaselineSet(
    std::initializer_list<std::pair<std::string, double>> init) {
  for (const auto& [name, value] : init) set(name, value);
}

void BaselineSet::set(std::string name, double value) {
  check_open_unit(value, "baseline value");
  for (auto& entry : entries_)
    if (entry.first == name) {
      entry.second = value;
      return;
    }
  entries_.emplace_back(std::move(name), value);
}

double BaselineSet::at(std::string_view name) const {
  for (const auto& entry : entries_)
    if (entry.first == name) return entry.second;
  throw std::invalid_argument("BaselineSet: unknown parameter " +
                              std::string(name));
}

bool BaselineSet::has(std::string_view name) const {
  for (const auto& entry : entries_)
    if (entry.first == name) return true;
  return false;
}

void CostConfig::validate() const {
  if (!(f_min >= 0.0 && f_min <= 1.0))
    throw std::invalid_argument("CostConfig: f_min must be in [0, 1]");
  if (!(r_min_hz >= 0.0))
    throw std::invalid_argument("CostConfig: r_min must be >= 0");
  if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0)
    throw std::invalid_argument("CostConfig: weights must be nonnegative");
  if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0)
    throw std::invalid_argument("CostConfig: at least one weight positive");
}

double improve(double x_b, double k) {
  check_open_unit(x_b, "improve: baseline");
  if (!(k >= 1.0)) throw std::invalid_argument("improve: k must be >= 1");
  return std::pow(x_b, 1.0 / k);
}

double improvement_factor(double x_b, double x_new) {
  check_open_unit(x_b, "improvement_factor: baseline");
  if (x_new == 1.0) return kInfiniteCost;
  check_open_unit(x_new, "improvement_factor: value");
  return std::log(x_b) / std::log(x_new);
}

double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

double parameter_cost(const BaselineSet& baselines,
                      std::span<const double> values) {
  if (values.size() != baselines.size())
    throw std::invalid_argument(
        "parameter_cost: value count does not match baseline count");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double k =
        improvement_factor(baselines.entries()[i].second, values[i]);
    if (std::isinf(k)) return kInfiniteCost;
    sum += k;
  }
  return sum;
}

double total_cost(std::span<const double> values, const BaselineSet& baselines,
                  double mean_fidelity, double rate_hz,
                  const CostConfig& config) {
  config.validate();
  double c = parameter_cost(baselines, values);
  if (std::isinf(c)) return kInfiniteCost;
  if (config.average_parameter_cost && !values.empty())
    c /= static_cast<double>(values.size());
  return config.w1 * heaviside(config.f_min - mean_fidelity) +
         config.w2 * heaviside(config.r_min_hz - rate_hz) + config.w3 * c;
}

std::vector<RepeaterParams> propagate_link_baselines(
    const BaselineSet& reference, const NormalizedParams& candidate,
    std::span<const LinkBaseline> links, TimeGeneConvention conv) {
  const double k_f = improvement_factor(reference.at("f_el"), candidate.f_el);
  const double k_p =
      improvement_factor(reference.at("p_suc"), candidate.p_suc);
  std::vector<RepeaterParams> out;
  out.reserve(links.size());
  for (const LinkBaseline& link : links) {
    check_open_unit(link.f_el, "propagate_link_baselines: link f_el");
    check_open_unit(link.p_suc, "propagate_link_baselines: link p_suc");
    RepeaterParams params;
    // improvement factors below 1 (candidate under the reference baseline)
    // are propagated as-is, degrading the link value
    params.f_el = std::pow(link.f_el, 1.0 / k_f);
    params.p_suc = std::pow(link.p_suc, 1.0 / k_p);
    params.s_q = candidate.s_q;
    params.t1_s = gene_to_time(candidate.t1, conv);
    params.t2_s = gene_to_time(candidate.t2, conv);
    params.validate();
    out.push_back(params);
  }
  return out;
}

BaselineSet load_baselines(const std::filesystem::path& path) {
  const IniFile ini = IniFile::load(path);
  BaselineSet set;
  set.set("f_el", ini.get_double("baselines", "f_el"));
  set.set("p_suc", ini.get_double("baselines", "p_suc"));
  set.set("s_q", ini.get_double("baselines", "s_q"));
  set.set("t1", time_to_gene(ini.get_double("baselines", "t1_s")));
  set.set("t2", time_to_gene(ini.get_double("baselines", "t2_s")));
  return set;
}

std::vector<double> baseline_values(const BaselineSet& baselines) {
  std::vector<double> out;
  out.reserve(baselines.size());
  for (const auto& entry : baselines.entries()) out.push_back(entry.second);
  return out;
}

}  // namespace qropt::cost
