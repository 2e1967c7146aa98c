#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fkde/estimator.hpp"
#include "fkde/experiments.hpp"
#include "fkde/format.hpp"

namespace fkde {

using Json = nlohmann::ordered_json;

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline Json to_json(const ExponentPlan& p) {
  return Json{{"alpha", p.alpha},
              {"a", p.a},
              {"b", p.b},
              {"checks",
               {{"hk_diverges", p.hk_diverges},
                {"holder_bias_vanishes", p.holder_bias_vanishes},
                {"discretisation_vanishes", p.discretisation_vanishes},
                {"strips_sparse", p.strips_sparse}}},
              {"valid", p.valid}};
}

inline Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const CltReport& r) {
  Json per_n = Json::array();
  for (const CltPoint& p : r.per_n) {
    Json j{{"n", p.n},
           {"k", p.k},
           {"h", p.h},
           {"scale", p.scale},
           {"replicates", p.standardized_errors.size()},
           {"mean", p.mean},
           {"sd", optional_number(p.sd)}};
    if (!p.sd) j["sd_reason"] = "fewer than 2 replicates";
    j["sd_over_sigma"] =
        p.sd ? Json(*p.sd / r.sigma_theory) : Json(nullptr);
    j["ks_distance"] = p.ks_distance;
    j["standardized_errors"] = p.standardized_errors;
    per_n.push_back(std::move(j));
  }
  return Json{{"plan", to_json(r.plan)},
              {"x", r.x},
              {"truth", r.truth},
              {"sigma_theory", r.sigma_theory},
              {"replicates", r.replicates},
              {"seed", r.seed},
              {"per_n", std::move(per_n)}};
}

inline Json to_json(const SandwichReport& r) {
  return Json{
      {"n", r.n},
      {"k", r.k},
      {"h", r.h},
      {"gamma", r.gamma},
      {"x", r.x},
      {"replicates", r.replicates},
      {"seed", r.seed},
      {"en_fail_count", r.en_fail_count},
      {"p_en_fail_hat", r.p_en_fail_hat},
      {"lemma2_bound", r.lemma2_bound},
      {"lemma2_slack", r.lemma2_slack},
      {"lemma2_applicable", r.lemma2_applicable},
      {"lemma2_holds", r.lemma2_holds ? Json(*r.lemma2_holds) : Json(nullptr)},
      {"lemma2_note",
       "bound checked only when n*gamma^2 >= 16 and the bound is below 0.5"},
      {"ordering_violations", r.ordering_violations},
      {"poisson_order_violations", r.poisson_order_violations},
      {"sample_order_violations", r.sample_order_violations},
      {"mean_estimator_gap", r.mean_estimator_gap}};
}

inline Json to_json(const GammaPolicy& g) {
  if (g.kind == GammaPolicy::Kind::fixed)
    return Json{{"kind", "fixed"}, {"gamma", g.value}};
  return Json{{"kind", "inv-sqrt-k"}};
}

inline Json to_json(const RateReport& r) {
  Json per_n = Json::array();
  for (const RatePoint& p : r.per_n)
    per_n.push_back(Json{{"n", p.n},
                         {"k", p.k},
                         {"h", p.h},
                         {"gamma", p.gamma},
                         {"mean_u_gap", p.mean_u_gap},
                         {"min_u_gap", p.min_u_gap},
                         {"ratio", p.ratio},
                         {"scaled_estimator_gap", p.scaled_estimator_gap}});
  return Json{{"plan", to_json(r.plan)},
              {"gamma_policy", to_json(r.gamma_policy)},
              {"replicates", r.replicates},
              {"x", r.x},
              {"seed", r.seed},
              {"wide_variance", r.wide_variance},
              {"per_n", std::move(per_n)}};
}

inline Json to_json(const std::vector<WeightSumPoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts)
    arr.push_back(Json{{"n", p.n}, {"k", p.k}, {"h", p.h},
                       {"weight_sum", p.weight_sum}});
  return arr;
}

// CSV tables -----------------------------------------------------------------

inline void write_clt_errors_csv(std::ostream& os, const CltReport& r) {
  os << "n,replicate,standardized_error\n";
  for (const CltPoint& p : r.per_n)
    for (std::size_t i = 0; i < p.standardized_errors.size(); ++i)
      os << p.n << ',' << i << ',' << format_double(p.standardized_errors[i])
         << '\n';
}

inline void write_clt_summary_csv(std::ostream& os, const CltReport& r) {
  os << "n,k,h,scale,replicates,mean,sd,ks_distance,sigma_theory\n";
  for (const CltPoint& p : r.per_n)
    os << p.n << ',' << p.k << ',' << format_double(p.h) << ','
       << format_double(p.scale) << ',' << p.standardized_errors.size() << ','
       << format_double(p.mean) << ',' << (p.sd ? format_double(*p.sd) : "")
       << ',' << format_double(p.ks_distance) << ','
       << format_double(r.sigma_theory) << '\n';
}

inline void write_sandwich_csv(std::ostream& os, const SandwichReport& r) {
  os << "n,k,h,gamma,x,replicates,en_fail_count,p_en_fail_hat,lemma2_bound,"
        "lemma2_applicable,ordering_violations,mean_estimator_gap\n";
  os << r.n << ',' << r.k << ',' << format_double(r.h) << ','
     << format_double(r.gamma) << ',' << format_double(r.x) << ','
     << r.replicates << ',' << r.en_fail_count << ','
     << format_double(r.p_en_fail_hat) << ',' << format_double(r.lemma2_bound)
     << ',' << (r.lemma2_applicable ? "true" : "false") << ','
     << r.ordering_violations << ',' << format_double(r.mean_estimator_gap)
     << '\n';
}

inline void write_rate_csv(std::ostream& os, const RateReport& r) {
  os << "n,k,h,gamma,mean_u_gap,min_u_gap,ratio,scaled_estimator_gap\n";
  for (const RatePoint& p : r.per_n)
    os << p.n << ',' << p.k << ',' << format_double(p.h) << ','
       << format_double(p.gamma) << ',' << format_double(p.mean_u_gap) << ','
       << format_double(p.min_u_gap) << ',' << format_double(p.ratio) << ','
       << format_double(p.scaled_estimator_gap) << '\n';
}

inline void write_weight_sum_csv(std::ostream& os,
                                 const std::vector<WeightSumPoint>& pts) {
  os << "n,k,h,weight_sum\n";
  for (const auto& p : pts)
    os << p.n << ',' << p.k << ',' << format_double(p.h) << ','
       << format_double(p.weight_sum) << '\n';
}

inline void write_plan_csv(std::ostream& os, const ExponentPlan& p) {
  os << "alpha,a,b,hk_diverges,holder_bias_vanishes,discretisation_vanishes,"
        "strips_sparse,valid\n";
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << format_double(p.alpha) << ',' << format_double(p.a) << ','
     << format_double(p.b) << ',' << b(p.hk_diverges) << ','
     << b(p.holder_bias_vanishes) << ',' << b(p.discretisation_vanishes) << ','
     << b(p.strips_sparse) << ',' << b(p.valid) << '\n';
}

} // namespace fkde
