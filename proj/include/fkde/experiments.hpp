#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fkde/error.hpp"
#include "fkde/estimator.hpp"
#include "fkde/model.hpp"
#include "fkde/parallel.hpp"
#include "fkde/rng.hpp"
#include "fkde/sim.hpp"
#include "fkde/stats.hpp"

namespace fkde {

// Stream tags keep the experiments' random streams disjoint under one seed.
enum class StreamTag : std::uint64_t { clt = 1, sandwich = 2, gap_rate = 3 };

/// Factor n h^(1/2) / k^(1/2) that makes the estimation error O(1).
inline double clt_scale(const EstimatorParams& p) {
  return static_cast<double>(p.n) * std::sqrt(p.h) /
         std::sqrt(static_cast<double>(p.k));
}

/// Interior evaluation window [A h + 1/k, 1 - A h - 1/k].
inline bool in_interior_window(const EstimatorParams& p, double x) {
  const double margin = p.kernel.support_radius() * p.h +
                        1.0 / static_cast<double>(p.k);
  return x >= margin && x <= 1.0 - margin;
}

namespace detail {

inline void check_grid(const std::vector<std::size_t>& n_grid) {
  if (n_grid.empty()) throw ParameterError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ParameterError("n_grid values must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw ParameterError("n_grid must be strictly increasing");
  }
}

inline void check_alpha(const Frontier& f, const ExponentPlan& plan) {
  if (plan.alpha > f.alpha())
    throw ParameterError("plan alpha exceeds the frontier's Hoelder exponent");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Asymptotic normality

struct CltPoint {
  std::size_t n = 0;
  std::size_t k = 0;
  double h = 0.0;
  double scale = 0.0;
  std::vector<double> standardized_errors;
  double mean = 0.0;
  std::optional<double> sd; // needs >= 2 replicates
  double ks_distance = 0.0;
};

struct CltReport {
  ExponentPlan plan;
  double x = 0.5;
  double truth = 0.0;
  double sigma_theory = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<CltPoint> per_n;
};

inline CltReport run_clt(const Frontier& frontier, const Kernel& kernel,
                         const ExponentPlan& plan,
                         const std::vector<std::size_t>& n_grid,
                         std::size_t replicates, double x,
                         std::uint64_t master_seed, unsigned threads = 0) {
  if (!plan.valid) throw ParameterError("run_clt: plan violates the rate conditions");
  if (replicates == 0) throw ParameterError("run_clt: replicates must be >= 1");
  detail::check_grid(n_grid);
  detail::check_alpha(frontier, plan);
  for (std::size_t n : n_grid) {
    const auto p = plan.params_for(n, kernel);
    p.validate();
    if (!in_interior_window(p, x))
      throw ParameterError("run_clt: x outside the interior window at n=" +
                           std::to_string(n));
  }

  CltReport report;
  report.plan = plan;
  report.x = x;
  report.truth = frontier(x);
  report.sigma_theory = sigma_theoretical(kernel, frontier);
  report.replicates = replicates;
  report.seed = master_seed;

  const double sigma = report.sigma_theory;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const auto p = plan.params_for(n_grid[gi], kernel);
    CltPoint pt{p.n, p.k, p.h, clt_scale(p), {}, 0.0, std::nullopt, 0.0};
    pt.standardized_errors.assign(replicates, 0.0);
    parallel_for(replicates, threads, [&](std::size_t r) {
      const auto seed = derive_seed(
          master_seed, {static_cast<std::uint64_t>(StreamTag::clt), p.n, r});
      const SampleSet sample = sample_uniform(frontier, p.n, seed);
      const StripMaxima m = strip_maxima(sample.view(), p.k);
      pt.standardized_errors[r] = pt.scale * (estimate(p, m, x) - report.truth);
    });
    pt.mean = mean_of(pt.standardized_errors);
    pt.sd = sample_sd(pt.standardized_errors);
    pt.ks_distance = ks_distance(pt.standardized_errors, [sigma](double z) {
      return normal_cdf(z / sigma);
    });
    report.per_n.push_back(std::move(pt));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sandwich ordering and the bracketing probability

struct SandwichReport {
  std::size_t n = 0;
  std::size_t k = 0;
  double h = 0.0;
  double gamma = 0.0;
  double x = 0.5;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t en_fail_count = 0;
  double p_en_fail_hat = 0.0;
  double lemma2_bound = 0.0; // 2 exp(-n gamma^2 / 8)
  double lemma2_slack = 0.0; // 3 sqrt(p (1 - p) / R)
  // The bound is only claimed for large n; checked when n gamma^2 >= 16 and
  // the bound is below 0.5.
  bool lemma2_applicable = false;
  std::optional<bool> lemma2_holds;
  std::size_t ordering_violations = 0;    // both orderings, all replicates
  std::size_t poisson_order_violations = 0; // f1 <= f0 <= f2
  std::size_t sample_order_violations = 0;  // f1 <= fn <= f2 on E_n
  double mean_estimator_gap = 0.0;          // mean of f2(x) - f1(x)
};

inline double lemma2_bound(std::size_t n, double gamma) {
  return 2.0 * std::exp(-static_cast<double>(n) * gamma * gamma / 8.0);
}

inline SandwichReport run_sandwich(const Frontier& frontier,
                                   const EstimatorParams& params, double gamma,
                                   std::size_t replicates, double x,
                                   std::uint64_t master_seed,
                                   unsigned threads = 0) {
  params.validate();
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ParameterError("run_sandwich: gamma must be in (0,1)");
  if (replicates == 0) throw ParameterError("run_sandwich: replicates must be >= 1");

  struct Outcome {
    bool en_fail;
    bool poisson_violation;
    bool sample_violation;
    double gap;
  };
  std::vector<Outcome> outcomes(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const auto seed = derive_seed(
        master_seed,
        {static_cast<std::uint64_t>(StreamTag::sandwich), params.n, r});
    const SandwichTriple t = sample_sandwich(frontier, params.n, gamma, seed);
    const double f1 = estimate(params, strip_maxima(t.sigma1(), params.k), x);
    const double f0 = estimate(params, strip_maxima(t.sigma0(), params.k), x);
    const double f2 = estimate(params, strip_maxima(t.sigma2(), params.k), x);
    Outcome o{!t.e_n_holds, !(f1 <= f0 && f0 <= f2), false, f2 - f1};
    if (t.e_n_holds) {
      const double fn = estimate(params, strip_maxima(t.sigma_n(), params.k), x);
      o.sample_violation = !(f1 <= fn && fn <= f2);
    }
    outcomes[r] = o;
  });

  SandwichReport rep;
  rep.n = params.n;
  rep.k = params.k;
  rep.h = params.h;
  rep.gamma = gamma;
  rep.x = x;
  rep.replicates = replicates;
  rep.seed = master_seed;
  double gap_sum = 0.0;
  for (const Outcome& o : outcomes) {
    rep.en_fail_count += o.en_fail ? 1 : 0;
    rep.poisson_order_violations += o.poisson_violation ? 1 : 0;
    rep.sample_order_violations += o.sample_violation ? 1 : 0;
    gap_sum += o.gap;
  }
  rep.ordering_violations =
      rep.poisson_order_violations + rep.sample_order_violations;
  const double R = static_cast<double>(replicates);
  rep.mean_estimator_gap = gap_sum / R;
  rep.p_en_fail_hat = static_cast<double>(rep.en_fail_count) / R;
  rep.lemma2_bound = lemma2_bound(params.n, gamma);
  rep.lemma2_slack =
      3.0 * std::sqrt(rep.p_en_fail_hat * (1.0 - rep.p_en_fail_hat) / R);
  const double ngg = static_cast<double>(params.n) * gamma * gamma;
  rep.lemma2_applicable = ngg >= 16.0 && rep.lemma2_bound < 0.5;
  if (rep.lemma2_applicable)
    rep.lemma2_holds = rep.p_en_fail_hat <= rep.lemma2_bound + rep.lemma2_slack;
  return rep;
}

inline SandwichReport run_sandwich(const Frontier& frontier,
                                   const Kernel& kernel,
                                   const ExponentPlan& plan, std::size_t n,
                                   double gamma, std::size_t replicates,
                                   double x, std::uint64_t master_seed,
                                   unsigned threads = 0) {
  return run_sandwich(frontier, plan.params_for(n, kernel), gamma, replicates,
                      x, master_seed, threads);
}

// ---------------------------------------------------------------------------
// Extreme-value gap rate

struct GammaPolicy {
  enum class Kind { fixed, inv_sqrt_k };
  Kind kind = Kind::inv_sqrt_k;
  double value = 0.05; // used when kind == fixed

  static GammaPolicy fixed(double g) { return {Kind::fixed, g}; }
  static GammaPolicy inv_sqrt_k() { return {Kind::inv_sqrt_k, 0.0}; }

  double gamma_for(std::size_t k) const {
    return kind == Kind::fixed ? value
                               : 1.0 / std::sqrt(static_cast<double>(k));
  }
};

struct RatePoint {
  std::size_t n = 0;
  std::size_t k = 0;
  double h = 0.0;
  double gamma = 0.0;
  double mean_u_gap = 0.0; // mean of U2 - U1 over strips and replicates
  double min_u_gap = 0.0;  // smallest single-strip gap seen
  double ratio = 0.0;      // mean_u_gap * n / (k gamma)
  // (n h^1/2 / k^1/2) * mean(f2(x) - f1(x)); of order h^1/2 when gamma = k^-1/2
  double scaled_estimator_gap = 0.0;
};

struct RateReport {
  ExponentPlan plan;
  GammaPolicy gamma_policy;
  std::size_t replicates = 0;
  double x = 0.5;
  std::uint64_t seed = 0;
  bool wide_variance = false; // fewer than 30 replicates
  std::vector<RatePoint> per_n;
};

inline RateReport run_gap_rate(const Frontier& frontier, const Kernel& kernel,
                               const ExponentPlan& plan,
                               const GammaPolicy& policy,
                               const std::vector<std::size_t>& n_grid,
                               std::size_t replicates,
                               std::uint64_t master_seed, double x = 0.5,
                               unsigned threads = 0) {
  detail::check_grid(n_grid);
  detail::check_alpha(frontier, plan);
  if (replicates == 0) throw ParameterError("run_gap_rate: replicates must be >= 1");
  if (plan.a * (1.0 + plan.alpha) < 1.0)
    throw ParameterError("run_gap_rate: plan violates n = O(k^(1+alpha))");

  RateReport report;
  report.plan = plan;
  report.gamma_policy = policy;
  report.replicates = replicates;
  report.x = x;
  report.seed = master_seed;
  report.wide_variance = replicates < 30;

  for (std::size_t n : n_grid) {
    const auto p = plan.params_for(n, kernel);
    p.validate();
    const double gamma = policy.gamma_for(p.k);
    if (!(gamma > 0.0 && gamma < 1.0))
      throw ParameterError("run_gap_rate: gamma must be in (0,1)");

    struct Outcome {
      double gap_sum;
      double gap_min;
      double estimator_gap;
    };
    std::vector<Outcome> outcomes(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
      const auto seed = derive_seed(
          master_seed, {static_cast<std::uint64_t>(StreamTag::gap_rate), n, r});
      const SandwichTriple t = sample_sandwich(frontier, n, gamma, seed);
      const StripMaxima lower = strip_maxima(t.sigma1(), p.k);
      const StripMaxima upper = strip_maxima(t.sigma2(), p.k);
      Outcome o{0.0, std::numeric_limits<double>::infinity(), 0.0};
      for (std::size_t i = 0; i < p.k; ++i) {
        const double g = upper.u[i] - lower.u[i];
        o.gap_sum += g;
        o.gap_min = std::min(o.gap_min, g);
      }
      o.estimator_gap = estimate(p, upper, x) - estimate(p, lower, x);
      outcomes[r] = o;
    });

    RatePoint pt{n, p.k, p.h, gamma};
    double gap_total = 0.0, est_total = 0.0;
    pt.min_u_gap = std::numeric_limits<double>::infinity();
    for (const Outcome& o : outcomes) {
      gap_total += o.gap_sum;
      est_total += o.estimator_gap;
      pt.min_u_gap = std::min(pt.min_u_gap, o.gap_min);
    }
    const double R = static_cast<double>(replicates);
    pt.mean_u_gap = gap_total / (R * static_cast<double>(p.k));
    pt.ratio = pt.mean_u_gap * static_cast<double>(n) /
               (static_cast<double>(p.k) * gamma);
    pt.scaled_estimator_gap = clt_scale(p) * est_total / R;
    report.per_n.push_back(pt);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Weight sums (deterministic)

struct WeightSumPoint {
  std::size_t n = 0;
  std::size_t k = 0;
  double h = 0.0;
  double weight_sum = 0.0;
};

inline std::vector<WeightSumPoint>
run_weight_sum(const Kernel& kernel, const ExponentPlan& plan,
               const std::vector<std::size_t>& n_grid, double x) {
  detail::check_grid(n_grid);
  // the limit needs k = o(n) and h k -> inf
  if (!plan.hk_diverges || !plan.strips_sparse)
    throw ParameterError("run_weight_sum: plan needs a > b and a < 1");
  std::vector<WeightSumPoint> out;
  out.reserve(n_grid.size());
  for (std::size_t n : n_grid) {
    const auto p = plan.params_for(n, kernel);
    out.push_back({n, p.k, p.h, weight_sum(p, x)});
  }
  return out;
}

} // namespace fkde
