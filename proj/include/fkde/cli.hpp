#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "fkde/error.hpp"
#include "fkde/estimator.hpp"
#include "fkde/experiments.hpp"
#include "fkde/model.hpp"
#include "fkde/report_io.hpp"
#include "fkde/sim.hpp"

namespace fkde::cli {

/// Bad command line or config file; exit status 2.
class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum class Command { estimate, clt, sandwich, gap_rate, weight_sum, plan, sample };
enum class Format { json, csv };
enum class Process { uniform, poisson };

inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
  Command command = Command::plan;
  std::string frontier_spec = "constant:1.0";
  Frontier frontier = Frontier::constant(1.0);
  Kernel kernel{};
  double alpha = 1.0;
  double a = 0.9;
  double b = 0.5;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::optional<double> h;
  std::vector<std::size_t> n_grid{10000, 100000, 1000000};
  std::size_t replicates = 500;
  double gamma = 0.05;
  GammaPolicy gamma_policy = GammaPolicy::inv_sqrt_k();
  double x = 0.5;
  std::size_t grid = 0; // estimate: number of evaluation points (0 = just x)
  Process process = Process::uniform;
  std::uint64_t seed = kDefaultSeed;
  Format format = Format::json;
  std::string out;
  unsigned threads = 0;
  bool help = false;
  std::string help_text;
};

inline std::string_view command_name(Command c) {
  switch (c) {
  case Command::estimate: return "estimate";
  case Command::clt: return "clt";
  case Command::sandwich: return "sandwich";
  case Command::gap_rate: return "gap-rate";
  case Command::weight_sum: return "weight-sum";
  case Command::plan: return "plan";
  case Command::sample: return "sample";
  }
  return "unknown";
}

// Parsing helpers ------------------------------------------------------------

inline double parse_real(std::string_view text, std::string_view field) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE ||
      !std::isfinite(v))
    throw UsageError("invalid number '" + s + "' for " + std::string(field));
  return v;
}

/// Positive integer; scientific notation such as 1e6 is accepted when exact.
inline std::size_t parse_count(std::string_view text, std::string_view field) {
  const double v = parse_real(text, field);
  if (!(v >= 1.0) || v > 9007199254740992.0 || v != std::floor(v))
    throw UsageError(std::string(field) + " must be a positive integer, got '" +
                     std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::vector<std::size_t> parse_n_grid(std::string_view text) {
  std::vector<std::size_t> grid;
  for (auto part : split(text, ',')) grid.push_back(parse_count(part, "n-grid"));
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw UsageError("n-grid must be strictly increasing");
  return grid;
}

/// `family:p1,p2,...`, e.g. constant:1.0, affine:0.5,1, cosine:1,0.3,
/// piecewise-linear:1,1.4,0.8.
inline Frontier parse_frontier(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view family = spec.substr(0, colon);
  std::vector<double> p;
  if (colon != std::string_view::npos)
    for (auto part : split(spec.substr(colon + 1), ','))
      p.push_back(parse_real(part, "frontier"));
  auto need = [&](std::size_t count) {
    if (p.size() != count)
      throw UsageError("frontier '" + std::string(family) + "' takes " +
                       std::to_string(count) + " parameter(s)");
  };
  try {
    if (family == "constant") {
      need(1);
      return Frontier::constant(p[0]);
    }
    if (family == "affine") {
      need(2);
      return Frontier::affine(p[0], p[1]);
    }
    if (family == "cosine") {
      need(2);
      return Frontier::cosine(p[0], p[1]);
    }
    if (family == "piecewise-linear") return Frontier::piecewise_linear(p);
  } catch (const DomainError& e) {
    throw UsageError(std::string("frontier: ") + e.what());
  }
  throw UsageError("unknown frontier family '" + std::string(family) + "'");
}

inline Kernel parse_kernel(std::string_view name) {
  if (name == "epanechnikov") return Kernel(KernelFamily::epanechnikov);
  if (name == "biweight") return Kernel(KernelFamily::biweight);
  if (name == "triangular") return Kernel(KernelFamily::triangular);
  throw UsageError("unknown kernel '" + std::string(name) + "'");
}

inline Command parse_command(std::string_view name) {
  for (Command c : {Command::estimate, Command::clt, Command::sandwich,
                    Command::gap_rate, Command::weight_sum, Command::plan,
                    Command::sample})
    if (command_name(c) == name) return c;
  throw UsageError("unknown command '" + std::string(name) + "'");
}

// parse_config ---------------------------------------------------------------

/// Builds a validated RunConfig from the arguments after the program name.
/// A `--config FILE` (key = value lines, option names as keys) supplies
/// defaults that command-line flags override.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Kernel frontier estimation from strip maxima, with sandwich "
               "coupling and Monte Carlo checks",
               "frontier"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Read options from a key = value file");

  std::string command, frontier = "constant:1.0", kernel = "epanechnikov";
  std::string n, k, n_grid, gamma_policy = "inv-sqrt-k", process = "uniform";
  std::string format = "json";
  RunConfig cfg;
  double h = 0.0;

  app.add_option("command", command,
                 "estimate | clt | sandwich | gap-rate | weight-sum | plan | sample")
      ->required();
  app.add_option("--frontier", frontier, "family:params, e.g. cosine:1,0.3");
  app.add_option("--kernel", kernel, "epanechnikov | biweight | triangular");
  app.add_option("--alpha", cfg.alpha, "Hoelder exponent used by the planner");
  app.add_option("--a", cfg.a, "strip exponent, k = round(n^a)");
  app.add_option("--b", cfg.b, "bandwidth exponent, h = n^-b");
  auto* n_opt = app.add_option("--n", n, "sample size");
  auto* k_opt = app.add_option("--k", k, "number of strips (overrides --a)");
  auto* h_opt = app.add_option("--h", h, "bandwidth (overrides --b)");
  auto* grid_opt = app.add_option("--n-grid", n_grid, "comma separated, e.g. 1e4,1e5,1e6");
  auto* rep_opt = app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
  auto* gamma_opt = app.add_option("--gamma", cfg.gamma, "sandwich parameter in (0,1)");
  app.add_option("--gamma-policy", gamma_policy, "gap-rate: fixed | inv-sqrt-k");
  app.add_option("--x", cfg.x, "evaluation point");
  app.add_option("--grid", cfg.grid, "estimate: evaluation grid size (0 = only --x)");
  app.add_option("--process", process, "sample: uniform | poisson");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--format", format, "json | csv");
  app.add_option("--out", cfg.out, "output path (default <command>.<format>)");
  app.add_option("--threads", cfg.threads, "worker threads, 0 = auto");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("frontier");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  cfg.command = parse_command(command);
  cfg.frontier_spec = frontier;
  cfg.frontier = parse_frontier(frontier);
  cfg.kernel = parse_kernel(kernel);
  if (n_opt->count() > 0) cfg.n = parse_count(n, "n");
  if (k_opt->count() > 0) cfg.k = parse_count(k, "k");
  if (h_opt->count() > 0) {
    if (!(h > 0.0)) throw UsageError("h must be > 0");
    cfg.h = h;
  }
  if (grid_opt->count() > 0) cfg.n_grid = parse_n_grid(n_grid);

  if (format == "json") cfg.format = Format::json;
  else if (format == "csv") cfg.format = Format::csv;
  else throw UsageError("format must be json or csv");

  if (process == "uniform") cfg.process = Process::uniform;
  else if (process == "poisson") cfg.process = Process::poisson;
  else throw UsageError("process must be uniform or poisson");

  if (gamma_policy == "inv-sqrt-k") cfg.gamma_policy = GammaPolicy::inv_sqrt_k();
  else if (gamma_policy == "fixed") cfg.gamma_policy = GammaPolicy::fixed(cfg.gamma);
  else throw UsageError("gamma-policy must be fixed or inv-sqrt-k");
  // an explicit --gamma on gap-rate means a fixed policy
  if (cfg.command == Command::gap_rate && gamma_opt->count() > 0)
    cfg.gamma_policy = GammaPolicy::fixed(cfg.gamma);

  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw UsageError("alpha must be in (0,1]");
  if (!(cfg.a > 0.0)) throw UsageError("a must be > 0");
  if (!(cfg.b > 0.0)) throw UsageError("b must be > 0");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw UsageError("gamma must be in (0,1)");
  if (!std::isfinite(cfg.x)) throw UsageError("x must be finite");
  if (rep_opt->count() > 0 && cfg.replicates == 0)
    throw UsageError("replicates must be >= 1");

  const bool needs_n = cfg.command == Command::estimate ||
                       cfg.command == Command::sandwich ||
                       cfg.command == Command::sample;
  if (needs_n && !cfg.n)
    throw UsageError(std::string(command_name(cfg.command)) +
                     ": missing required option --n");

  if (cfg.out.empty())
    cfg.out = std::string(command_name(cfg.command)) +
              (cfg.format == Format::json ? ".json" : ".csv");
  return cfg;
}

// execute ----------------------------------------------------------------------

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  return os;
}

inline void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_json(const std::string& path, const Json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
  finish(os, path);
}

template <class Writer>
void write_csv(const std::string& path, Writer&& w) {
  auto os = open_output(path);
  w(os);
  finish(os, path);
}

/// "dir/clt.csv" -> "dir/clt_summary.csv"
inline std::string sibling_path(const std::string& path, std::string_view suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string() + std::string(suffix);
  return (p.parent_path() / (stem + p.extension().string())).string();
}

inline Json header(const RunConfig& c) {
  return Json{{"command", command_name(c.command)},
              {"frontier", c.frontier_spec},
              {"kernel", to_string(c.kernel.family())},
              {"seed", c.seed}};
}

inline EstimatorParams fixed_params(const RunConfig& c, std::size_t n) {
  const ExponentPlan plan = plan_sequences(c.alpha, c.a, c.b);
  EstimatorParams p = plan.params_for(n, c.kernel);
  if (c.k) p.k = *c.k;
  if (c.h) p.h = *c.h;
  p.validate();
  return p;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

inline std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string run(const RunConfig& c) {
  const ExponentPlan plan = plan_sequences(c.alpha, c.a, c.b);
  const bool json = c.format == Format::json;
  std::ostringstream summary;
  summary << command_name(c.command) << ": ";

  switch (c.command) {
  case Command::plan: {
    if (json) {
      Json j = header(c);
      j["plan"] = to_json(plan);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_plan_csv(os, plan); });
    }
    summary << "alpha=" << plan.alpha << " a=" << plan.a << " b=" << plan.b
            << " valid=" << (plan.valid ? "true" : "false");
    break;
  }
  case Command::sample: {
    const SampleSet s = c.process == Process::uniform
                            ? sample_uniform(c.frontier, *c.n, c.seed)
                            : sample_poisson_process(c.frontier, *c.n, c.seed);
    if (json) {
      Json j = header(c);
      j["process"] = c.process == Process::uniform ? "uniform" : "poisson";
      j["n"] = *c.n;
      Json pts = Json::array();
      for (const Point& p : s.points) pts.push_back(Json::array({p.x, p.y}));
      j["points"] = std::move(pts);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_points_csv(os, s.points); });
    }
    summary << "points=" << s.points.size();
    break;
  }
  case Command::estimate: {
    const EstimatorParams p = fixed_params(c, *c.n);
    const SampleSet s = sample_uniform(c.frontier, p.n, c.seed);
    const StripMaxima m = strip_maxima(s.view(), p.k);
    std::vector<double> xs;
    if (c.grid == 0) {
      xs.push_back(c.x);
    } else {
      const double margin = p.kernel.support_radius() * p.h + 1.0 / static_cast<double>(p.k);
      if (!(margin < 0.5))
        throw ParameterError("estimate: bandwidth too large for an interior grid");
      for (std::size_t i = 0; i < c.grid; ++i)
        xs.push_back(c.grid == 1 ? 0.5
                                 : margin + (1.0 - 2.0 * margin) * static_cast<double>(i) /
                                                static_cast<double>(c.grid - 1));
    }
    std::vector<double> est, truth;
    for (double x : xs) {
      est.push_back(estimate(p, m, x));
      truth.push_back(x >= 0.0 && x <= 1.0 ? c.frontier(x) : 0.0);
    }
    if (json) {
      Json j = header(c);
      j["n"] = p.n;
      j["k"] = p.k;
      j["h"] = p.h;
      j["empty_strips"] = m.empty_strips.size();
      Json ev = Json::array();
      for (std::size_t i = 0; i < xs.size(); ++i)
        ev.push_back(Json{{"x", xs[i]}, {"estimate", est[i]}, {"truth", truth[i]}});
      j["evaluations"] = std::move(ev);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) {
        os << "x,estimate,truth\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
          os << format_double(xs[i]) << ',' << format_double(est[i]) << ','
             << format_double(truth[i]) << '\n';
      });
    }
    summary << "n=" << p.n << " k=" << p.k << " h=" << short_num(p.h)
            << " estimate(" << short_num(xs.front()) << ")=" << short_num(est.front());
    break;
  }
  case Command::clt: {
    const CltReport r = run_clt(c.frontier, c.kernel, plan, c.n_grid,
                                c.replicates, c.x, c.seed, c.threads);
    if (json) {
      Json j = header(c);
      j["report"] = to_json(r);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_clt_errors_csv(os, r); });
      write_csv(sibling_path(c.out, "_summary"),
                [&](std::ostream& os) { write_clt_summary_csv(os, r); });
    }
    std::vector<std::string> ks;
    for (const auto& p : r.per_n) ks.push_back(short_num(p.ks_distance));
    summary << "n=" << join(c.n_grid) << " ks=" << join(ks)
            << " sigma=" << short_num(r.sigma_theory);
    break;
  }
  case Command::sandwich: {
    const EstimatorParams p = fixed_params(c, *c.n);
    const SandwichReport r = run_sandwich(c.frontier, p, c.gamma, c.replicates,
                                          c.x, c.seed, c.threads);
    if (json) {
      Json j = header(c);
      j["report"] = to_json(r);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_sandwich_csv(os, r); });
    }
    summary << "n=" << r.n << " gamma=" << r.gamma
            << " ordering_violations=" << r.ordering_violations
            << " p_en_fail=" << short_num(r.p_en_fail_hat)
            << " bound=" << short_num(r.lemma2_bound);
    break;
  }
  case Command::gap_rate: {
    const RateReport r = run_gap_rate(c.frontier, c.kernel, plan, c.gamma_policy,
                                      c.n_grid, c.replicates, c.seed, c.x,
                                      c.threads);
    if (json) {
      Json j = header(c);
      j["report"] = to_json(r);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_rate_csv(os, r); });
    }
    std::vector<std::string> ratios;
    for (const auto& p : r.per_n) ratios.push_back(short_num(p.ratio));
    summary << "n=" << join(c.n_grid) << " ratio=" << join(ratios);
    if (r.wide_variance) summary << " (few replicates: wide variance)";
    break;
  }
  case Command::weight_sum: {
    const auto pts = run_weight_sum(c.kernel, plan, c.n_grid, c.x);
    if (json) {
      Json j = header(c);
      j["x"] = c.x;
      j["plan"] = to_json(plan);
      j["weight_sums"] = to_json(pts);
      write_json(c.out, j);
    } else {
      write_csv(c.out, [&](std::ostream& os) { write_weight_sum_csv(os, pts); });
    }
    std::vector<std::string> sums;
    for (const auto& p : pts) sums.push_back(short_num(p.weight_sum));
    summary << "n=" << join(c.n_grid) << " weight_sum=" << join(sums);
    break;
  }
  }
  summary << " -> " << c.out;
  return summary.str();
}

} // namespace detail

/// Runs the configured command, writing data files and a one-line summary.
/// Returns 0 on success, 2 on invalid parameters, 1 on runtime failure.
inline int execute(const RunConfig& config, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  if (config.help) {
    out << config.help_text;
    return 0;
  }
  try {
    out << detail::run(config) << '\n';
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

/// parse_config + execute with the exit-status convention.
inline int main_entry(const std::vector<std::string>& args,
                      std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  return execute(cfg, out, err);
}

} // namespace fkde::cli
