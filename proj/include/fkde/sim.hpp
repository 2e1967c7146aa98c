#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "fkde/error.hpp"
#include "fkde/format.hpp"
#include "fkde/frontier.hpp"
#include "fkde/rng.hpp"

namespace fkde {

struct Point {
  double x;
  double y;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class Provenance { sample_n, poisson, sandwich_lower, sandwich_upper };

inline std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::sample_n: return "sample_n";
  case Provenance::poisson: return "poisson";
  case Provenance::sandwich_lower: return "sandwich_lower";
  case Provenance::sandwich_upper: return "sandwich_upper";
  }
  return "unknown";
}

/// Non-owning view of a point set; the sandwich sets are views into one stream.
struct SampleView {
  std::span<const Point> points;
  Provenance provenance;
  std::size_t n_nominal;
};

struct SampleSet {
  std::vector<Point> points;
  Provenance provenance = Provenance::sample_n;
  std::size_t n_nominal = 0;

  SampleView view() const { return {points, provenance, n_nominal}; }
  operator SampleView() const { return view(); }
};

/// Coupled point sets built from one i.i.d. uniform-on-D stream Z_1, Z_2, ...
///
/// sigma1 = Z_1..Z_N1, sigma0 = Z_1..Z_N0, sigma2 = Z_1..Z_N2 with
/// N0 = N1 + M1 and N2 = N0 + M2, and sigma_n = Z_1..Z_n. The sample is
/// bracketed (event E_n) iff N1 <= n <= N2.
struct SandwichTriple {
  std::int64_t n1 = 0;
  std::int64_t n0 = 0;
  std::int64_t n2 = 0;
  std::size_t n = 0;
  double gamma = 0.0;
  bool e_n_holds = false;
  std::vector<Point> stream; // length max(N2, n)

  SampleView sigma1() const { return prefix(n1, Provenance::sandwich_lower); }
  SampleView sigma0() const { return prefix(n0, Provenance::poisson); }
  SampleView sigma2() const { return prefix(n2, Provenance::sandwich_upper); }
  SampleView sigma_n() const {
    return prefix(static_cast<std::int64_t>(n), Provenance::sample_n);
  }

private:
  SampleView prefix(std::int64_t len, Provenance p) const {
    return {std::span<const Point>(stream.data(), static_cast<std::size_t>(len)),
            p, n};
  }
};

namespace detail {

// Rejection from the box [0,1] x [0, max_height].
inline Point draw_uniform_on_region(const Frontier& f, Rng& rng) {
  const double top = f.max_height();
  for (;;) {
    const double x = rng.uniform();
    const double y = rng.uniform() * top;
    if (y <= f(x)) return {x, y};
  }
}

inline void fill_uniform(const Frontier& f, std::size_t count, Rng& rng,
                         std::vector<Point>& out) {
  out.reserve(out.size() + count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(draw_uniform_on_region(f, rng));
}

} // namespace detail

inline SampleSet sample_uniform(const Frontier& f, std::size_t n,
                                std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_uniform: n must be >= 1");
  Rng rng(seed);
  SampleSet s{{}, Provenance::sample_n, n};
  detail::fill_uniform(f, n, rng, s.points);
  return s;
}

/// Homogeneous Poisson process on D with mean measure n * c * Lebesgue,
/// i.e. a Poisson(n) number of i.i.d. uniform points.
inline SampleSet sample_poisson_process(const Frontier& f, std::size_t n,
                                        std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_poisson_process: n must be >= 1");
  Rng rng(seed);
  // total mass n * c * area(D) = n
  const auto count =
      static_cast<std::size_t>(poisson_draw(static_cast<double>(n), rng));
  SampleSet s{{}, Provenance::poisson, n};
  detail::fill_uniform(f, count, rng, s.points);
  return s;
}

inline SandwichTriple sample_sandwich(const Frontier& f, std::size_t n,
                                      double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw DomainError("sample_sandwich: gamma must be in (0,1)");
  if (n == 0) throw DomainError("sample_sandwich: n must be >= 1");
  Rng rng(seed);
  const double nd = static_cast<double>(n);
  SandwichTriple t;
  t.n = n;
  t.gamma = gamma;
  t.n1 = poisson_draw(nd * (1.0 - gamma), rng);
  const std::int64_t m1 = poisson_draw(nd * gamma, rng);
  const std::int64_t m2 = poisson_draw(nd * gamma, rng);
  t.n0 = t.n1 + m1;
  t.n2 = t.n0 + m2;
  const auto ni = static_cast<std::int64_t>(n);
  t.e_n_holds = t.n1 <= ni && ni <= t.n2;
  detail::fill_uniform(f, static_cast<std::size_t>(std::max(t.n2, ni)), rng,
                       t.stream);
  return t;
}

/// CSV with header "x,y", one row per point, 17 significant digits.
inline void write_points_csv(std::ostream& os, std::span<const Point> points) {
  os << "x,y\n";
  for (const Point& p : points)
    os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

} // namespace fkde
