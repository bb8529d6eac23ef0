#include "fragpart/analytic.hpp"

#include <cmath>
#include <numbers>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {

constexpr int kMaxSeriesTerms = 100'000'000;

void require_open_unit(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("fugacity must lie in (0, 1)");
}

double species_mean(double xa, WeightKind kind) {
  return kind == WeightKind::EqualWeights ? xa / (1.0 - xa) : xa;
}

/// Root of increasing f on (0, 1) to full double resolution.
template <class F>
double bisect_unit_interval(F f) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SeriesValue mass_series(double x, WeightKind kind, double tolerance) {
  require_open_unit(x);
  SeriesValue s;
  double xa = 1.0;
  for (int a = 1; a <= kMaxSeriesTerms; ++a) {
    xa *= x;
    const double term = a * species_mean(xa, kind);
    s.value += term;
    // Successive terms shrink at least by x (a + 1) / a.
    const double ratio = x * (a + 1.0) / a;
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < tolerance) {
      s.cutoff = a;
      return s;
    }
  }
  s.cutoff = kMaxSeriesTerms;
  return s;
}

double solve_fugacity(int a0, WeightKind kind) {
  if (a0 < 2) throw DomainError("fugacity equation is degenerate for a0 < 2");
  const double target = a0;
  if (kind == WeightKind::FactorialWeights)
    return bisect_unit_interval([&](double x) { return x / ((1.0 - x) * (1.0 - x)) - target; });
  const double tol = kSeriesTolerance * target;
  return bisect_unit_interval([&](double x) { return mass_series(x, kind, tol).value - target; });
}

double fugacity_approximation(int a0) {
  if (a0 < 2) throw DomainError("fugacity approximation needs a0 >= 2");
  const double n = a0;
  return std::exp(-std::numbers::pi / std::sqrt(6.0 * n) + 1.0 / (4.0 * n));
}

double factorial_fugacity_approximation(int a0) {
  if (a0 < 2) throw DomainError("fugacity approximation needs a0 >= 2");
  return std::exp(-1.0 / std::sqrt(static_cast<double>(a0)));
}

std::vector<double> mean_species_multiplicities(double x, WeightKind kind, int a_cut) {
  require_open_unit(x);
  if (a_cut < 1) throw DomainError("a_cut must be >= 1");
  std::vector<double> mean(static_cast<std::size_t>(a_cut) + 1, 0.0);
  double xa = 1.0;
  for (int a = 1; a <= a_cut; ++a) {
    xa *= x;
    mean[static_cast<std::size_t>(a)] = species_mean(xa, kind);
  }
  return mean;
}

TotalMultiplicity mean_total_multiplicity(int a0, WeightKind kind) {
  const AnalyticPrediction p = predict(a0, kind);
  return {p.mean_multiplicity_closed_form, p.mean_multiplicity_sum};
}

Distribution species_distribution(double mean, WeightKind kind) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw DomainError("species distribution needs a positive mean");
  Distribution d;
  double cumulative = 0.0;
  if (kind == WeightKind::EqualWeights) {
    const double q = mean / (1.0 + mean);
    double p = 1.0 / (1.0 + mean);
    for (int n = 0;; ++n) {
      d[n] = p;
      cumulative += p;
      // Also require a negligible second-moment tail so mean and variance
      // identities hold on the truncated support.
      if (cumulative > 1.0 - 1e-12 && double(n) * n * p < 1e-14 * (1.0 - q)) break;
      p *= q;
    }
  } else {
    const double log_mean = std::log(mean);
    for (int n = 0;; ++n) {
      const double p = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
      d[n] = p;
      cumulative += p;
      if (n > mean && cumulative > 1.0 - 1e-12 && double(n) * n * p < 1e-14 * (1.0 - mean / (n + 1.0)))
        break;
    }
  }
  return d;
}

Distribution occupation_distribution(double x, WeightKind kind, const Selector& selector, int a_cut,
                                     int max_n) {
  require_open_unit(x);
  if (max_n < 0) throw DomainError("max_n must be >= 0");
  const auto len = static_cast<std::size_t>(max_n) + 1;
  std::vector<double> dist(len, 0.0);
  dist[0] = 1.0;

  if (kind == WeightKind::FactorialWeights) {
    // A sum of independent Poisson counts is Poisson.
    double lambda = 0.0, xa = 1.0;
    for (int a = 1; a <= a_cut; ++a) {
      xa *= x;
      if (selector.matches(a)) lambda += xa;
    }
    if (lambda > 0.0) {
      const double log_lambda = std::log(lambda);
      for (std::size_t n = 0; n < len; ++n)
        dist[n] = std::exp(-lambda + static_cast<double>(n) * log_lambda - std::lgamma(n + 1.0));
    }
  } else {
    std::vector<double> next(len);
    double xa = 1.0;
    for (int a = 1; a <= a_cut; ++a) {
      xa *= x;
      if (!selector.matches(a)) continue;
      // Convolve with the geometric law (1 - q) q^k of this species.
      const double q = xa;
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t n = 0; n < len; ++n) {
        if (dist[n] == 0.0) continue;
        double pk = (1.0 - q) * dist[n];
        for (std::size_t k = n; k < len && pk > 1e-300; ++k) {
          next[k] += pk;
          pk *= q;
        }
      }
      dist.swap(next);
    }
  }

  double total = 0.0;
  for (double v : dist) total += v;
  Distribution d;
  for (std::size_t n = 0; n < len; ++n)
    if (n == 0 || dist[n] > 0.0) d[static_cast<int>(n)] = dist[n] / total;
  return d;
}

AnalyticPrediction predict(int a0, WeightKind kind) {
  AnalyticPrediction p;
  p.a0 = a0;
  p.kind = kind;
  p.fugacity = solve_fugacity(a0, kind);
  p.series_cutoff = mass_series(p.fugacity, kind, kSeriesTolerance * a0).cutoff;
  p.mean_species = mean_species_multiplicities(p.fugacity, kind, p.series_cutoff);
  for (std::size_t a = 1; a < p.mean_species.size(); ++a) p.mean_multiplicity_sum += p.mean_species[a];
  const double n = a0;
  if (kind == WeightKind::EqualWeights) {
    p.mean_multiplicity_closed_form =
        std::sqrt(1.5 * n) / std::numbers::pi *
        std::log(6.0 * n / (kMultiplicityConstant * std::numbers::pi * std::numbers::pi));
  } else {
    p.mean_multiplicity_closed_form = std::sqrt(n);
  }
  return p;
}

}  // namespace fragpart
