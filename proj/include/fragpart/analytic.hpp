#pragma once

#include <vector>

#include "fragpart/stats.hpp"

namespace fragpart {

/// Generating-function family: equal weights give geometric species
/// counts, factorial weights 1/N_A! give Poisson counts.
enum class WeightKind { EqualWeights, FactorialWeights };

/// Constant of the closed-form equal-weight <M> asymptotic.
inline constexpr double kMultiplicityConstant = 0.315087;

/// Relative tail tolerance at which the infinite series are cut.
inline constexpr double kSeriesTolerance = 1e-12;

struct AnalyticPrediction {
  int a0 = 0;
  WeightKind kind = WeightKind::EqualWeights;
  double fugacity = 0.0;
  /// Index A in [0, series_cutoff]; index 0 unused.
  std::vector<double> mean_species;
  double mean_multiplicity_sum = 0.0;
  double mean_multiplicity_closed_form = 0.0;
  int series_cutoff = 0;
};

/// sum_A A <N_A>(x) for the given family, and the index where the series was cut.
struct SeriesValue {
  double value = 0.0;
  int cutoff = 0;
};
SeriesValue mass_series(double x, WeightKind kind, double tolerance);

/// Root x in (0,1) of the mean-mass constraint sum_A A <N_A>(x) = a0, by
/// bisection. Throws DomainError for a0 < 2.
double solve_fugacity(int a0, WeightKind kind);

/// exp(-pi / sqrt(6 a0) + 1 / (4 a0)), the large-a0 equal-weight root.
double fugacity_approximation(int a0);

/// exp(-1 / sqrt(a0)), the large-a0 factorial-weight root.
double factorial_fugacity_approximation(int a0);

/// <N_A> for A = 1..a_cut (index 0 unused): x^A / (1 - x^A) or x^A.
/// Throws DomainError unless 0 < x < 1 and a_cut >= 1.
std::vector<double> mean_species_multiplicities(double x, WeightKind kind, int a_cut);

struct TotalMultiplicity {
  /// (1/pi) sqrt(3 a0 / 2) ln(6 a0 / (b pi^2)) or sqrt(a0).
  double closed_form = 0.0;
  /// sum_A <N_A> at the solved fugacity.
  double series_sum = 0.0;
};
TotalMultiplicity mean_total_multiplicity(int a0, WeightKind kind);

/// Geometric (equal) or Poisson (factorial) distribution of N_A with the
/// given mean, cut once the cumulative mass passes 1 - 1e-12. Throws
/// DomainError for mean <= 0.
Distribution species_distribution(double mean, WeightKind kind);

/// Distribution of the number of fragments matched by `selector`, treating
/// species A = 1..a_cut as independent; support capped at max_n.
Distribution occupation_distribution(double x, WeightKind kind, const Selector& selector,
                                     int a_cut, int max_n);

/// Full prediction at the solved fugacity.
AnalyticPrediction predict(int a0, WeightKind kind);

}  // namespace fragpart
