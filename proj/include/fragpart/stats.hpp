#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fragpart/partition.hpp"

namespace fragpart {

/// Probability (or weight) keyed by an integer observable.
using Distribution = std::map<int, double>;

/// Which fragments a species histogram counts: exactly size A, or every size >= A.
struct Selector {
  enum class Mode { ExactSize, AtLeast };
  Mode mode = Mode::ExactSize;
  int size = 1;

  static Selector exact(int size) { return {Mode::ExactSize, size}; }
  static Selector at_least(int size) { return {Mode::AtLeast, size}; }

  /// Number of fragments of p matched by this selector.
  int occupation(const Partition& p) const;
  bool matches(int fragment_size) const noexcept {
    return mode == Mode::ExactSize ? fragment_size == size : fragment_size >= size;
  }

  /// "A=4" or "A>=10".
  std::string label() const;
  /// Accepts "4", "A=4", ">=10", "A>=10".
  static Selector parse(std::string_view text);

  friend bool operator==(const Selector&, const Selector&) = default;
};

/// A=1, A=4 and A>=10.
std::vector<Selector> default_selectors();

/// Mergeable weighted accumulator of partition observables.
///
/// Samplers feed unit weights (log weight 0); exact enumeration feeds ln W_f.
/// Sums are held relative to a running maximum log weight, so very small or
/// very large weights never overflow and both modes share one type.
class SummaryStatistics {
 public:
  SummaryStatistics(int a0, std::vector<Selector> selectors = default_selectors());

  /// Adds p with weight exp(log_weight). Throws PreconditionError if p's
  /// mass differs from a0.
  void accumulate(const Partition& p, double log_weight = 0.0);

  /// Combines another accumulator over the same a0 and selectors.
  void merge(const SummaryStatistics& other);

  int a0() const noexcept { return a0_; }
  const std::vector<Selector>& selectors() const noexcept { return selectors_; }
  std::uint64_t sample_count() const noexcept { return samples_; }
  /// ln of the summed weights; -inf when empty.
  double log_total_weight() const;

  /// Weighted mean of N_A for A in [1, a0]; index 0 is unused.
  std::vector<double> mean_species() const;
  double mean_multiplicity() const;
  /// Normalized weight of each observed M.
  Distribution m_distribution() const;
  /// Normalized N-histogram of selector `index`; always contains the N = 0 bin.
  Distribution species_distribution(std::size_t index) const;

 private:
  void rescale(double new_log_scale);

  int a0_;
  std::vector<Selector> selectors_;
  std::uint64_t samples_ = 0;
  double log_scale_;
  double weight_sum_ = 0.0;
  std::vector<double> species_sum_;
  std::vector<double> m_hist_;
  std::vector<std::vector<double>> selector_hist_;
};

/// Half the L1 distance over the union of supports. Throws PreconditionError
/// unless both inputs sum to 1 within 1e-6.
double total_variation(const Distribution& d1, const Distribution& d2);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  /// Upper-tail probability of the statistic.
  double p_value = 1.0;
};

/// Pearson goodness of fit of `observed` counts (n draws) against `expected`
/// probabilities. Bins with expected count below 5 are pooled. Throws
/// PreconditionError when fewer than two bins remain after pooling.
ChiSquareResult chi_square_uniformity(const std::map<int, std::uint64_t>& observed,
                                      const Distribution& expected, std::uint64_t n);

/// Log-sum-exp of two terms, tolerating -inf.
double log_add(double a, double b) noexcept;

}  // namespace fragpart
