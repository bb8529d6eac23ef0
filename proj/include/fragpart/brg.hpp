#pragma once

#include <cstdint>
#include <vector>

#include "fragpart/exact.hpp"
#include "fragpart/partition.hpp"
#include "fragpart/rng.hpp"
#include "fragpart/stats.hpp"
#include "fragpart/weight.hpp"

namespace fragpart {

/// b(a0, M) = P(a0, M) / P(a0) for M = 1..a0.
class BiasFunction {
 public:
  /// Throws PreconditionError if the table does not cover a0.
  BiasFunction(const CountTable& table, int a0);

  int a0() const noexcept { return a0_; }
  double operator()(int m) const noexcept {
    return m >= 1 && m <= a0_ ? probabilities_[static_cast<std::size_t>(m)] : 0.0;
  }
  Distribution distribution() const;

  /// Inverse-CDF draw of M.
  int sample(Rng& rng) const;

 private:
  int a0_;
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

inline BiasFunction bias_function(const CountTable& table, int a0) { return {table, a0}; }

/// Uniform sampler over partitions of a0: M from the bias function, then a
/// uniform partition with exactly M parts by unranking the P(n, m) recursion.
///
/// Counts are copied out of the table; when they fit in 64 bits the
/// unranking is exact integer arithmetic, otherwise it branches on
/// log-space count ratios.
class BrgSampler {
 public:
  BrgSampler(const CountTable& table, int a0);

  int a0() const noexcept { return a0_; }
  const BiasFunction& bias() const noexcept { return bias_; }
  bool exact_integers() const noexcept { return !counts_.empty(); }

  /// Throws PreconditionError unless 1 <= m <= a0.
  Partition sample_fixed_multiplicity(int m, Rng& rng) const;
  Partition sample(Rng& rng) const;

 private:
  std::uint64_t count(int n, int m) const noexcept;
  double log_count(int n, int m) const noexcept;

  int a0_;
  BiasFunction bias_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> log_counts_;
};

Partition sample_fixed_multiplicity(int a0, int m, const CountTable& table, Rng& rng);
Partition sample_brg(int a0, const CountTable& table, Rng& rng);

/// Accumulates `samples` uniform BRG draws.
SummaryStatistics run_brg(int a0, const CountTable& table, std::uint64_t seed,
                          std::uint64_t samples,
                          const std::vector<Selector>& selectors = default_selectors());

/// BRG with weights applied only within each fixed-M class: M keeps its
/// uniform bias-function frequency and each class is reweighted by W_f.
/// This does not reproduce the weighted ensemble for non-uniform models;
/// it exists to show that.
SummaryStatistics run_brg_reweighted(int a0, const CountTable& table, const WeightModel& model,
                                     std::uint64_t seed, std::uint64_t samples,
                                     const std::vector<Selector>& selectors = default_selectors());

}  // namespace fragpart
