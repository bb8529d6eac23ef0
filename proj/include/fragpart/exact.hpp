#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "fragpart/partition.hpp"
#include "fragpart/stats.hpp"
#include "fragpart/weight.hpp"

namespace fragpart {

/// P(n) and P(n, m) for n <= a0_max.
///
/// Exact integers are kept for n <= exact_limit; natural-log values are kept
/// for every n. Both follow P(n,m) = P(n-m,m) + P(n-1,m-1), P(0,0) = 1.
class CountTable {
 public:
  static constexpr int kDefaultExactLimit = 400;

  explicit CountTable(int a0_max, int exact_limit = kDefaultExactLimit);

  int a0_max() const noexcept { return a0_max_; }
  int exact_limit() const noexcept { return exact_limit_; }
  bool covers(int n) const noexcept { return n >= 0 && n <= a0_max_; }
  bool is_exact(int n) const noexcept { return n >= 0 && n <= exact_limit_; }

  /// Throws PreconditionError outside the exact range.
  const mpz_class& count(int n) const;
  const mpz_class& count(int n, int m) const;

  /// -inf where the count is zero.
  double log_count(int n) const;
  double log_count(int n, int m) const;

 private:
  static std::size_t index(int n, int m) noexcept {
    return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) / 2 +
           static_cast<std::size_t>(m);
  }
  void check(int n, int m) const;

  int a0_max_;
  int exact_limit_;
  std::vector<mpz_class> exact_total_;
  std::vector<mpz_class> exact_by_m_;
  std::vector<double> log_total_;
  std::vector<double> log_by_m_;
};

/// Leading Hardy-Ramanujan term exp(pi sqrt(2 a0 / 3)) / (4 sqrt(3) a0).
double hardy_ramanujan(int a0);

struct EnumerationOptions {
  /// Largest P(a0) enumerated without `force`.
  double max_partitions = 2e9;
  bool force = false;
};

/// Throws ResourceError when P(a0) exceeds the guard and force is unset.
void check_enumeration_guard(int a0, const EnumerationOptions& options);

/// Visits every partition of a0 whose largest part equals `largest`, in
/// reverse-lexicographic order, and returns how many were visited. The
/// Partition passed to the visitor is reused between calls.
template <class Visitor>
std::uint64_t for_each_partition_with_largest(int a0, int largest, Visitor&& visit) {
  using detail::PartitionAccess;
  Partition p = PartitionAccess::make_empty(a0);
  auto& x = PartitionAccess::parts(p);
  auto& c = PartitionAccess::counts(p);
  x.reserve(static_cast<std::size_t>(a0));
  const int k = largest;
  const int q = a0 / k;
  const int rem = a0 % k;
  x.assign(static_cast<std::size_t>(q), k);
  c[static_cast<std::size_t>(k)] = q;
  if (rem > 0) {
    x.push_back(rem);
    ++c[static_cast<std::size_t>(rem)];
  }
  // h indexes the last part > 1; everything after it is a 1.
  int h = static_cast<int>(x.size()) - 1;
  while (h >= 0 && x[static_cast<std::size_t>(h)] == 1) --h;

  std::uint64_t visited = 0;
  for (;;) {
    visit(static_cast<const Partition&>(p));
    ++visited;
    // A successor step at index 0 would lower the largest part.
    if (h <= 0) break;
    auto hx = static_cast<std::size_t>(h);
    if (x[hx] == 2) {
      x[hx] = 1;
      x.push_back(1);
      --c[2];
      c[1] += 2;
      --h;
    } else {
      const int r = x[hx] - 1;
      const int ones = static_cast<int>(x.size()) - 1 - h;
      int t = ones + 1;
      --c[static_cast<std::size_t>(x[hx])];
      c[1] -= ones;
      x.resize(hx);
      x.push_back(r);
      ++c[static_cast<std::size_t>(r)];
      while (t >= r) {
        x.push_back(r);
        ++c[static_cast<std::size_t>(r)];
        t -= r;
      }
      if (t > 1) {
        x.push_back(t);
        ++c[static_cast<std::size_t>(t)];
      }
      h = static_cast<int>(x.size()) - 1;
      if (t == 1) {
        x.push_back(1);
        ++c[1];
      }
    }
  }
  return visited;
}

/// Visits every partition of a0 exactly once in reverse-lexicographic order.
template <class Visitor>
std::uint64_t for_each_partition(int a0, Visitor&& visit) {
  std::uint64_t visited = 0;
  for (int k = a0; k >= 1; --k) visited += for_each_partition_with_largest(a0, k, visit);
  return visited;
}

/// Guarded enumeration; returns the number of partitions visited (= P(a0)).
template <class Visitor>
std::uint64_t enumerate_partitions(int a0, Visitor&& visit, const EnumerationOptions& options = {}) {
  check_enumeration_guard(a0, options);
  return for_each_partition(a0, visit);
}

/// Weighted statistics over all partitions of a0, the ground truth for every sampler.
struct ExactSummary {
  int a0 = 0;
  double mean_multiplicity = 0.0;
  /// Index A in [0, a0]; index 0 unused.
  std::vector<double> mean_species;
  Distribution m_distribution;
  std::vector<Selector> selectors;
  std::vector<Distribution> species_distributions;
  mpz_class partition_count;
  /// ln sum_f W_f.
  double total_log_weight = 0.0;
};

/// Parallel over the largest part; each range accumulates privately and the
/// ranges are merged in a fixed order, so results do not depend on the thread count.
ExactSummary exact_statistics(int a0, const WeightModel& model,
                              const std::vector<Selector>& selectors = default_selectors(),
                              const EnumerationOptions& options = {});

/// Single-threaded reference for exact_statistics.
ExactSummary exact_statistics_serial(int a0, const WeightModel& model,
                                     const std::vector<Selector>& selectors = default_selectors(),
                                     const EnumerationOptions& options = {});

/// Uniform-weight <M> = sum_M M P(a0,M) / P(a0) without enumeration.
double exact_mean_multiplicity_from_counts(int a0, const CountTable& table);

struct FactorialSum {
  double log_total_weight = 0.0;
  double mean_multiplicity = 0.0;
};

/// sum_f 1/prod_A N_A! and the weighted <M>, by dynamic programming over
/// (largest allowed part, remaining mass).
FactorialSum factorial_partition_sum(int a0);

/// M distribution under factorial weights, from the same recursion.
Distribution factorial_multiplicity_distribution(int a0);

}  // namespace fragpart
