#include "fragpart/brg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t tri(int n, int m) {
  return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) / 2 + static_cast<std::size_t>(m);
}

}  // namespace

BiasFunction::BiasFunction(const CountTable& table, int a0) : a0_(a0) {
  if (a0 < 1 || !table.covers(a0))
    throw PreconditionError("count table does not cover a0 = " + std::to_string(a0));
  probabilities_.assign(static_cast<std::size_t>(a0) + 1, 0.0);
  cdf_.assign(static_cast<std::size_t>(a0) + 1, 0.0);
  for (int m = 1; m <= a0; ++m) {
    double b;
    if (table.is_exact(a0)) {
      b = mpq_class(table.count(a0, m), table.count(a0)).get_d();
    } else {
      b = std::exp(table.log_count(a0, m) - table.log_count(a0));
    }
    probabilities_[static_cast<std::size_t>(m)] = b;
    cdf_[static_cast<std::size_t>(m)] = cdf_[static_cast<std::size_t>(m - 1)] + b;
  }
  cdf_.back() = 1.0;
}

Distribution BiasFunction::distribution() const {
  Distribution d;
  for (int m = 1; m <= a0_; ++m) d[m] = probabilities_[static_cast<std::size_t>(m)];
  return d;
}

int BiasFunction::sample(Rng& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<int>(it - cdf_.begin());
}

BrgSampler::BrgSampler(const CountTable& table, int a0) : a0_(a0), bias_(table, a0) {
  if (table.is_exact(a0) && table.count(a0).fits_ulong_p()) {
    counts_.resize(tri(a0, a0) + 1);
    for (int n = 0; n <= a0; ++n)
      for (int m = 0; m <= n; ++m) counts_[tri(n, m)] = table.count(n, m).get_ui();
  } else {
    log_counts_.resize(tri(a0, a0) + 1);
    for (int n = 0; n <= a0; ++n)
      for (int m = 0; m <= n; ++m) log_counts_[tri(n, m)] = table.log_count(n, m);
  }
}

std::uint64_t BrgSampler::count(int n, int m) const noexcept {
  if (m < 0 || m > n) return 0;
  return counts_[tri(n, m)];
}

double BrgSampler::log_count(int n, int m) const noexcept {
  if (m < 0 || m > n) return kNegInf;
  return log_counts_[tri(n, m)];
}

Partition BrgSampler::sample_fixed_multiplicity(int m, Rng& rng) const {
  if (m < 1 || m > a0_)
    throw PreconditionError("no partition of " + std::to_string(a0_) + " has " + std::to_string(m) + " parts");
  // Walk the recursion P(n,k) = P(n-1,k-1) + P(n-k,k): either the smallest
  // remaining part is 1 (emit it, shifted by the number of times every
  // remaining part was reduced), or reduce every remaining part by one.
  std::vector<int> parts;
  parts.reserve(static_cast<std::size_t>(m));
  int n = a0_, k = m, offset = 0;
  if (exact_integers()) {
    std::uint64_t rank = rng.below(count(n, k));
    while (k > 0) {
      const std::uint64_t with_one = count(n - 1, k - 1);
      if (rank < with_one) {
        parts.push_back(1 + offset);
        --n;
        --k;
      } else {
        rank -= with_one;
        n -= k;
        ++offset;
      }
    }
  } else {
    while (k > 0) {
      const double p_one = std::exp(log_count(n - 1, k - 1) - log_count(n, k));
      if (rng.uniform01() < p_one) {
        parts.push_back(1 + offset);
        --n;
        --k;
      } else {
        n -= k;
        ++offset;
      }
    }
  }
  std::reverse(parts.begin(), parts.end());
  return Partition::from_parts(parts);
}

Partition BrgSampler::sample(Rng& rng) const { return sample_fixed_multiplicity(bias_.sample(rng), rng); }

Partition sample_fixed_multiplicity(int a0, int m, const CountTable& table, Rng& rng) {
  return BrgSampler(table, a0).sample_fixed_multiplicity(m, rng);
}

Partition sample_brg(int a0, const CountTable& table, Rng& rng) { return BrgSampler(table, a0).sample(rng); }

SummaryStatistics run_brg(int a0, const CountTable& table, std::uint64_t seed, std::uint64_t samples,
                          const std::vector<Selector>& selectors) {
  const BrgSampler sampler(table, a0);
  Rng rng(seed);
  SummaryStatistics acc(a0, selectors);
  for (std::uint64_t s = 0; s < samples; ++s) acc.accumulate(sampler.sample(rng));
  return acc;
}

SummaryStatistics run_brg_reweighted(int a0, const CountTable& table, const WeightModel& model,
                                     std::uint64_t seed, std::uint64_t samples,
                                     const std::vector<Selector>& selectors) {
  const BrgSampler sampler(table, a0);
  Rng rng(seed);
  std::vector<Partition> drawn;
  std::vector<double> log_w;
  drawn.reserve(samples);
  log_w.reserve(samples);
  std::vector<double> class_log_weight(static_cast<std::size_t>(a0) + 1, kNegInf);
  std::vector<std::uint64_t> class_size(static_cast<std::size_t>(a0) + 1, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    drawn.push_back(sampler.sample(rng));
    log_w.push_back(model.log_weight(drawn.back()));
    const auto m = static_cast<std::size_t>(drawn.back().multiplicity());
    class_log_weight[m] = log_add(class_log_weight[m], log_w.back());
    ++class_size[m];
  }
  // Within class M a draw carries W_f / sum_class W; the class keeps its
  // sampled frequency n_M / n.
  SummaryStatistics acc(a0, selectors);
  const double log_n = std::log(static_cast<double>(samples));
  for (std::size_t s = 0; s < drawn.size(); ++s) {
    const auto m = static_cast<std::size_t>(drawn[s].multiplicity());
    const double offset = log_w[s] - class_log_weight[m] + std::log(static_cast<double>(class_size[m])) - log_n;
    acc.accumulate(drawn[s], offset);
  }
  return acc;
}

}  // namespace fragpart
