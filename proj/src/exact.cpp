#include "fragpart/exact.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ExactSummary summarize(const SummaryStatistics& acc, int a0) {
  ExactSummary s;
  s.a0 = a0;
  s.mean_multiplicity = acc.mean_multiplicity();
  s.mean_species = acc.mean_species();
  s.m_distribution = acc.m_distribution();
  s.selectors = acc.selectors();
  for (std::size_t i = 0; i < s.selectors.size(); ++i)
    s.species_distributions.push_back(acc.species_distribution(i));
  s.partition_count = mpz_class(std::to_string(acc.sample_count()));
  s.total_log_weight = acc.log_total_weight();
  return s;
}

}  // namespace

CountTable::CountTable(int a0_max, int exact_limit)
    : a0_max_(a0_max), exact_limit_(std::min(std::max(exact_limit, 0), a0_max)) {
  if (a0_max < 1) throw PreconditionError("count table needs a0_max >= 1");

  log_by_m_.assign(index(a0_max_, a0_max_) + 1, kNegInf);
  log_total_.assign(static_cast<std::size_t>(a0_max_) + 1, kNegInf);
  log_by_m_[index(0, 0)] = 0.0;
  log_total_[0] = 0.0;
  for (int n = 1; n <= a0_max_; ++n) {
    double total = kNegInf;
    for (int m = 1; m <= n; ++m) {
      const double split = m <= n - m ? log_by_m_[index(n - m, m)] : kNegInf;
      const double v = log_add(split, log_by_m_[index(n - 1, m - 1)]);
      log_by_m_[index(n, m)] = v;
      total = log_add(total, v);
    }
    log_total_[static_cast<std::size_t>(n)] = total;
  }

  exact_by_m_.assign(index(exact_limit_, exact_limit_) + 1, mpz_class(0));
  exact_total_.assign(static_cast<std::size_t>(exact_limit_) + 1, mpz_class(0));
  exact_by_m_[index(0, 0)] = 1;
  exact_total_[0] = 1;
  for (int n = 1; n <= exact_limit_; ++n) {
    mpz_class total = 0;
    for (int m = 1; m <= n; ++m) {
      mpz_class& v = exact_by_m_[index(n, m)];
      v = exact_by_m_[index(n - 1, m - 1)];
      if (m <= n - m) v += exact_by_m_[index(n - m, m)];
      total += v;
    }
    exact_total_[static_cast<std::size_t>(n)] = total;
  }
}

void CountTable::check(int n, int m) const {
  if (n < 0 || n > a0_max_)
    throw PreconditionError("count table covers n <= " + std::to_string(a0_max_) + ", asked for " +
                            std::to_string(n));
  (void)m;
}

const mpz_class& CountTable::count(int n) const {
  if (!is_exact(n))
    throw PreconditionError("exact count of P(" + std::to_string(n) + ") is beyond the exact limit " +
                            std::to_string(exact_limit_));
  return exact_total_[static_cast<std::size_t>(n)];
}

const mpz_class& CountTable::count(int n, int m) const {
  static const mpz_class zero = 0;
  if (!is_exact(n))
    throw PreconditionError("exact count of P(" + std::to_string(n) + ", m) is beyond the exact limit " +
                            std::to_string(exact_limit_));
  if (m < 0 || m > n) return zero;
  return exact_by_m_[index(n, m)];
}

double CountTable::log_count(int n) const {
  check(n, 0);
  return log_total_[static_cast<std::size_t>(n)];
}

double CountTable::log_count(int n, int m) const {
  check(n, m);
  if (m < 0 || m > n) return kNegInf;
  return log_by_m_[index(n, m)];
}

double hardy_ramanujan(int a0) {
  if (a0 < 1) throw DomainError("Hardy-Ramanujan estimate needs a0 >= 1");
  const double n = a0;
  return std::exp(std::numbers::pi * std::sqrt(2.0 * n / 3.0)) / (4.0 * std::sqrt(3.0) * n);
}

void check_enumeration_guard(int a0, const EnumerationOptions& options) {
  if (a0 < 1) throw PreconditionError("enumeration needs a0 >= 1");
  if (options.force) return;
  const CountTable table(a0, 0);
  if (table.log_count(a0) > std::log(options.max_partitions))
    throw ResourceError("P(" + std::to_string(a0) + ") ~ " +
                        std::to_string(std::exp(table.log_count(a0))) +
                        " partitions exceeds the enumeration guard of " +
                        std::to_string(options.max_partitions) + "; pass force to run anyway");
}

ExactSummary exact_statistics_serial(int a0, const WeightModel& model,
                                     const std::vector<Selector>& selectors,
                                     const EnumerationOptions& options) {
  check_enumeration_guard(a0, options);
  SummaryStatistics acc(a0, selectors);
  for_each_partition(a0, [&](const Partition& p) { acc.accumulate(p, model.log_weight(p)); });
  return summarize(acc, a0);
}

ExactSummary exact_statistics(int a0, const WeightModel& model, const std::vector<Selector>& selectors,
                              const EnumerationOptions& options) {
  check_enumeration_guard(a0, options);
  // partial[k - 1] holds the partitions whose largest part is k.
  std::vector<SummaryStatistics> partial(static_cast<std::size_t>(a0), SummaryStatistics(a0, selectors));
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 1; k <= a0; ++k) {
    auto& acc = partial[static_cast<std::size_t>(k - 1)];
    for_each_partition_with_largest(a0, k, [&](const Partition& p) { acc.accumulate(p, model.log_weight(p)); });
  }
  SummaryStatistics total(a0, selectors);
  for (int k = a0; k >= 1; --k) total.merge(partial[static_cast<std::size_t>(k - 1)]);
  return summarize(total, a0);
}

double exact_mean_multiplicity_from_counts(int a0, const CountTable& table) {
  if (!table.covers(a0) || a0 < 1) throw PreconditionError("count table does not cover a0");
  if (table.is_exact(a0)) {
    mpz_class moment = 0;
    for (int m = 1; m <= a0; ++m) moment += m * table.count(a0, m);
    return mpq_class(moment, table.count(a0)).get_d();
  }
  const double log_total = table.log_count(a0);
  double mean = 0.0;
  for (int m = 1; m <= a0; ++m) mean += m * std::exp(table.log_count(a0, m) - log_total);
  return mean;
}

FactorialSum factorial_partition_sum(int a0) {
  if (a0 < 1) throw PreconditionError("factorial_partition_sum needs a0 >= 1");
  // weight[n]: sum of W over partitions of n with parts <= k;
  // moment[n]: the same sum weighted by M. Updated in place for k = 1..a0.
  const auto size = static_cast<std::size_t>(a0) + 1;
  std::vector<double> weight(size, 0.0), moment(size, 0.0);
  weight[0] = 1.0;
  for (int k = 1; k <= a0; ++k) {
    for (int n = a0; n >= k; --n) {
      double w = weight[static_cast<std::size_t>(n)];
      double t = moment[static_cast<std::size_t>(n)];
      double inv_fact = 1.0;
      for (int j = 1; j * k <= n; ++j) {
        inv_fact /= j;
        const auto rest = static_cast<std::size_t>(n - j * k);
        w += inv_fact * weight[rest];
        t += inv_fact * (moment[rest] + j * weight[rest]);
      }
      weight[static_cast<std::size_t>(n)] = w;
      moment[static_cast<std::size_t>(n)] = t;
    }
  }
  const auto top = static_cast<std::size_t>(a0);
  return {std::log(weight[top]), moment[top] / weight[top]};
}

Distribution factorial_multiplicity_distribution(int a0) {
  if (a0 < 1) throw PreconditionError("factorial_multiplicity_distribution needs a0 >= 1");
  // Same recursion as above with M kept as a second index: w[n][m].
  const auto size = static_cast<std::size_t>(a0) + 1;
  std::vector<std::vector<double>> w(size, std::vector<double>(size, 0.0));
  w[0][0] = 1.0;
  for (int k = 1; k <= a0; ++k) {
    for (int n = a0; n >= k; --n) {
      auto& row = w[static_cast<std::size_t>(n)];
      double inv_fact = 1.0;
      for (int j = 1; j * k <= n; ++j) {
        inv_fact /= j;
        const auto& rest = w[static_cast<std::size_t>(n - j * k)];
        for (int m = 0; m + j <= n; ++m)
          row[static_cast<std::size_t>(m + j)] += inv_fact * rest[static_cast<std::size_t>(m)];
      }
    }
  }
  const auto& top = w[size - 1];
  double total = 0.0;
  for (double v : top) total += v;
  Distribution d;
  for (std::size_t m = 1; m < size; ++m)
    if (top[m] > 0.0) d[static_cast<int>(m)] = top[m] / total;
  return d;
}

}  // namespace fragpart
