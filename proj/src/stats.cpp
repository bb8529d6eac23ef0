#include "fragpart/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <limits>
#include <set>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

int Selector::occupation(const Partition& p) const {
  if (mode == Mode::ExactSize) return p.count(size);
  int n = 0;
  for (int a : p.parts()) {
    if (a < size) break;
    ++n;
  }
  return n;
}

std::string Selector::label() const {
  return (mode == Mode::ExactSize ? "A=" : "A>=") + std::to_string(size);
}

Selector Selector::parse(std::string_view text) {
  std::string_view rest = text;
  if (!rest.empty() && (rest.front() == 'A' || rest.front() == 'a')) rest.remove_prefix(1);
  Mode mode = Mode::ExactSize;
  if (rest.starts_with(">=")) {
    mode = Mode::AtLeast;
    rest.remove_prefix(2);
  } else if (rest.starts_with("=")) {
    rest.remove_prefix(1);
  }
  int size = 0;
  for (char c : rest) {
    if (c < '0' || c > '9') throw InvalidInput("bad selector '" + std::string(text) + "'");
    size = size * 10 + (c - '0');
  }
  if (rest.empty() || size < 1) throw InvalidInput("bad selector '" + std::string(text) + "'");
  return {mode, size};
}

std::vector<Selector> default_selectors() {
  return {Selector::exact(1), Selector::exact(4), Selector::at_least(10)};
}

SummaryStatistics::SummaryStatistics(int a0, std::vector<Selector> selectors)
    : a0_(a0),
      selectors_(std::move(selectors)),
      log_scale_(kNegInf),
      species_sum_(static_cast<std::size_t>(a0) + 1, 0.0),
      m_hist_(static_cast<std::size_t>(a0) + 1, 0.0),
      selector_hist_(selectors_.size(), std::vector<double>(static_cast<std::size_t>(a0) + 1, 0.0)) {
  if (a0 < 1) throw PreconditionError("a0 must be >= 1");
}

void SummaryStatistics::rescale(double new_log_scale) {
  if (log_scale_ != kNegInf) {
    const double f = std::exp(log_scale_ - new_log_scale);
    weight_sum_ *= f;
    for (double& v : species_sum_) v *= f;
    for (double& v : m_hist_) v *= f;
    for (auto& h : selector_hist_)
      for (double& v : h) v *= f;
  }
  log_scale_ = new_log_scale;
}

void SummaryStatistics::accumulate(const Partition& p, double log_weight) {
  if (p.total_mass() != a0_)
    throw PreconditionError("partition mass " + std::to_string(p.total_mass()) +
                            " does not match accumulator a0 " + std::to_string(a0_));
  if (log_weight > log_scale_) rescale(log_weight);
  const double w = log_weight == log_scale_ ? 1.0 : std::exp(log_weight - log_scale_);
  ++samples_;
  weight_sum_ += w;
  for (int a : p.parts()) species_sum_[static_cast<std::size_t>(a)] += w;
  m_hist_[static_cast<std::size_t>(p.multiplicity())] += w;
  for (std::size_t s = 0; s < selectors_.size(); ++s)
    selector_hist_[s][static_cast<std::size_t>(selectors_[s].occupation(p))] += w;
}

void SummaryStatistics::merge(const SummaryStatistics& other) {
  if (other.a0_ != a0_ || other.selectors_ != selectors_)
    throw PreconditionError("cannot merge accumulators with different a0 or selectors");
  if (other.samples_ == 0) return;
  if (other.log_scale_ > log_scale_) rescale(other.log_scale_);
  const double f = std::exp(other.log_scale_ - log_scale_);
  samples_ += other.samples_;
  weight_sum_ += f * other.weight_sum_;
  for (std::size_t i = 0; i < species_sum_.size(); ++i) species_sum_[i] += f * other.species_sum_[i];
  for (std::size_t i = 0; i < m_hist_.size(); ++i) m_hist_[i] += f * other.m_hist_[i];
  for (std::size_t s = 0; s < selector_hist_.size(); ++s)
    for (std::size_t i = 0; i < selector_hist_[s].size(); ++i)
      selector_hist_[s][i] += f * other.selector_hist_[s][i];
}

double SummaryStatistics::log_total_weight() const {
  if (weight_sum_ <= 0.0) return kNegInf;
  return log_scale_ + std::log(weight_sum_);
}

std::vector<double> SummaryStatistics::mean_species() const {
  std::vector<double> mean(species_sum_.size(), 0.0);
  if (weight_sum_ <= 0.0) return mean;
  for (std::size_t a = 1; a < mean.size(); ++a) mean[a] = species_sum_[a] / weight_sum_;
  return mean;
}

double SummaryStatistics::mean_multiplicity() const {
  if (weight_sum_ <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t m = 1; m < m_hist_.size(); ++m) s += static_cast<double>(m) * m_hist_[m];
  return s / weight_sum_;
}

Distribution SummaryStatistics::m_distribution() const {
  Distribution d;
  if (weight_sum_ <= 0.0) return d;
  for (std::size_t m = 1; m < m_hist_.size(); ++m)
    if (m_hist_[m] > 0.0) d[static_cast<int>(m)] = m_hist_[m] / weight_sum_;
  return d;
}

Distribution SummaryStatistics::species_distribution(std::size_t index) const {
  Distribution d;
  const auto& h = selector_hist_.at(index);
  d[0] = weight_sum_ > 0.0 ? h[0] / weight_sum_ : 0.0;
  if (weight_sum_ <= 0.0) return d;
  for (std::size_t n = 1; n < h.size(); ++n)
    if (h[n] > 0.0) d[static_cast<int>(n)] = h[n] / weight_sum_;
  return d;
}

double total_variation(const Distribution& d1, const Distribution& d2) {
  auto mass = [](const Distribution& d) {
    double s = 0.0;
    for (const auto& [k, v] : d) {
      if (v < 0.0) throw PreconditionError("negative probability in distribution");
      s += v;
    }
    return s;
  };
  if (std::abs(mass(d1) - 1.0) > 1e-6 || std::abs(mass(d2) - 1.0) > 1e-6)
    throw PreconditionError("total_variation needs normalized distributions");
  double l1 = 0.0;
  auto it1 = d1.begin(), it2 = d2.begin();
  while (it1 != d1.end() || it2 != d2.end()) {
    if (it2 == d2.end() || (it1 != d1.end() && it1->first < it2->first)) {
      l1 += it1->second;
      ++it1;
    } else if (it1 == d1.end() || it2->first < it1->first) {
      l1 += it2->second;
      ++it2;
    } else {
      l1 += std::abs(it1->second - it2->second);
      ++it1;
      ++it2;
    }
  }
  return std::min(1.0, 0.5 * l1);
}

ChiSquareResult chi_square_uniformity(const std::map<int, std::uint64_t>& observed,
                                      const Distribution& expected, std::uint64_t n) {
  if (n == 0) throw PreconditionError("chi-square needs n >= 1");
  std::set<int> keys;
  for (const auto& [k, v] : observed) keys.insert(k);
  for (const auto& [k, v] : expected) keys.insert(k);

  struct Bin {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Bin> bins;
  Bin pool;
  const double dn = static_cast<double>(n);
  for (int k : keys) {
    auto e = expected.find(k);
    auto o = observed.find(k);
    pool.expected += (e == expected.end() ? 0.0 : e->second) * dn;
    pool.observed += o == observed.end() ? 0.0 : static_cast<double>(o->second);
    if (pool.expected >= 5.0) {
      bins.push_back(pool);
      pool = {};
    }
  }
  if (pool.expected > 0.0 || pool.observed > 0.0) {
    if (bins.empty()) {
      bins.push_back(pool);
    } else {
      bins.back().expected += pool.expected;
      bins.back().observed += pool.observed;
    }
  }
  if (bins.size() < 2) throw PreconditionError("chi-square needs at least two bins after pooling");

  ChiSquareResult r;
  for (const Bin& b : bins) {
    const double diff = b.observed - b.expected;
    r.statistic += diff * diff / b.expected;
  }
  r.degrees_of_freedom = static_cast<int>(bins.size()) - 1;
  boost::math::chi_squared dist(r.degrees_of_freedom);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace fragpart
