#include "fragpart/weight.hpp"

#include <array>
#include <cmath>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {

constexpr int kLogFactorialTable = 1024;

const std::array<double, kLogFactorialTable>& log_factorial_table() {
  static const auto table = [] {
    std::array<double, kLogFactorialTable> t{};
    for (int n = 2; n < kLogFactorialTable; ++n) t[n] = t[n - 1] + std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial of a negative number");
  if (n < kLogFactorialTable) return log_factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

WeightModel WeightModel::uniform() { return {}; }

WeightModel WeightModel::factorial() {
  WeightModel m;
  m.factorial_power_ = 1;
  return m;
}

WeightModel WeightModel::coefficient(const std::map<int, double>& c) {
  WeightModel m;
  for (const auto& [size, value] : c) {
    if (size < 1) throw InvalidModel("coefficient index must be >= 1");
    if (!(value > 0.0) || !std::isfinite(value))
      throw InvalidModel("coefficient c_" + std::to_string(size) + " must be positive and finite");
    if (value != 1.0) m.log_coeffs_[size] = std::log(value);
  }
  return m;
}

WeightModel WeightModel::product(const WeightModel& a, const WeightModel& b) {
  WeightModel m = a;
  m.factorial_power_ += b.factorial_power_;
  for (const auto& [size, lc] : b.log_coeffs_) {
    double& slot = m.log_coeffs_[size];
    slot += lc;
    if (slot == 0.0) m.log_coeffs_.erase(size);
  }
  return m;
}

WeightModel WeightModel::from_name(const std::string& name) {
  if (name == "uniform") return uniform();
  if (name == "factorial") return factorial();
  throw InvalidModel("unknown weight model '" + name + "' (expected uniform or factorial)");
}

WeightModel::Kind WeightModel::kind() const noexcept {
  if (log_coeffs_.empty()) return factorial_power_ == 0 ? Kind::Uniform : Kind::Factorial;
  return factorial_power_ == 0 ? Kind::Coefficient : Kind::Product;
}

std::string WeightModel::name() const {
  switch (kind()) {
    case Kind::Uniform: return "uniform";
    case Kind::Factorial: return factorial_power_ == 1 ? "factorial" : "factorial^" + std::to_string(factorial_power_);
    case Kind::Coefficient: return "coefficient";
    case Kind::Product: return "product";
  }
  return "unknown";
}

double WeightModel::log_species_factor(int size, int n) const {
  double f = 0.0;
  if (factorial_power_ != 0) f -= factorial_power_ * log_factorial(n);
  if (!log_coeffs_.empty() && n != 0) f += n * log_coefficient(size);
  return f;
}

double WeightModel::log_weight(const Partition& p) const {
  if (kind() == Kind::Uniform) return 0.0;
  double lw = 0.0;
  const auto& parts = p.parts();
  // Walk the runs of equal sizes in the sorted parts.
  for (std::size_t i = 0; i < parts.size();) {
    const int size = parts[i];
    const int n = p.count(size);
    lw += log_species_factor(size, n);
    i += static_cast<std::size_t>(n);
  }
  return lw;
}

}  // namespace fragpart
