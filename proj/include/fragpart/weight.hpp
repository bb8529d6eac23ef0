#pragma once

#include <map>
#include <string>
#include <vector>

#include "fragpart/partition.hpp"

namespace fragpart {

/// Log-weight ln W_f of a partition.
///
/// Every built-in model factorizes over fragment species,
///   ln W_f = sum_A [ N_A ln c_A - k ln(N_A!) ],
/// where k is the number of factorial factors (0 for Uniform, 1 for
/// Factorial). The samplers rely on this to price a move from the handful
/// of species it touches.
class WeightModel {
 public:
  enum class Kind { Uniform, Factorial, Coefficient, Product };

  static WeightModel uniform();
  static WeightModel factorial();
  /// Per-size coefficients c_A; sizes absent from the map keep c_A = 1.
  /// Throws InvalidModel if any c_A is not a positive finite number.
  static WeightModel coefficient(const std::map<int, double>& c);
  /// Multiplies the weights of two models.
  static WeightModel product(const WeightModel& a, const WeightModel& b);

  /// "uniform" or "factorial".
  static WeightModel from_name(const std::string& name);

  Kind kind() const noexcept;
  std::string name() const;

  double log_weight(const Partition& p) const;

  /// Contribution of N fragments of size A.
  double log_species_factor(int size, int n) const;

  int factorial_power() const noexcept { return factorial_power_; }
  double log_coefficient(int size) const noexcept {
    auto it = log_coeffs_.find(size);
    return it == log_coeffs_.end() ? 0.0 : it->second;
  }
  const std::map<int, double>& log_coefficients() const noexcept { return log_coeffs_; }

  friend bool operator==(const WeightModel&, const WeightModel&) = default;

 private:
  int factorial_power_ = 0;
  std::map<int, double> log_coeffs_;
};

/// ln(n!) with a cached table for small n.
double log_factorial(int n);

}  // namespace fragpart
