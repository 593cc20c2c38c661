#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hdgnet {

/// Dense polynomial c0 + c1 s + c2 s^2 + ... in a single variable.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }

  double operator()(double s) const {
    double v = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * s + *it;
    return v;
  }

  double derivative(double s) const {
    double v = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 1;) v = v * s + static_cast<double>(i) * coeffs_[i];
    return v;
  }

  const std::vector<double>& coeffs() const { return coeffs_; }

  /// Degree of the polynomial, -1 for the zero polynomial.
  int degree() const {
    for (std::size_t i = coeffs_.size(); i-- > 0;)
      if (coeffs_[i] != 0.0) return static_cast<int>(i);
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

}  // namespace hdgnet
