#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "fundlim/errors.hpp"
#include "fundlim/format.hpp"

namespace fundlim {

// Order p of an L_p norm: a real p >= 1 or the symbolic value infinity.
class NormOrder {
 public:
  explicit NormOrder(double p) : p_(p) {
    if (std::isnan(p) || p < 1.0) {
      throw InvalidOrder("norm order must satisfy p >= 1, got " + format_double(p));
    }
  }

  static NormOrder infinity() { return NormOrder(std::numeric_limits<double>::infinity()); }

  /// Parses "inf", "infinity" or a decimal number.
  static NormOrder parse(const std::string& text);

  bool is_infinite() const { return std::isinf(p_); }
  double value() const { return p_; }

  /// "inf" or the shortest round-trip decimal.
  std::string to_string() const;

  friend bool operator==(NormOrder a, NormOrder b) { return a.p_ == b.p_; }
  friend bool operator<(NormOrder a, NormOrder b) { return a.p_ < b.p_; }

 private:
  double p_;
};

}  // namespace fundlim
