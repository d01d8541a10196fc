#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace nematic {

/// Running log Σ exp(xᵢ) without overflow.
class LogAccumulator {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > top_) {
      scaled_ = scaled_ * std::exp(top_ - log_term) + 1.0;
      top_ = log_term;
    } else {
      scaled_ += std::exp(log_term - top_);
    }
  }

  /// −∞ for an empty sum.
  double value() const { return scaled_ == 0.0 ? -std::numeric_limits<double>::infinity() : top_ + std::log(scaled_); }

 private:
  double top_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

}  // namespace nematic
