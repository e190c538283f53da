#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace nldamp {

// Accumulator with a fixed (ascending-index) evaluation order. Plain
// summation up to 64 terms, Kahan compensation beyond that, so diagnostics
// are bitwise reproducible and long sums keep full precision.
class OrderedAccumulator {
 public:
  void add(double x) {
    ++count_;
    if (count_ <= 64 && !compensating_) {
      sum_ += x;
      return;
    }
    if (!compensating_) compensating_ = true;
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t count_ = 0;
  bool compensating_ = false;
};

double ordered_sum(std::span<const double> xs);

// Always-compensated sum; used for the damping coefficient where accuracy
// controls the whole coupled system.
double kahan_sum(std::span<const double> xs);

// Least-squares line fit; returns {slope, intercept}.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

// Wrap an angle into (-pi, pi].
double wrap_angle(double x);

double median(std::vector<double> values);

}  // namespace nldamp
