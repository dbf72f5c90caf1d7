#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace layerpot {

// Gauss–Legendre nodes and weights on [-1, 1]. Rules are computed once per
// size and cached; the returned reference stays valid for the program lifetime.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// The same rule mapped to [0, 1].
const GaussRule& gauss_legendre_unit(int n);

// Compensated (Neumaier) summation.
class Accumulator {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Largest number of quadrature nodes a single rule may visit. Read from the
// LAYERPOT_MAX_NODES environment variable when set.
std::size_t node_budget();

// Upper bound on angular resolution reached by near-boundary escalation.
inline constexpr int kMaxEscalatedOrder = 4096;

}  // namespace layerpot
