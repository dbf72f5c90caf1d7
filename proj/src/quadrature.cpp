#include "layerpot/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "layerpot/errors.hpp"

namespace layerpot {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) fail(ErrorKind::Parameter, "Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
  return *slot;
}

const GaussRule& gauss_legendre_unit(int n) {
  if (n < 1) fail(ErrorKind::Parameter, "Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  const GaussRule& base = gauss_legendre(n);
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<GaussRule>();
    slot->nodes.resize(n);
    slot->weights.resize(n);
    for (int i = 0; i < n; ++i) {
      slot->nodes[i] = 0.5 * (base.nodes[i] + 1.0);
      slot->weights[i] = 0.5 * base.weights[i];
    }
  }
  return *slot;
}

std::size_t node_budget() {
  constexpr std::size_t kDefault = 400'000'000;
  const char* env = std::getenv("LAYERPOT_MAX_NODES");
  if (env == nullptr || *env == '\0') return kDefault;
  try {
    const long long v = std::stoll(env);
    if (v > 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  fail(ErrorKind::Config, std::string("LAYERPOT_MAX_NODES is not a positive integer: ") + env);
}

}  // namespace layerpot
