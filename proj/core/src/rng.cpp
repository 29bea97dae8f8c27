#include "subergo/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace subergo::rng {

double SplitMix64::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be positive");
  // -log1p(-u) is safe for u in [0,1).
  return -std::log1p(-uniform()) / rate;
}

double SplitMix64::normal() {
  double u1 = uniform_pos();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SplitMix64::gamma(double shape) {
  if (!(shape > 0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a+1) * U^{1/a}
    double u = uniform_pos();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0) continue;
    v = v * v * v;
    double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace subergo::rng
