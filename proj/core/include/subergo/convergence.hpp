#pragma once

#include <cstddef>
#include <functional>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "subergo/montecarlo.hpp"

namespace subergo::conv {

enum class Method { ExactTruncation, McFnorm, McMomentGap };

std::string method_name(Method m);

// Distance-to-equilibrium measurements on a time grid. Exact values carry a
// single error floor (truncation/series bound); Monte Carlo values carry
// per-point confidence half-widths instead.
struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> ci;  // empty unless the method is Monte Carlo
  Method method = Method::ExactTruncation;
  std::string norm_label;
  double error_floor = 0;
};

// Weighted L1 distance sum_i f(i) |mu(i) - pi(i)| between measures given on a
// common countable support (f empty means f = 1, the sup-inf total variation).
double fnorm_distance(std::span<const double> mu, std::span<const double> pi,
                      std::span<const double> f = {});

struct BasisFunction {
  std::function<double(std::span<const double>)> g;
  double pi_value = 0;  // pi(g), from quadrature or a closed form
  std::string label;
};

struct GapEstimate {
  double value = 0;       // max over the basis of |mean g - pi(g)|
  double ci = 0;          // simultaneous 95% half-width (Bonferroni)
  std::size_t argmax = 0;
  std::string label;
};

// Statistical lower bound on the f-norm gap at time index ti of the ensemble:
// the supremum over |g| <= f is relaxed to a declared finite basis. Each |g|
// <= f constraint is spot-checked on the sampled states.
GapEstimate mc_fnorm_gap(const proc::Ensemble& ensemble, std::size_t ti,
                         std::span<const BasisFunction> basis,
                         const std::function<double(std::span<const double>)>& f);

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  double residual_rms = 0;
  double t_lo = 0;
  double t_hi = 0;
  std::size_t points = 0;
};

// Ordinary least squares of log value against log time on [t_lo, t_hi].
// Throws when the window holds fewer than 5 points or any value in it is not
// strictly positive.
ExponentFit fit_exponent(const DistanceSeries& series, double t_lo, double t_hi);

// Default window: drop the earliest fifth of the grid and every point within
// a factor 100 of the method's error floor (per-point ci for Monte Carlo).
ExponentFit fit_exponent(const DistanceSeries& series);

enum class Verdict { NoSlower, Inconclusive, Contradiction };

std::string verdict_name(Verdict v);

struct Comparison {
  Verdict verdict = Verdict::Inconclusive;
  double predicted = 0;  // polynomial decay exponent tau > 0
  double slack = 0;
  double slope = 0;
  double half = 0;  // 2 x slope standard error
  std::string text;
};

// Directional check of a fitted slope against a predicted decay exponent:
// the theory gives upper bounds, so only "decay no slower than predicted" can
// be affirmed; demonstrably slower decay is a contradiction.
Comparison compare_to_prediction(const ExponentFit& fit, double tau,
                                 double slack);

// CSV with the fixed header t,value,ci,method (%.17g, reproducible bytes).
std::string series_csv(const DistanceSeries& series);

nlohmann::json fit_json(const ExponentFit& fit);
nlohmann::json comparison_json(const Comparison& cmp);

}  // namespace subergo::conv
