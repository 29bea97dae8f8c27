#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subergo/drift.hpp"
#include "subergo/model.hpp"
#include "subergo/rng.hpp"
#include "subergo/series.hpp"

namespace subergo::jump {

// Hub-and-spoke chain on {0, 1, 2, ...}: state 0 jumps to i with probability
// p_i at rate lambda_0, state i >= 1 falls back to 0 at rate lambda_i. Slowly
// vanishing lambda_i produces arbitrarily sticky spokes and subgeometric
// return behaviour.

struct WeightFamily {
  enum class Kind { Geometric, Power };
  Kind kind = Kind::Geometric;
  double q = 0.5;   // geometric: p_i = (1-q) q^{i-1}
  double s = 2.0;   // power: p_i = i^{-s} / zeta(s), s > 1
  double norm = 1;  // cached 1/zeta(s); set by the factory

  double pmf(long i) const;
  double tail(long n) const;  // upper bound on sum_{i > n} p_i (tight for geometric)
  long sample(rng::SplitMix64& g) const;
  std::string describe() const;
};

WeightFamily geometric_weights(double q);
WeightFamily power_weights(double s);

struct RateDecay {
  enum class Kind { Constant, Geometric, Power };
  Kind kind = Kind::Constant;
  double c = 1.0;
  double q = 0.5;  // geometric: lambda_i = c q^i
  double a = 1.0;  // power: lambda_i = c / max(i,1)^a

  double lambda(long i) const;  // i >= 0; lambda_0 = c for every kind
  bool vanishes() const;        // lambda_i -> 0 along i
  double sup_spoke() const;     // sup over i >= 1
  std::string describe() const;
};

RateDecay constant_rates(double c);
RateDecay geometric_rates(double c, double q);
RateDecay power_rates(double c, double a);

// Explicit truncation of the generator to states {0..n}. `weight_leak` bounds
// the branch mass parked beyond the truncation and `weighted_leak` bounds
// sum_{i>n} p_i (1 + 1/lambda_i), the quantity controlling both the invariant
// mass and the mean excursion time lost to the cut.
struct TruncatedGenerator {
  long n = 0;
  std::vector<double> lambda;  // size n+1
  std::vector<double> weight;  // size n, branch probabilities p_1..p_n
  double weight_leak = 0;
  double weighted_leak = 0;

  double entry(long i, long j) const;
  std::vector<double> dense() const;  // (n+1)^2 row-major
};

struct TransientRow {
  std::vector<double> prob;  // row x of exp(t * generator) on the truncation
  double series_tail;        // discarded uniformization mass
  double deficit;            // 1 - sum(prob), leak through the cut
};

// Uniformized matrix exponential row. Cost is O(n) per uniformization step:
// the generator couples every state only to the hub.
TransientRow transient_row(const TruncatedGenerator& gen, long x, double t);

// Stationary law of the truncated chain (sums to one over {0..n}).
std::vector<double> invariant_on_truncation(const TruncatedGenerator& gen);

struct SeriesValue {
  bool finite = false;
  double value = 0;
  double tail_bound = 0;
};

struct Distance {
  double value = 0;
  double error_bar = 0;  // truncation + series residue, scaled by sup |f|
};

struct ConductanceReport {
  std::vector<long> states;
  std::vector<double> bound;    // 2 (1 - exp(-lambda_i m)) where pi(i) <= 1/2
  std::vector<double> pi_mass;  // pi(i), validity context for the bound
  double infimum = 0;
  bool decreasing = false;      // bound monotone over the scanned states
  bool obstruction = false;     // rate decay kills any uniform conductance gap
  std::string note;
};

struct RatePrediction {
  // Convergence rate factor (1+t)^{rate_poly} [log(1+t)]^{rate_log} or
  // exp(rate_subexp_a * t^{rate_subexp_b}); the paired f-norm grows like
  // 1 + lambda_i^{-norm_pow} [log(1 + 1/lambda_i)]^{norm_log} (times the
  // subexponential factor when norm_subexp is set).
  double kappa = 0;  // norm strength: power/log exponent, or the subexp weight p
  double rate_poly = 0;
  double rate_log = 0;
  double rate_subexp_a = 0;
  double rate_subexp_b = 0;
  double norm_pow = 0;
  double norm_log = 0;
  bool norm_subexp = false;  // norm = [1 + lambda^{-1/2} exp(z^2/lambda)]^kappa
  double z = 0;
  std::string text;
};

struct PredictionSet {
  bool admissible = false;
  std::string reason;
  SeriesValue moment;  // the gating series
  std::vector<RatePrediction> entries;
};

class JumpModel : public proc::ProcessModel {
 public:
  enum class RateKind { Poly, LogPow, Subexp };

  JumpModel(WeightFamily weights, RateDecay rates);

  const WeightFamily& weights() const { return p_; }
  const RateDecay& rates() const { return lam_; }

  // sum_i p_i lambda_i^{-beta}, with certified tail. Closed form for
  // geometric weights with integer-moment structure, else summed until the
  // family tail bound drops below 1e-13 of the value.
  SeriesValue weight_moment(double beta) const;
  // sum_i p_i max(1, 1/lambda_i) [log max(1, 1/lambda_i)]^{beta}
  SeriesValue log_moment(double beta) const;
  // sum_i p_i max(1, 1/lambda_i) lambda_i^{-1/2} exp(z^2 / lambda_i)
  SeriesValue subexp_moment(double z) const;

  struct Recurrence {
    bool rates_vanish = false;
    SeriesValue mean_return;  // sum p_i (1 + 1/lambda_i), hub-return time scale
    bool positive_recurrent = false;
  };
  Recurrence recurrence() const;

  double pi0() const;  // stationary hub mass on the full space

  struct InvariantLaw {
    std::vector<double> pi;  // true stationary probabilities of {0..n}
    double leak = 0;         // stationary mass beyond the truncation
  };
  InvariantLaw invariant_distribution(long n) const;

  // Smallest n with weighted leak below tol.
  long choose_truncation(double tol = 1e-10) const;
  TruncatedGenerator generator_matrix(long n) const;

  // f-weighted distance sum_j f(j) |P_t(x, j) - pi(j)| on the truncation,
  // f defaulting to 1 (twice total variation). Error bar covers the
  // uniformization tail, the row deficit and the stationary leak.
  Distance transient_distance(long n, long x, double t,
                              const std::function<double(long)>& f = {}) const;

  // Cheeger-style upper bound on the spectral gap contribution of spoke i:
  // within mixing time m, flow out of {i} is at most 2 (1 - exp(-lambda_i m)).
  ConductanceReport conductance_obstruction(double m, long i_lo, long i_hi) const;

  // Lyapunov certificate for V(0) = 1, V(i) = lambda_i^{-beta} / c_V with
  // c_V = min_{i>=1} lambda_i^{-beta} / 2, so the unit sublevel set is {0}.
  // Refuses when sum p_i lambda_i^{-beta} diverges.
  drift::DriftCertificate drift_certificate(double beta, int eta_count = 9,
                                            long grid_n = 4000) const;

  // Rate/norm menu for the certified drift, one entry per kappa. Poly and
  // LogPow take param = beta, Subexp takes param = z.
  PredictionSet predicted_rates(RateKind kind, double param,
                                std::span<const double> kappa_grid) const;

  int dimension() const override { return 1; }
  proc::Path simulate(std::span<const double> x0, double horizon,
                      std::uint64_t seed) const override;
  double generator_apply(const proc::DriftFunction& V,
                         std::span<const double> x) const override;
  std::string describe() const override;

 private:
  WeightFamily p_;
  RateDecay lam_;
  // sum_{i >= 1} p_i w(i) with empirical block-doubling divergence detection.
  double spoke_series(const std::function<double(long)>& w) const;
  // closed-form upper bound on sum_{i>n} p_i (1 + 1/lambda_i)
  double weighted_tail_bound(long n) const;
};

}  // namespace subergo::jump
