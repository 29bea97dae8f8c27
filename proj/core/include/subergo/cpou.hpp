#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "subergo/drift.hpp"
#include "subergo/model.hpp"
#include "subergo/rng.hpp"

namespace subergo::cpou {

// Law of a single positive jump W. Three families:
//   point-mass(u0)            all moments finite
//   pareto-log(k)             density (k-1)/(u (log u)^k) on [e, inf), k > 1
//   log-weibull(beta)         density e^{-(log u)^beta}/(u Gamma(1+1/beta)) on [1, inf)
// log W is the natural scale: its law has tail s^{1-k} (pareto-log) resp. a
// gamma tail (log-weibull), and every finiteness question below reduces to it.
struct JumpLaw {
  enum class Family { PointMass, ParetoLog, LogWeibull };
  Family family = Family::PointMass;
  double u0 = 1.0;    // point-mass location
  double k = 4.0;     // pareto-log exponent
  double beta = 0.5;  // log-weibull exponent

  // Lebesgue density; the point mass has none and throws.
  double density(double u) const;
  // P(W >= u).
  double tail(double u) const;
  // P(log W >= s). Overflow-safe for large s (never forms e^s).
  double log_tail(double s) const;
  double sample(rng::SplitMix64& g) const;
  std::string describe() const;
};

JumpLaw point_mass(double u0);     // u0 > 0
JumpLaw pareto_log(double k);      // k > 1
JumpLaw log_weibull(double beta);  // beta > 0

// m_r = int [log(1+u)]^r F(du). Finiteness is decided analytically per family
// (pareto-log: r < k-1; the others always); finite values are computed by
// log-space quadrature with an analytic tail completion.
struct TailMoment {
  bool finite = false;
  double value = 0;
};
TailMoment tail_moment(const JumpLaw& F, double r, double quad_tol = 1e-10);

// Strongest ergodicity obstruction carried by the jump law alone:
// E[log W] = inf kills positive recurrence; E[W^kappa] = inf for every
// kappa > 0 kills geometric ergodicity.
enum class Obstruction { NotPositiveRecurrent, NotGeometric, NoObstruction };

struct HeavyTailReport {
  Obstruction verdict = Obstruction::NoObstruction;
  bool log_mean_finite = true;
  double log_mean = 0;           // E[log W] when finite
  bool heavy_all_kappa = false;  // E[W^kappa] = inf for all kappa > 0
  std::string reason;
};
HeavyTailReport heavy_tail_classify(const JumpLaw& F);

// V(x) = (log(e^r + x))^r: >= r^r, smooth, and concave on all of [0, inf)
// together with every power V^eta, eta <= 1 (log(e^r + x) >= r > r eta - 1).
proc::DriftFunction log_power_lyapunov(double r);

// dX = -mu X dt + dZ with Z compound Poisson: intensity lambda, jumps ~ F.
class CPOUModel : public proc::ProcessModel {
 public:
  CPOUModel(double mu, double lambda, JumpLaw law, double quad_tol = 1e-8);

  double mu() const { return mu_; }
  double lambda() const { return lambda_; }
  const JumpLaw& jump_law() const { return law_; }

  // Event-driven trajectory: Exp(lambda) inter-arrivals, exact exponential
  // decay between jumps, one decay segment per inter-jump interval. No
  // discretization error anywhere.
  proc::Path simulate_exact(double x0, double horizon, std::uint64_t seed) const;

  // Lower bound on P_2(tau_[0,1] > t): a jump arrives before the decay from 2
  // crosses 1 and exceeds e^{mu t}. Fixed to that start/set configuration.
  double survival_lower_bound(double t) const;

  // Certify the drift inequality for V = (log(e^r + x))^r, alpha = 1/r, at
  // eta in {alpha, (alpha+1)/2, 1} on the supplied state grid. Refused when
  // m_r is infinite. The attached rate menu carries the polynomial exponent
  // r - 1 at the trivial norm.
  drift::DriftCertificate lemma18_certificate(double r,
                                              std::span<const double> grid) const;

  int dimension() const override { return 1; }
  proc::Path simulate(std::span<const double> x0, double horizon,
                      std::uint64_t seed) const override;
  // lambda int (V(x+u) - V(x)) F(du) - mu x V'(x). Needs V.derivative and a
  // growth class; classes whose jump integral diverges for this family are
  // rejected before any quadrature runs.
  double generator_apply(const proc::DriftFunction& V,
                         std::span<const double> x) const override;
  std::string describe() const override;

 private:
  double mu_;
  double lambda_;
  JumpLaw law_;
  double quad_tol_;
};

}  // namespace subergo::cpou
