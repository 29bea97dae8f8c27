#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace subergo::rates {

// Nondecreasing speed functions r with r(0) = 1 and log r(t)/t decreasing to
// zero. Four closed families cover everything the tool predicts or measures:
//
//   Constant        r(t) = 1
//   LogPower(b)     r(t) = [ln(e^{b-1}+t)/(b-1)]^b          for b > 1
//                   r(t) = [1+ln(1+t)]^b                    for 0 <= b <= 1
//   PolyLog(a,b)    r(t) = (1+t)^a [1+ln(1+t)]^b            a > 0, b >= -a/2
//   Subexp(a,b)     r(t) = exp(a t^b)                       a > 0, 0 < b < 1
//
// Every representative is chosen so that log r is concave through the origin,
// which gives r(s+t) <= r(s) r(t) for all s,t >= 0 (not just asymptotically).
// PolyLog rejects b < -a/2 because below that the log-concavity argument (and
// with it submultiplicativity near zero) breaks down.
enum class Family { Constant, LogPower, PolyLog, Subexp };

class RateFunction {
 public:
  double operator()(double t) const;

  // r0(t) = int_0^t r(s) ds. Closed form where one exists (Constant, pure
  // polynomial), adaptive quadrature at rel tol 1e-10 otherwise.
  double cumulative(double t) const;

  Family family() const { return family_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  std::string describe() const;

  friend RateFunction constant_rate();
  friend RateFunction log_power_rate(double beta);
  friend RateFunction poly_log_rate(double alpha, double b);
  friend RateFunction subexp_rate(double a, double beta);

 private:
  RateFunction(Family f, double a, double b) : family_(f), a_(a), b_(b) {}
  Family family_;
  double a_;  // PolyLog/Subexp leading parameter
  double b_;  // power of the log (LogPower/PolyLog) or subexp exponent
};

RateFunction constant_rate();
RateFunction log_power_rate(double beta);       // beta >= 0
RateFunction poly_log_rate(double alpha, double b);
RateFunction subexp_rate(double a, double beta);

double eval_rate(const RateFunction& r, double t);
double cumulative_rate(const RateFunction& r, double t);

// Multiplicative split psi1(x) psi2(y) <= x + y on x,y >= 1. For p in (0,1)
// this is the weighted AM-GM pair ((x/p)^p, (y/(1-p))^{1-p}); p = 1 and p = 0
// degenerate to (identity, one) and (one, identity).
struct YoungPair {
  double p;
  double psi1(double x) const;
  double psi2(double y) const;
};

YoungPair make_young_pair(double p);  // p in [0, 1]

// One row of the rate/norm tradeoff implied by a drift certificate with index
// alpha: sacrificing norm strength (exponent (1-alpha)p on the certificate
// function, log correction -b) buys speed (1+t)^{(1-p)(1-alpha)/alpha} ln^b.
struct MenuEntry {
  double p = 0;
  double rate_exponent = 0;
  double rate_log_power = 0;
  double norm_exponent = 0;
  double norm_log_power = 0;
};
using RateNormMenu = std::vector<MenuEntry>;

// Entries for every admissible (p, b) combination: interior p takes any b,
// p = 1 needs b >= 0, p = 0 needs b <= 0. alpha = 1 collapses the menu to the
// single exponent-zero row.
RateNormMenu tradeoff_menu(double alpha, std::span<const double> p_grid,
                           std::span<const double> b_grid);

// Same tradeoff indexed by kappa in [1, 1/alpha]: rate exponent kappa - 1,
// norm exponent 1 - kappa alpha.
MenuEntry kappa_entry(double alpha, double kappa);

}  // namespace subergo::rates
