#include "subergo/jump.hpp"

#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace subergo::jump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

WeightFamily geometric_weights(double q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("geometric weights need 0 < q < 1");
  WeightFamily w;
  w.kind = WeightFamily::Kind::Geometric;
  w.q = q;
  return w;
}

WeightFamily power_weights(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("power weights need s > 1");
  WeightFamily w;
  w.kind = WeightFamily::Kind::Power;
  w.s = s;
  w.norm = 1.0 / gsl_sf_zeta(s);
  return w;
}

double WeightFamily::pmf(long i) const {
  if (i < 1) return 0.0;
  if (kind == Kind::Geometric)
    return (1.0 - q) * std::pow(q, static_cast<double>(i - 1));
  return std::pow(static_cast<double>(i), -s) * norm;
}

double WeightFamily::tail(long n) const {
  if (n < 1) return 1.0;
  if (kind == Kind::Geometric) return std::pow(q, static_cast<double>(n));
  // integral majorant of the zeta tail
  return std::pow(static_cast<double>(n), 1.0 - s) / (s - 1.0) * norm;
}

long WeightFamily::sample(rng::SplitMix64& g) const {
  if (kind == Kind::Geometric) {
    const double u = g.uniform();
    const long i = 1 + static_cast<long>(std::floor(std::log1p(-u) / std::log(q)));
    return std::max<long>(i, 1);
  }
  // Devroye's rejection sampler for the zeta law.
  const double am1 = s - 1.0;
  const double b = std::pow(2.0, am1);
  for (;;) {
    const double u = g.uniform_pos();
    const double v = g.uniform();
    const double x = std::floor(std::pow(u, -1.0 / am1));
    if (x < 1.0 || x > 9.0e18) continue;
    const double t = std::pow(1.0 + 1.0 / x, am1);
    if (v * x * (t - 1.0) / (b - 1.0) <= t / b) return static_cast<long>(x);
  }
}

std::string WeightFamily::describe() const {
  if (kind == Kind::Geometric) return "geometric(q=" + num(q) + ")";
  return "power(s=" + num(s) + ")";
}

RateDecay constant_rates(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("rates need c > 0");
  RateDecay r;
  r.kind = RateDecay::Kind::Constant;
  r.c = c;
  return r;
}

RateDecay geometric_rates(double c, double q) {
  if (!(c > 0.0) || !(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("geometric rates need c > 0, 0 < q < 1");
  RateDecay r;
  r.kind = RateDecay::Kind::Geometric;
  r.c = c;
  r.q = q;
  return r;
}

RateDecay power_rates(double c, double a) {
  if (!(c > 0.0) || !(a > 0.0))
    throw std::invalid_argument("power rates need c > 0, a > 0");
  RateDecay r;
  r.kind = RateDecay::Kind::Power;
  r.c = c;
  r.a = a;
  return r;
}

double RateDecay::lambda(long i) const {
  if (i <= 0) return c;
  switch (kind) {
    case Kind::Constant: return c;
    case Kind::Geometric: return c * std::pow(q, static_cast<double>(i));
    case Kind::Power: return c * std::pow(static_cast<double>(i), -a);
  }
  return c;
}

bool RateDecay::vanishes() const { return kind != Kind::Constant; }

double RateDecay::sup_spoke() const {
  switch (kind) {
    case Kind::Constant: return c;
    case Kind::Geometric: return c * q;
    case Kind::Power: return c;
  }
  return c;
}

std::string RateDecay::describe() const {
  switch (kind) {
    case Kind::Constant: return "constant(c=" + num(c) + ")";
    case Kind::Geometric: return "geometric(c=" + num(c) + ", q=" + num(q) + ")";
    case Kind::Power: return "power(c=" + num(c) + ", a=" + num(a) + ")";
  }
  return "";
}

double TruncatedGenerator::entry(long i, long j) const {
  if (i < 0 || j < 0 || i > n || j > n) throw std::out_of_range("generator entry");
  if (i == 0) {
    if (j == 0) return -lambda[0];
    return lambda[0] * weight[static_cast<std::size_t>(j - 1)];
  }
  if (j == 0) return lambda[static_cast<std::size_t>(i)];
  if (j == i) return -lambda[static_cast<std::size_t>(i)];
  return 0.0;
}

std::vector<double> TruncatedGenerator::dense() const {
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  std::vector<double> a(m * m, 0.0);
  for (long i = 0; i <= n; ++i)
    for (long j = 0; j <= n; ++j)
      a[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)] =
          entry(i, j);
  return a;
}

TransientRow transient_row(const TruncatedGenerator& gen, long x, double t) {
  if (x < 0 || x > gen.n) throw std::invalid_argument("start state outside truncation");
  if (t < 0.0) throw std::invalid_argument("negative time");
  const std::size_t m = static_cast<std::size_t>(gen.n) + 1;
  TransientRow out;
  out.prob.assign(m, 0.0);
  if (t == 0.0) {
    out.prob[static_cast<std::size_t>(x)] = 1.0;
    out.series_tail = 0.0;
    out.deficit = 0.0;
    return out;
  }
  const double M = *std::max_element(gen.lambda.begin(), gen.lambda.end());
  const double mt = M * t;
  // u_k = row x of (I + A/M)^k, updated in O(n) per step: every state couples
  // only through the hub.
  std::vector<double> u(m, 0.0), next(m, 0.0);
  u[static_cast<std::size_t>(x)] = 1.0;
  double logw = -mt;  // log Poisson(mt) weight at k
  double cum = 0.0;
  const long hard_cap =
      static_cast<long>(mt + 120.0 * std::sqrt(mt + 1.0) + 2000.0);
  for (long k = 0;; ++k) {
    const double w = logw > -745.0 ? std::exp(logw) : 0.0;
    if (w > 0.0) {
      for (std::size_t j = 0; j < m; ++j) out.prob[j] += w * u[j];
      cum += w;
    }
    if ((1.0 - cum <= 1e-14 && static_cast<double>(k) >= mt) || k >= hard_cap)
      break;
    // u <- u (I + A/M)
    double inflow0 = 0.0;
    for (std::size_t i = 1; i < m; ++i) inflow0 += u[i] * gen.lambda[i];
    next[0] = u[0] * (1.0 - gen.lambda[0] / M) + inflow0 / M;
    const double hub = u[0] * gen.lambda[0] / M;
    for (std::size_t j = 1; j < m; ++j)
      next[j] = hub * gen.weight[j - 1] + u[j] * (1.0 - gen.lambda[j] / M);
    std::swap(u, next);
    logw += std::log(mt) - std::log(static_cast<double>(k + 1));
  }
  out.series_tail = std::max(0.0, 1.0 - cum);
  double total = 0.0;
  for (double v : out.prob) total += v;
  out.deficit = std::max(0.0, 1.0 - total);
  return out;
}

std::vector<double> invariant_on_truncation(const TruncatedGenerator& gen) {
  const std::size_t m = static_cast<std::size_t>(gen.n) + 1;
  std::vector<double> mu(m, 0.0);
  mu[0] = 1.0;
  double total = 1.0;
  for (std::size_t i = 1; i < m; ++i) {
    mu[i] = gen.lambda[0] * gen.weight[i - 1] / gen.lambda[i];
    total += mu[i];
  }
  for (double& v : mu) v /= total;
  return mu;
}

JumpModel::JumpModel(WeightFamily weights, RateDecay rates)
    : p_(weights), lam_(rates) {}

double JumpModel::spoke_series(const std::function<double(long)>& w) const {
  // Doubling blocks. Once block sums decay geometrically the remainder is
  // completed by bs * r / (1 - r); the sum is accepted when two consecutive
  // completions agree, which pins the completion error at the same order.
  // Exact closure for geometric weights; for power weights the block sums of
  // an i^{-rho} tail are geometric in the block index up to O(1/lo) drift,
  // which the agreement test measures directly.
  double acc = 0.0;
  long lo = 1;
  long width = 64;
  double prev_bs = -1.0;
  double prev_tail = -1.0;
  int grow_streak = 0;
  for (;;) {
    double bs = 0.0;
    for (long i = lo; i < lo + width; ++i) bs += p_.pmf(i) * w(i);
    if (!std::isfinite(bs)) throw std::runtime_error("hub series overflows");
    acc += bs;
    if (prev_bs >= 0.0 && bs > prev_bs * 1.0000001) {
      if (++grow_streak >= 4 && lo > 8192)
        throw std::runtime_error("hub series diverges: block sums keep growing");
    } else {
      grow_streak = 0;
    }
    if (prev_bs == 0.0 && bs == 0.0 && lo > 4096) return acc;
    if (prev_bs > 0.0 && bs >= 0.0) {
      const double r = bs / prev_bs;
      if (r < 0.9) {
        const double tail = bs * r / (1.0 - r);
        if (prev_tail >= 0.0) {
          const double drift = std::abs(tail - (prev_tail - bs));
          if (drift <= 1e-9 * (acc + tail) + 1e-300) return acc + tail;
        }
        prev_tail = tail;
      } else {
        prev_tail = -1.0;
      }
    }
    prev_bs = bs;
    lo += width;
    width *= 2;
    if (lo > 40000000)
      throw std::runtime_error("hub series did not converge within term budget");
  }
}

SeriesValue JumpModel::weight_moment(double beta) const {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  SeriesValue out;
  if (beta == 0.0) {
    out = {true, 1.0, 0.0};
    return out;
  }
  const double c = lam_.c;
  if (lam_.kind == RateDecay::Kind::Constant) {
    out = {true, std::pow(c, -beta), 0.0};
    return out;
  }
  if (p_.kind == WeightFamily::Kind::Geometric) {
    const double q = p_.q;
    if (lam_.kind == RateDecay::Kind::Geometric) {
      const double rho = q * std::pow(lam_.q, -beta);
      if (rho >= 1.0) return out;  // divergent
      out.finite = true;
      out.value =
          (1.0 - q) * std::pow(c, -beta) * std::pow(lam_.q, -beta) / (1.0 - rho);
      return out;
    }
    // lambda_i = c i^{-a}: moment sum_i p_i (i^a/c)^beta
    const double m = lam_.a * beta;
    const double cb = std::pow(c, -beta);
    if (m == std::floor(m) && m <= 3.0) {
      const long mi = static_cast<long>(m);
      double closed = 1.0;
      if (mi == 1) closed = 1.0 / (1.0 - q);
      if (mi == 2) closed = (1.0 + q) / ((1.0 - q) * (1.0 - q));
      if (mi == 3)
        closed = (1.0 + 4.0 * q + q * q) / std::pow(1.0 - q, 3.0);
      out = {true, cb * closed, 0.0};
      return out;
    }
    const auto term = [&](long i) {
      return p_.pmf(i) * cb * std::pow(static_cast<double>(i), m);
    };
    const auto ratio = [&](long i) {
      return q * std::pow(1.0 + 1.0 / static_cast<double>(i), m);
    };
    const series::Sum s = series::sum_geometric_tail(term, ratio);
    out = {s.converged, s.value, s.tail_bound};
    return out;
  }
  // power weights
  const double sexp = p_.s;
  if (lam_.kind == RateDecay::Kind::Geometric) return out;  // divergent
  const double rho = sexp - lam_.a * beta;
  if (rho <= 1.0) return out;  // divergent
  out.finite = true;
  out.value = std::pow(c, -beta) * gsl_sf_zeta(rho) * p_.norm;
  return out;
}

SeriesValue JumpModel::log_moment(double beta) const {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  SeriesValue out;
  const auto weight_of = [&](long i) {
    const double linv = 1.0 / lam_.lambda(i);
    const double base = std::max(1.0, linv);
    const double lg = std::log(base);
    return base * std::pow(lg, beta);
  };
  if (lam_.kind == RateDecay::Kind::Constant) {
    out = {true, weight_of(1), 0.0};  // identical for every spoke
    return out;
  }
  if (p_.kind == WeightFamily::Kind::Geometric) {
    const double q = p_.q;
    if (lam_.kind == RateDecay::Kind::Geometric && q >= lam_.q) return out;
    const auto term = [&](long i) { return p_.pmf(i) * weight_of(i); };
    const auto ratio = [&](long i) {
      const double wi = weight_of(i);
      const double wn = weight_of(i + 1);
      // Weight ratios decrease along both vanishing families once the weight
      // turns positive; before that the closure must stay blocked.
      return wi > 0.0 ? q * wn / wi : 2.0;
    };
    const series::Sum s = series::sum_geometric_tail(term, ratio);
    out = {s.converged, s.value, s.tail_bound};
    return out;
  }
  if (lam_.kind == RateDecay::Kind::Geometric) return out;  // divergent
  const double rho = p_.s - lam_.a;
  if (rho <= 1.0) return out;
  const double kl = lam_.a + std::log(std::exp(1.0) + 1.0 / lam_.c);
  const auto term = [&](long i) { return p_.pmf(i) * weight_of(i); };
  const auto tailb = [&](long i) {
    return std::max(1.0, 1.0 / lam_.c) * std::pow(kl, beta) * p_.norm *
           series::power_log_tail(static_cast<double>(i), rho, beta);
  };
  const series::Sum s = series::sum_with_tail(term, tailb);
  out = {s.converged, s.value, s.tail_bound};
  return out;
}

SeriesValue JumpModel::subexp_moment(double z) const {
  if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
  SeriesValue out;
  const auto weight_of = [&](long i) {
    const double lam = lam_.lambda(i);
    return std::max(1.0, 1.0 / lam) * std::exp(z * z / lam) / std::sqrt(lam);
  };
  if (lam_.kind == RateDecay::Kind::Constant) {
    out = {true, weight_of(1), 0.0};
    return out;
  }
  if (p_.kind == WeightFamily::Kind::Geometric &&
      lam_.kind == RateDecay::Kind::Power) {
    const double q = p_.q;
    const double a = lam_.a;
    if (a > 1.0) return out;  // exp(z^2 i^a / c) outruns the geometric weights
    if (a == 1.0 && q * std::exp(z * z / lam_.c) >= 1.0) return out;
    const auto term = [&](long i) { return p_.pmf(i) * weight_of(i); };
    const auto ratio = [&](long i) {
      const double di = static_cast<double>(i);
      return q * std::pow((di + 1.0) / di, 1.5 * a) *
             std::exp(z * z * (std::pow(di + 1.0, a) - std::pow(di, a)) / lam_.c);
    };
    const series::Sum s = series::sum_geometric_tail(term, ratio);
    out = {s.converged, s.value, s.tail_bound};
    return out;
  }
  return out;  // every other pairing diverges for z > 0
}

JumpModel::Recurrence JumpModel::recurrence() const {
  Recurrence r;
  r.rates_vanish = lam_.vanishes();
  const SeriesValue s1 = weight_moment(1.0);
  r.mean_return.finite = s1.finite;
  if (s1.finite) {
    r.mean_return.value = 1.0 + s1.value;
    r.mean_return.tail_bound = s1.tail_bound;
  }
  r.positive_recurrent = s1.finite;
  return r;
}

double JumpModel::pi0() const {
  const SeriesValue s1 = weight_moment(1.0);
  if (!s1.finite) return 0.0;
  return 1.0 / (1.0 + lam_.lambda(0) * s1.value);
}

JumpModel::InvariantLaw JumpModel::invariant_distribution(long n) const {
  if (n < 1) throw std::invalid_argument("truncation must keep at least state 1");
  const SeriesValue s1 = weight_moment(1.0);
  if (!s1.finite)
    throw std::runtime_error("not positive recurrent: sum p_i / lambda_i diverges");
  InvariantLaw law;
  const double hub = 1.0 / (1.0 + lam_.lambda(0) * s1.value);
  law.pi.assign(static_cast<std::size_t>(n) + 1, 0.0);
  law.pi[0] = hub;
  double total = hub;
  for (long i = 1; i <= n; ++i) {
    law.pi[static_cast<std::size_t>(i)] =
        hub * lam_.lambda(0) * p_.pmf(i) / lam_.lambda(i);
    total += law.pi[static_cast<std::size_t>(i)];
  }
  law.leak = std::max(0.0, 1.0 - total) +
             hub * lam_.lambda(0) * s1.tail_bound;
  return law;
}

double JumpModel::weighted_tail_bound(long n) const {
  const double c = lam_.c;
  if (p_.kind == WeightFamily::Kind::Geometric) {
    const double q = p_.q;
    const double qn = std::pow(q, static_cast<double>(n));
    switch (lam_.kind) {
      case RateDecay::Kind::Constant:
        return (1.0 + 1.0 / c) * qn;
      case RateDecay::Kind::Geometric: {
        const double r = q / lam_.q;
        if (r >= 1.0) return kInf;
        return qn + (1.0 - q) / (c * lam_.q) *
                        std::pow(r, static_cast<double>(n)) / (1.0 - r);
      }
      case RateDecay::Kind::Power: {
        const double grow = q * std::exp(lam_.a / static_cast<double>(n + 1));
        if (grow >= 1.0) return kInf;
        return (1.0 - q) * (1.0 + 1.0 / c) * qn *
               std::pow(static_cast<double>(n + 1), lam_.a) / (1.0 - grow);
      }
    }
  }
  switch (lam_.kind) {
    case RateDecay::Kind::Constant:
      return (1.0 + 1.0 / c) * p_.tail(n);
    case RateDecay::Kind::Geometric:
      return kInf;  // mean return time diverges
    case RateDecay::Kind::Power: {
      const double rho = p_.s - lam_.a;
      if (rho <= 1.0) return kInf;
      return p_.tail(n) + series::power_log_tail(static_cast<double>(n), rho,
                                                 0.0) * p_.norm / c;
    }
  }
  return kInf;
}

long JumpModel::choose_truncation(double tol) const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  long hi = 4;
  while (weighted_tail_bound(hi) > tol) {
    hi *= 2;
    if (hi > (1L << 27))
      throw std::runtime_error(
          "no finite truncation reaches the tolerance (leak does not vanish)");
  }
  long lo = 1;
  while (lo + 1 < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (weighted_tail_bound(mid) <= tol)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

TruncatedGenerator JumpModel::generator_matrix(long n) const {
  if (n < 1) throw std::invalid_argument("truncation must keep at least state 1");
  TruncatedGenerator gen;
  gen.n = n;
  gen.lambda.resize(static_cast<std::size_t>(n) + 1);
  gen.weight.resize(static_cast<std::size_t>(n));
  for (long i = 0; i <= n; ++i)
    gen.lambda[static_cast<std::size_t>(i)] = lam_.lambda(i);
  for (long i = 1; i <= n; ++i)
    gen.weight[static_cast<std::size_t>(i - 1)] = p_.pmf(i);
  gen.weight_leak = p_.tail(n);
  gen.weighted_leak = weighted_tail_bound(n);
  return gen;
}

Distance JumpModel::transient_distance(long n, long x, double t,
                                       const std::function<double(long)>& f) const {
  const TruncatedGenerator gen = generator_matrix(n);
  const InvariantLaw law = invariant_distribution(n);
  const TransientRow row = transient_row(gen, x, t);
  double d = 0.0;
  double fmax = 0.0;
  for (long j = 0; j <= n; ++j) {
    const double fj = f ? f(j) : 1.0;
    fmax = std::max(fmax, std::abs(fj));
    d += fj * std::abs(row.prob[static_cast<std::size_t>(j)] -
                       law.pi[static_cast<std::size_t>(j)]);
  }
  Distance out;
  out.value = d;
  out.error_bar = fmax * (row.series_tail + row.deficit + law.leak);
  return out;
}

ConductanceReport JumpModel::conductance_obstruction(double m, long i_lo,
                                                     long i_hi) const {
  if (!(m > 0.0)) throw std::invalid_argument("skeleton step must be positive");
  if (i_lo < 0 || i_hi < i_lo) throw std::invalid_argument("bad state range");
  ConductanceReport rep;
  const SeriesValue s1 = weight_moment(1.0);
  const double hub = s1.finite ? 1.0 / (1.0 + lam_.lambda(0) * s1.value) : 0.0;
  double prev = kInf;
  rep.decreasing = true;
  rep.infimum = kInf;
  for (long i = i_lo; i <= i_hi; ++i) {
    const double lam = lam_.lambda(i);
    const double bound = 2.0 * (1.0 - std::exp(-lam * m));
    const double mass =
        !s1.finite ? 0.0
        : i == 0   ? hub
                   : hub * lam_.lambda(0) * p_.pmf(i) / lam;
    if (mass > 0.5) continue;  // bound only speaks for small pi-mass states
    rep.states.push_back(i);
    rep.bound.push_back(bound);
    rep.pi_mass.push_back(mass);
    rep.infimum = std::min(rep.infimum, bound);
    if (bound > prev * (1.0 + 1e-12)) rep.decreasing = false;
    prev = bound;
  }
  rep.obstruction = lam_.vanishes();
  if (!s1.finite)
    rep.note = "no stationary law (mean return time diverges); raw escape bounds only";
  else if (rep.obstruction)
    rep.note =
        "escape flow from deep spokes vanishes with lambda_i, so no skeleton "
        "keeps a uniform conductance gap: geometric ergodicity obstructed";
  else
    rep.note = "rates bounded below; conductance stays above " +
               num(2.0 * (1.0 - std::exp(-lam_.sup_spoke() * m))) +
               " and no obstruction follows";
  return rep;
}

drift::DriftCertificate JumpModel::drift_certificate(double beta, int eta_count,
                                                     long grid_n) const {
  drift::DriftCertificate refused;
  refused.model = describe();
  if (!(beta >= 1.0)) {
    refused.reason = "drift order beta must be >= 1";
    return refused;
  }
  const SeriesValue mom = weight_moment(beta);
  if (!mom.finite) {
    refused.reason = "sum p_i lambda_i^{-beta} diverges for " + p_.describe() +
                     " against " + lam_.describe() + " at beta=" + num(beta);
    return refused;
  }
  const double cv = 2.0 * std::pow(lam_.sup_spoke(), beta);  // = 1/(2^{-1} min lambda^{-beta})
  // V(0) = 1, V(i) = lambda_i^{-beta} / (2^{-1} min lambda^{-beta}) >= 2
  proc::DriftFunction V;
  V.label = "V(i) = lambda_i^{-beta} / c, beta=" + num(beta);
  const RateDecay lam = lam_;
  V.value = [lam, beta, cv](std::span<const double> x) {
    const long i = std::lround(x[0]);
    if (i <= 0) return 1.0;
    return cv * std::pow(lam.lambda(i), -beta);
  };
  drift::DriftSpec spec;
  spec.V = V;
  spec.alpha = 1.0 / beta;
  spec.eta_grid = drift::default_eta_grid(spec.alpha, eta_count);
  long step_upper = std::min<long>(grid_n, 512);
  for (long i = 0; i <= step_upper; ++i)
    spec.domain.push_back({static_cast<double>(i)});
  for (double gi = static_cast<double>(step_upper) * 1.15;
       gi < static_cast<double>(grid_n); gi *= 1.15)
    spec.domain.push_back({std::floor(gi)});
  if (grid_n > step_upper)
    spec.domain.push_back({static_cast<double>(grid_n)});
  spec.tail_note =
      "on every spoke the ratio equals -(c V)^{-1/beta} (1 - V^{-eta}) V^{alpha - 1/beta}, "
      "decreasing in V for alpha = 1/beta, so the largest grid spoke dominates "
      "all deeper states";
  return drift::verify(*this, spec);
}

PredictionSet JumpModel::predicted_rates(RateKind kind, double param,
                                         std::span<const double> kappa_grid) const {
  PredictionSet set;
  if (kind == RateKind::Poly) {
    const double beta = param;
    if (!(beta >= 1.0)) {
      set.reason = "polynomial menu needs beta >= 1";
      return set;
    }
    set.moment = weight_moment(beta);
    if (!set.moment.finite) {
      set.reason = "sum p_i lambda_i^{-beta} diverges";
      return set;
    }
    for (double k : kappa_grid) {
      if (k < -1e-12 || k > beta - 1.0 + 1e-12)
        throw std::invalid_argument("kappa outside [0, beta-1]");
      RatePrediction r;
      r.kappa = k;
      r.rate_poly = beta - 1.0 - k;
      r.norm_pow = k;
      r.text = "rate (1+t)^" + num(r.rate_poly) + " against norm 1 + lambda^-" +
               num(k);
      set.entries.push_back(r);
    }
    set.admissible = true;
    return set;
  }
  if (kind == RateKind::LogPow) {
    const double beta = param;
    if (!(beta >= 0.0)) {
      set.reason = "log menu needs beta >= 0";
      return set;
    }
    set.moment = log_moment(beta);
    if (!set.moment.finite) {
      set.reason = "log moment series diverges";
      return set;
    }
    for (double k : kappa_grid) {
      if (k < -1e-12 || k > beta + 1e-12)
        throw std::invalid_argument("kappa outside [0, beta]");
      RatePrediction r;
      r.kappa = k;
      r.rate_log = beta - k;
      r.norm_log = k;
      r.text = "rate [log(1+t)]^" + num(r.rate_log) +
               " against norm [1 + log max(1, 1/lambda)]^" + num(k);
      set.entries.push_back(r);
    }
    set.admissible = true;
    return set;
  }
  const double z = param;
  if (!(z > 0.0)) {
    set.reason = "subexponential menu needs z > 0";
    return set;
  }
  set.moment = subexp_moment(z);
  if (!set.moment.finite) {
    set.reason = "subexponential moment series diverges";
    return set;
  }
  for (double p : kappa_grid) {
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw std::invalid_argument("interpolation weight outside [0, 1]");
    RatePrediction r;
    r.kappa = p;
    r.rate_subexp_a = 2.0 * z * (1.0 - p);
    r.rate_subexp_b = 0.5;
    r.norm_subexp = true;
    r.z = z;
    r.text = "rate exp(" + num(r.rate_subexp_a) +
             " t^0.5) against norm [1 + lambda^-0.5 exp(" + num(z * z) +
             "/lambda)]^" + num(p);
    set.entries.push_back(r);
  }
  set.admissible = true;
  return set;
}

proc::Path JumpModel::simulate(std::span<const double> x0, double horizon,
                               std::uint64_t seed) const {
  if (x0.size() != 1) throw std::invalid_argument("jump model is scalar");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  long state = std::lround(x0[0]);
  if (state < 0) throw std::invalid_argument("states live on {0, 1, ...}");
  rng::SplitMix64 g(seed);
  std::vector<proc::Segment> segs;
  double t = 0.0;
  while (t < horizon) {
    const double hold = g.exponential(lam_.lambda(state));
    const double t1 = std::min(t + hold, horizon);
    segs.push_back(proc::ConstantSeg{t, t1, {static_cast<double>(state)}});
    t += hold;
    if (t >= horizon) break;
    state = state == 0 ? p_.sample(g) : 0;
  }
  return proc::Path(1, std::move(segs));
}

double JumpModel::generator_apply(const proc::DriftFunction& V,
                                  std::span<const double> x) const {
  if (!V.value) throw std::invalid_argument("test function has no value");
  const long i = std::lround(x[0]);
  const auto val = [&](long j) {
    const double xs[1] = {static_cast<double>(j)};
    return V.value(std::span<const double>(xs, 1));
  };
  if (i >= 1) return lam_.lambda(i) * (val(0) - val(i));
  const double v0 = val(0);
  const double hub = spoke_series(val);
  return lam_.lambda(0) * (hub - v0);
}

std::string JumpModel::describe() const {
  return "hub-and-spoke jump chain (weights " + p_.describe() + ", rates " +
         lam_.describe() + ")";
}

}  // namespace subergo::jump
