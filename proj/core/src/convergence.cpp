#include "subergo/convergence.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace subergo::conv {

std::string method_name(Method m) {
  switch (m) {
    case Method::ExactTruncation: return "exact-truncation";
    case Method::McFnorm: return "mc-fnorm";
    case Method::McMomentGap: return "mc-moment-gap";
  }
  return "";
}

double fnorm_distance(std::span<const double> mu, std::span<const double> pi,
                      std::span<const double> f) {
  if (mu.size() != pi.size() || (!f.empty() && f.size() != mu.size()))
    throw std::invalid_argument("fnorm_distance: support mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double w = f.empty() ? 1.0 : f[i];
    acc += w * std::abs(mu[i] - pi[i]);
  }
  return acc;
}

GapEstimate mc_fnorm_gap(
    const proc::Ensemble& ensemble, std::size_t ti,
    std::span<const BasisFunction> basis,
    const std::function<double(std::span<const double>)>& f) {
  if (basis.empty()) throw std::invalid_argument("mc_fnorm_gap: empty basis");
  if (ti >= ensemble.times.size())
    throw std::invalid_argument("mc_fnorm_gap: time index out of range");
  if (ensemble.n < 2)
    throw std::invalid_argument("mc_fnorm_gap: need at least two trajectories");
  const std::size_t n = ensemble.n;
  const auto d = static_cast<std::size_t>(ensemble.dim);
  // Simultaneous level via Bonferroni across the basis.
  const double z =
      gsl_cdf_ugaussian_Pinv(1.0 - 0.025 / static_cast<double>(basis.size()));
  GapEstimate out;
  bool first = true;
  for (std::size_t bi = 0; bi < basis.size(); ++bi) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::span<const double> x(
          &ensemble.states[(k * ensemble.times.size() + ti) * d], d);
      const double gv = basis[bi].g(x);
      if (f && std::abs(gv) > f(x) * (1.0 + 1e-12))
        throw std::invalid_argument("mc_fnorm_gap: |g| exceeds f at a sample (" +
                                    basis[bi].label + ")");
      sum += gv;
      sumsq += gv * gv;
    }
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sumsq - sum * mean) / static_cast<double>(n - 1));
    const double gap = std::abs(mean - basis[bi].pi_value);
    const double half = z * std::sqrt(var / static_cast<double>(n));
    if (first || gap > out.value) {
      out.value = gap;
      out.ci = half;
      out.argmax = bi;
      out.label = basis[bi].label;
      first = false;
    }
  }
  return out;
}

namespace {

ExponentFit ols_loglog(const DistanceSeries& s, double t_lo, double t_hi,
                       const std::vector<char>& keep) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (!keep[i]) continue;
    const double t = s.times[i], v = s.values[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(t > 0.0))
      throw std::invalid_argument("fit_exponent: times must be positive");
    if (!(v > 0.0))
      throw std::invalid_argument(
          "fit_exponent: window holds a nonpositive value");
    xs.push_back(std::log(t));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 5)
    throw std::invalid_argument("fit_exponent: window holds fewer than 5 points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_exponent: degenerate time window");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / n);
  fit.stderr_slope =
      xs.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = xs.size();
  if (!std::isfinite(fit.slope))
    throw std::invalid_argument("fit_exponent: slope not finite");
  return fit;
}

}  // namespace

ExponentFit fit_exponent(const DistanceSeries& s, double t_lo, double t_hi) {
  if (s.times.size() != s.values.size())
    throw std::invalid_argument("fit_exponent: ragged series");
  for (std::size_t i = 1; i < s.times.size(); ++i)
    if (!(s.times[i] > s.times[i - 1]))
      throw std::invalid_argument("fit_exponent: times must increase strictly");
  std::vector<char> keep(s.times.size(), 1);
  return ols_loglog(s, t_lo, t_hi, keep);
}

ExponentFit fit_exponent(const DistanceSeries& s) {
  if (s.times.empty()) throw std::invalid_argument("fit_exponent: empty series");
  if (s.times.size() != s.values.size())
    throw std::invalid_argument("fit_exponent: ragged series");
  for (std::size_t i = 1; i < s.times.size(); ++i)
    if (!(s.times[i] > s.times[i - 1]))
      throw std::invalid_argument("fit_exponent: times must increase strictly");
  // burn-in: drop the earliest fifth of the grid
  const std::size_t skip = s.times.size() / 5;
  std::vector<char> keep(s.times.size(), 1);
  for (std::size_t i = 0; i < skip; ++i) keep[i] = 0;
  // floor: drop points within a factor 100 of the method's resolution
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double floor_i = s.method == Method::ExactTruncation
                               ? s.error_floor
                               : (i < s.ci.size() ? s.ci[i] : s.error_floor);
    if (s.values[i] < 100.0 * floor_i) keep[i] = 0;
  }
  return ols_loglog(s, s.times.front(), s.times.back(), keep);
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NoSlower: return "no-slower";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Contradiction: return "contradiction";
  }
  return "";
}

Comparison compare_to_prediction(const ExponentFit& fit, double tau,
                                 double slack) {
  if (!(tau > 0.0))
    throw std::invalid_argument("predicted exponent must be positive");
  if (!(slack >= 0.0)) throw std::invalid_argument("slack must be nonnegative");
  Comparison cmp;
  cmp.predicted = tau;
  cmp.slack = slack;
  cmp.slope = fit.slope;
  cmp.half = 2.0 * fit.stderr_slope;
  const double bar = -tau + slack;
  if (fit.slope + cmp.half <= bar) {
    cmp.verdict = Verdict::NoSlower;
  } else if (fit.slope - cmp.half > bar) {
    cmp.verdict = Verdict::Contradiction;
  } else {
    cmp.verdict = Verdict::Inconclusive;
  }
  std::ostringstream os;
  os.precision(6);
  os << "fitted slope " << cmp.slope << " +- " << cmp.half
     << " vs predicted decay exponent " << tau << " (slack " << slack
     << "): " << verdict_name(cmp.verdict);
  cmp.text = os.str();
  return cmp;
}

std::string series_csv(const DistanceSeries& s) {
  std::string out = "t,value,ci,method\n";
  char buf[128];
  const std::string m = method_name(s.method);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double ci = i < s.ci.size() ? s.ci[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", s.times[i],
                  s.values[i], ci);
    out += buf;
    out += m;
    out += '\n';
  }
  return out;
}

nlohmann::json fit_json(const ExponentFit& fit) {
  return nlohmann::json{{"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"stderr", fit.stderr_slope},
                        {"residual_rms", fit.residual_rms},
                        {"window", {fit.t_lo, fit.t_hi}},
                        {"points", fit.points}};
}

nlohmann::json comparison_json(const Comparison& cmp) {
  return nlohmann::json{{"verdict", verdict_name(cmp.verdict)},
                        {"predicted_exponent", cmp.predicted},
                        {"slack", cmp.slack},
                        {"slope", cmp.slope},
                        {"two_sigma", cmp.half},
                        {"text", cmp.text}};
}

}  // namespace subergo::conv
