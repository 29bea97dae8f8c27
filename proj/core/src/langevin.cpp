#include "subergo/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "subergo/quadrature.hpp"
#include "subergo/rng.hpp"

namespace subergo::langevin {

namespace {

double sqnorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

TargetDensity polynomial_target(int n, double beta) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(beta > 0.0) || !(beta < 1.0 / n))
    throw std::invalid_argument("tail index must satisfy 0 < beta < 1/n");
  TargetDensity t;
  t.family = TargetDensity::Family::Polynomial;
  t.n = n;
  t.beta = beta;
  t.gamma = beta * (2.0 - n);
  const double m = 1.0 / (2.0 * beta);
  t.log_norm = std::lgamma(m) - 0.5 * n * std::log(M_PI) -
               std::lgamma(m - 0.5 * n);
  return t;
}

TargetDensity custom_target(
    int n, std::function<double(std::span<const double>)> log_density,
    std::function<void(std::span<const double>, std::span<double>)> grad,
    std::function<double(std::span<const double>)> lap) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!log_density || !grad || !lap)
    throw std::invalid_argument("custom target needs log-density, gradient, laplacian");
  TargetDensity t;
  t.family = TargetDensity::Family::Custom;
  t.n = n;
  t.beta = std::numeric_limits<double>::quiet_NaN();
  t.gamma = std::numeric_limits<double>::quiet_NaN();
  t.custom_log_density = std::move(log_density);
  t.custom_grad = std::move(grad);
  t.custom_lap = std::move(lap);
  return t;
}

double TargetDensity::log_density(std::span<const double> x) const {
  if (family == Family::Custom) return custom_log_density(x);
  return log_norm - std::log1p(sqnorm(x)) / (2.0 * beta);
}

double TargetDensity::density(std::span<const double> x) const {
  return std::exp(log_density(x));
}

void TargetDensity::grad_log(std::span<const double> x,
                             std::span<double> out) const {
  if (family == Family::Custom) {
    custom_grad(x, out);
    return;
  }
  const double denom = beta * (1.0 + sqnorm(x));
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i] / denom;
}

double TargetDensity::lap_log(std::span<const double> x) const {
  if (family == Family::Custom) return custom_lap(x);
  const double r2 = sqnorm(x);
  const double onep = 1.0 + r2;
  return -(n + (n - 2.0) * r2) / (beta * onep * onep);
}

std::string TargetDensity::describe() const {
  if (family == Family::Custom) return "custom target (n=" + std::to_string(n) + ")";
  return "polynomial-tail target (n=" + std::to_string(n) +
         ", beta=" + num(beta) + ")";
}

LangevinModel::LangevinModel(TargetDensity target, double d, double h0,
                             double r0)
    : target_(std::move(target)), d_(d), h0_(h0), r0_(r0) {
  if (!(d >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (!(h0 > 0.0)) throw std::invalid_argument("step scale must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("bridge radius must be positive");
  if (target_.family == TargetDensity::Family::Polynomial) {
    regularity_known_ = true;
    regular_ = d_ <= 0.5 * (1.0 + target_.gamma) + 1e-15;
  } else {
    regularity_known_ = false;
    regular_ = false;
  }
}

double LangevinModel::sigma(std::span<const double> x) const {
  return std::exp(-d_ * target_.log_density(x));
}

void LangevinModel::drift(std::span<const double> x,
                          std::span<double> out) const {
  target_.grad_log(x, out);
  const double coef =
      0.5 * (1.0 - 2.0 * d_) * std::exp(-2.0 * d_ * target_.log_density(x));
  for (double& v : out) v *= coef;
}

double LangevinModel::elliptic_apply(const proc::DriftFunction& V,
                                     std::span<const double> x) const {
  if (!V.gradient || !V.laplacian)
    throw std::invalid_argument(
        "elliptic operator needs a gradient and a Hessian trace");
  std::vector<double> b(x.size()), gv(x.size());
  drift(x, b);
  V.gradient(x, gv);
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += b[i] * gv[i];
  const double s = sigma(x);
  return dot + 0.5 * s * s * V.laplacian(x);
}

RegularityReport LangevinModel::regularity_check(
    double r0, std::span<const double> t_grid) const {
  if (!(r0 > 0.0)) throw std::invalid_argument("inner radius must be positive");
  RegularityReport rep;
  const int n = target_.n;
  const bool family = target_.family == TargetDensity::Family::Polynomial;
  if (family) {
    const double beta = target_.beta;
    rep.growth_exponent =
        n == 1 ? (1.0 - 2.0 * d_) / beta : 1.0 - n + (1.0 - 2.0 * d_) / beta;
    rep.regular = rep.growth_exponent >= -1.0 - 1e-12;
    rep.conclusive = true;
    rep.note = rep.regular
                   ? "scale integral diverges (tail exponent >= -1): regular"
                   : "scale integral converges: not regular";
  } else {
    rep.note = "custom target: partial integrals only, verdict inconclusive";
  }
  for (double T : t_grid) {
    if (!(T > r0)) continue;
    double val = 0.0;
    if (n == 1) {
      // int_{-T}^{T} pi^{2d-1} dx, symmetric targets assumed on the report
      const auto f = [&](double x) {
        const double xs[1] = {x};
        return std::exp((2.0 * d_ - 1.0) *
                        target_.log_density(std::span<const double>(xs, 1)));
      };
      val = 2.0 * quad::integrate(f, 0.0, T, 1e-10).value;
    } else if (family) {
      const double e = (1.0 - 2.0 * d_) / (2.0 * target_.beta);
      const auto f = [&](double t) {
        return std::pow(t, 1.0 - n) *
               std::pow((1.0 + t * t) / (1.0 + r0 * r0), e);
      };
      val = quad::integrate(f, r0, T, 1e-10).value;
    } else {
      // escape integrand probed along the first coordinate axis
      const auto inner = [&](double s) {
        std::vector<double> x(static_cast<std::size_t>(n), 0.0), g(x.size());
        x[0] = s;
        target_.grad_log(x, g);
        return g[0];  // <grad log pi, x>/s along the axis
      };
      const auto f = [&](double t) {
        const double ex =
            quad::integrate(inner, r0, t, 1e-8).value * (1.0 - 2.0 * d_);
        return std::pow(t, 1.0 - n) * std::exp(-ex);
      };
      val = quad::integrate(f, r0, T, 1e-8).value;
    }
    rep.partials.emplace_back(T, val);
  }
  return rep;
}

proc::DriftFunction LangevinModel::lyapunov(double rho) const {
  if (!(rho > 0.0))
    throw std::invalid_argument(
        "rho must be positive: nonpositive rho drops V below 1");
  const TargetDensity target = target_;
  const double r0 = r0_;
  proc::DriftFunction V;
  V.label = "V = 1 + chi(|x|) pi^-" + num(rho) + " (bridge on [" + num(r0) +
            ", " + num(2.0 * r0) + "])";
  const auto chi3 = [r0](double r, double& c, double& dc, double& ddc) {
    if (r <= r0) {
      c = dc = ddc = 0.0;
      return;
    }
    if (r >= 2.0 * r0) {
      c = 1.0;
      dc = ddc = 0.0;
      return;
    }
    const double u = (r - r0) / r0;
    c = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    dc = 30.0 * u * u * (1.0 - u) * (1.0 - u) / r0;
    ddc = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (r0 * r0);
  };
  V.value = [target, rho, chi3](std::span<const double> x) {
    const double r = std::sqrt(sqnorm(x));
    double c, dc, ddc;
    chi3(r, c, dc, ddc);
    if (c == 0.0) return 1.0;
    return 1.0 + c * std::exp(-rho * target.log_density(x));
  };
  V.gradient = [target, rho, chi3](std::span<const double> x,
                                   std::span<double> out) {
    const double r = std::sqrt(sqnorm(x));
    double c, dc, ddc;
    chi3(r, c, dc, ddc);
    if (c == 0.0 && dc == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double g = std::exp(-rho * target.log_density(x));
    std::vector<double> gl(x.size());
    target.grad_log(x, gl);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double radial = r > 0.0 ? x[i] / r : 0.0;
      out[i] = dc * radial * g - c * rho * g * gl[i];
    }
  };
  V.laplacian = [target, rho, chi3,
                 n = target_.n](std::span<const double> x) {
    const double r = std::sqrt(sqnorm(x));
    double c, dc, ddc;
    chi3(r, c, dc, ddc);
    if (c == 0.0 && dc == 0.0) return 0.0;
    const double g = std::exp(-rho * target.log_density(x));
    std::vector<double> gl(x.size());
    target.grad_log(x, gl);
    double gl2 = 0.0, radial_gl = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      gl2 += gl[i] * gl[i];
      radial_gl += (r > 0.0 ? x[i] / r : 0.0) * gl[i];
    }
    const double lap_g = rho * g * (rho * gl2 - target.lap_log(x));
    const double lap_chi = ddc + (n - 1) * (r > 0.0 ? dc / r : 0.0);
    const double cross = dc * (-rho * g) * radial_gl;
    return c * lap_g + 2.0 * cross + g * lap_chi;
  };
  return V;
}

double LangevinModel::lyapunov_tail_form(double rho, double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  std::vector<double> x(static_cast<std::size_t>(target_.n), 0.0);
  x[0] = r;
  std::vector<double> gl(x.size());
  target_.grad_log(x, gl);
  const double gl2 = sqnorm(gl);
  const double logpi = target_.log_density(x);
  const double bracket =
      1.0 - rho - 2.0 * d_ + target_.lap_log(x) / gl2;
  return -0.5 * rho * std::exp(-(rho + 2.0 * d_) * logpi) * gl2 * bracket;
}

ScanResult LangevinModel::drift_inequality_scan(
    double rho, std::span<const double> radii) const {
  if (target_.family != TargetDensity::Family::Polynomial)
    throw std::runtime_error(
        "drift scan needs the polynomial family (analytic tail index)");
  ScanResult res;
  if (rho == 0.0) {
    res.verdict = "refused: rho must be nonzero";
    return res;
  }
  if (rho < 0.0) {
    res.verdict =
        "refused: negative rho drops V below 1; hot temperatures are handled "
        "by the regime classifier";
    return res;
  }
  res.alpha = 2.0 * (target_.beta - d_) / rho;
  if (res.alpha <= 0.0) {
    res.verdict =
        "refused: alpha <= 0 (temperature at or above the tail index is "
        "geometric; use the regime classifier)";
    return res;
  }
  if (res.alpha > 1.0 + 1e-12) {
    res.verdict = "refused: alpha = " + num(res.alpha) +
                  " exceeds 1; no subgeometric drift of this order";
    return res;
  }
  if (!(1.0 + target_.gamma - rho - 2.0 * d_ > 0.0)) {
    res.verdict = "condition violated";
    return res;
  }
  const proc::DriftFunction V = lyapunov(rho);
  std::vector<double> rs(radii.begin(), radii.end());
  std::sort(rs.begin(), rs.end());
  for (double r : rs) {
    if (!(r > r0_)) continue;  // V is flat 1 inside the bridge base
    ScanRow row;
    row.radius = r;
    std::vector<double> x(static_cast<std::size_t>(target_.n), 0.0);
    x[0] = r;
    row.numeric = elliptic_apply(V, x);
    const double v = V.value(x);
    row.ratio = row.numeric / std::pow(v, 1.0 - res.alpha);
    if (r >= 2.0 * r0_ * (1.0 + 1e-9)) {
      row.closed_form = lyapunov_tail_form(rho, r);
      const double scale = std::max(std::abs(row.closed_form), 1e-300);
      if (std::abs(row.closed_form - row.numeric) > 1e-3 * scale)
        throw std::runtime_error(
            "tail formula and numeric operator disagree at radius " + num(r));
    }
    res.rows.push_back(row);
  }
  if (res.rows.empty()) {
    res.verdict = "fails on grid";
    return res;
  }
  // smallest radius past which every ratio stays negative
  std::size_t cut = res.rows.size();
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> suffix(res.rows.size() + 1,
                             -std::numeric_limits<double>::infinity());
  for (std::size_t k = res.rows.size(); k-- > 0;)
    suffix[k] = std::max(suffix[k + 1], res.rows[k].ratio);
  for (std::size_t k = 0; k < res.rows.size(); ++k)
    if (suffix[k] < 0.0) {
      cut = k;
      worst = suffix[k];
      break;
    }
  if (cut == res.rows.size()) {
    res.verdict = "fails on grid";
    return res;
  }
  res.R = res.rows[cut].radius;
  res.c = -worst;
  res.verdict = "holds";
  return res;
}

template <typename OnStep>
void LangevinModel::integrate(std::span<const double> x0, double horizon,
                              std::uint64_t seed, OnStep&& on_step) const {
  const std::size_t n = x0.size();
  rng::SplitMix64 g(seed);
  std::vector<double> x(x0.begin(), x0.end()), b(n);
  double t = 0.0;
  on_step(t, x);
  while (t < horizon) {
    drift(x, b);
    const double s = sigma(x);
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    double h = h0_ / (1.0 + bnorm + s * s);
    if (h < 1e-12)
      throw std::runtime_error(
          "integrator step underflow (|b|=" + num(bnorm) +
          ", sigma^2=" + num(s * s) + "): state escaped the resolvable range");
    h = std::min(h, horizon - t);
    const double root = std::sqrt(h);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += b[i] * h + s * root * g.normal();
    t += h;
    on_step(t, x);
  }
}

proc::Path LangevinModel::simulate(std::span<const double> x0, double horizon,
                                   std::uint64_t seed) const {
  if (static_cast<int>(x0.size()) != target_.n)
    throw std::invalid_argument("start state has wrong dimension");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!regularity_known_ || !regular_)
    throw std::runtime_error(
        "simulation requires a conclusive 'regular' verdict for the target");
  proc::GridSeg seg;
  seg.t0 = 0.0;
  seg.t1 = horizon;
  integrate(x0, horizon, seed, [&](double t, const std::vector<double>& x) {
    seg.times.push_back(t);
    seg.values.insert(seg.values.end(), x.begin(), x.end());
  });
  std::vector<proc::Segment> segs;
  segs.push_back(std::move(seg));
  return proc::Path(target_.n, std::move(segs));
}

void LangevinModel::simulate_at(std::span<const double> x0,
                                std::span<const double> times,
                                std::uint64_t seed,
                                std::span<double> out) const {
  if (static_cast<int>(x0.size()) != target_.n)
    throw std::invalid_argument("start state has wrong dimension");
  if (times.empty()) return;
  double horizon = times.back();
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1])
      throw std::invalid_argument("sample times must be nondecreasing");
  if (!(horizon > 0.0)) horizon = 1e-12;
  if (!regularity_known_ || !regular_)
    throw std::runtime_error(
        "simulation requires a conclusive 'regular' verdict for the target");
  const std::size_t n = x0.size();
  std::vector<double> prev(x0.begin(), x0.end());
  double tprev = 0.0;
  std::size_t ti = 0;
  integrate(x0, horizon, seed, [&](double t, const std::vector<double>& x) {
    while (ti < times.size() && times[ti] <= t) {
      const double dt = t - tprev;
      const double w = dt > 0 ? (times[ti] - tprev) / dt : 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double a = prev[k];
        out[ti * n + k] = a + w * (x[k] - a);
      }
      ++ti;
    }
    prev = x;
    tprev = t;
  });
  // times exactly at the horizon may remain due to float step accumulation
  while (ti < times.size()) {
    for (std::size_t k = 0; k < n; ++k) out[ti * n + k] = prev[k];
    ++ti;
  }
}

double LangevinModel::generator_apply(const proc::DriftFunction& V,
                                      std::span<const double> x) const {
  return elliptic_apply(V, x);
}

std::string LangevinModel::describe() const {
  return "Langevin tempered diffusion (" + target_.describe() +
         ", d=" + num(d_) + ")";
}

Classification theorem16_classify(double beta, double gamma, double d,
                                  double kappa) {
  if (!(beta > 0.0)) throw std::invalid_argument("tail index must be positive");
  if (!(gamma > 2.0 * beta - 1.0))
    throw std::invalid_argument("curvature ratio must exceed 2*beta - 1");
  if (!(d >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (!(d < 0.5 * (1.0 + gamma)))
    throw std::invalid_argument(
        "temperature must stay below (1 + gamma)/2 (regularity ceiling)");
  Classification out;
  out.kappa = kappa;
  if (d < beta) {
    out.regime = Regime::Cold;
    const double kmax = 1.0 + gamma - 2.0 * beta;
    if (!(kappa >= 0.0) || !(kappa < kmax))
      throw std::invalid_argument(
          "cold regime needs 0 <= kappa < 1 + gamma - 2*beta = " + num(kmax) +
          " (open boundary)");
    out.tau = (1.0 + gamma - 2.0 * beta - kappa) / (2.0 * (beta - d));
    out.norm_text = "1 + pi^-" + num(kappa);
    return out;
  }
  out.regime = Regime::Geometric;
  out.uniform = d > beta;
  const double kmax = 1.0 + gamma - 2.0 * d;
  if (!(kappa > 0.0) || !(kappa < kmax))
    throw std::invalid_argument(
        "geometric regime needs 0 < kappa < 1 + gamma - 2*d = " + num(kmax) +
        " (open boundaries)");
  out.norm_text = "1 + pi^-" + num(kappa);
  return out;
}

double general_diffusion_tau(double abar, double gbar, double rbar, double l,
                             double kappa) {
  if (!(abar > 0.0))
    throw std::invalid_argument("quadratic-form bound abar must be positive");
  if (!(l < 2.0)) throw std::invalid_argument("diffusion growth l must be < 2");
  if (!(rbar > 0.5 * (gbar - abar * l)))
    throw std::invalid_argument(
        "inward drift too weak: need rbar > (gbar - abar*l)/2");
  const double kmax = l + (2.0 * rbar - gbar) / abar;
  if (!(kappa >= 0.0) || !(kappa < kmax))
    throw std::invalid_argument("need 0 <= kappa < l + (2*rbar - gbar)/abar = " +
                                num(kmax) + " (open boundary)");
  return (2.0 * (rbar + abar) - gbar) / (abar * (2.0 - l)) - 1.0 -
         kappa / (2.0 - l);
}

}  // namespace subergo::langevin
