#include "subergo/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "subergo/quadrature.hpp"

namespace subergo::rates {

RateFunction constant_rate() { return {Family::Constant, 0, 0}; }

RateFunction log_power_rate(double beta) {
  if (!(beta >= 0)) throw std::invalid_argument("log_power_rate: beta must be >= 0");
  return {Family::LogPower, 0, beta};
}

RateFunction poly_log_rate(double alpha, double b) {
  if (!(alpha > 0)) throw std::invalid_argument("poly_log_rate: alpha must be > 0");
  if (!(b >= -alpha / 2)) {
    throw std::invalid_argument(
        "poly_log_rate: b < -alpha/2 has no submultiplicative representative here");
  }
  return {Family::PolyLog, alpha, b};
}

RateFunction subexp_rate(double a, double beta) {
  if (!(a > 0) || !(beta > 0) || !(beta < 1)) {
    throw std::invalid_argument("subexp_rate: need a > 0 and 0 < beta < 1");
  }
  return {Family::Subexp, a, beta};
}

double RateFunction::operator()(double t) const {
  if (!(t >= 0)) throw std::invalid_argument("rate: t must be >= 0");
  switch (family_) {
    case Family::Constant:
      return 1.0;
    case Family::LogPower:
      if (b_ > 1.0) {
        return std::pow(std::log(std::exp(b_ - 1.0) + t) / (b_ - 1.0), b_);
      }
      return std::pow(1.0 + std::log1p(t), b_);
    case Family::PolyLog:
      return std::pow(1.0 + t, a_) * std::pow(1.0 + std::log1p(t), b_);
    case Family::Subexp:
      return std::exp(a_ * std::pow(t, b_));
  }
  return 1.0;
}

double RateFunction::cumulative(double t) const {
  if (!(t >= 0)) throw std::invalid_argument("cumulative: t must be >= 0");
  if (t == 0) return 0.0;
  switch (family_) {
    case Family::Constant:
      return t;
    case Family::PolyLog:
      if (b_ == 0) {
        return (std::pow(1.0 + t, a_ + 1.0) - 1.0) / (a_ + 1.0);
      }
      break;
    default:
      break;
  }
  auto res = quad::integrate([this](double s) { return (*this)(s); }, 0.0, t);
  if (!res.converged) throw std::runtime_error("cumulative: quadrature failed");
  return res.value;
}

std::string RateFunction::describe() const {
  switch (family_) {
    case Family::Constant:
      return "constant";
    case Family::LogPower:
      return "log-power(beta=" + std::to_string(b_) + ")";
    case Family::PolyLog:
      return "poly-log(alpha=" + std::to_string(a_) + ",b=" + std::to_string(b_) + ")";
    case Family::Subexp:
      return "subexp(a=" + std::to_string(a_) + ",beta=" + std::to_string(b_) + ")";
  }
  return "?";
}

double eval_rate(const RateFunction& r, double t) { return r(t); }

double cumulative_rate(const RateFunction& r, double t) { return r.cumulative(t); }

double YoungPair::psi1(double x) const {
  if (p <= 0) return 1.0;
  if (p >= 1) return x;
  return std::pow(x / p, p);
}

double YoungPair::psi2(double y) const {
  if (p >= 1) return 1.0;
  if (p <= 0) return y;
  return std::pow(y / (1.0 - p), 1.0 - p);
}

YoungPair make_young_pair(double p) {
  if (!(p >= 0) || !(p <= 1)) throw std::invalid_argument("make_young_pair: p must be in [0,1]");
  return {p};
}

namespace {
MenuEntry entry_for(double alpha, double p, double b) {
  MenuEntry e;
  e.p = p;
  e.rate_exponent = (1.0 - p) * (1.0 - alpha) / alpha;
  e.rate_log_power = b;
  e.norm_exponent = (1.0 - alpha) * p;
  e.norm_log_power = -b;
  return e;
}
}  // namespace

RateNormMenu tradeoff_menu(double alpha, std::span<const double> p_grid,
                           std::span<const double> b_grid) {
  if (!(alpha > 0) || !(alpha <= 1)) {
    throw std::invalid_argument("tradeoff_menu: alpha must be in (0,1]");
  }
  RateNormMenu menu;
  if (alpha == 1.0) {
    menu.push_back(entry_for(1.0, 1.0, 0.0));
    return menu;
  }
  for (double p : p_grid) {
    if (!(p >= 0) || !(p <= 1)) {
      throw std::invalid_argument("tradeoff_menu: p outside [0,1]");
    }
    for (double b : b_grid) {
      if (p == 1.0 && b < 0) continue;
      if (p == 0.0 && b > 0) continue;
      menu.push_back(entry_for(alpha, p, b));
    }
  }
  return menu;
}

MenuEntry kappa_entry(double alpha, double kappa) {
  if (!(alpha > 0) || !(alpha <= 1)) {
    throw std::invalid_argument("kappa_entry: alpha must be in (0,1]");
  }
  if (!(kappa >= 1) || !(kappa <= 1.0 / alpha)) {
    throw std::invalid_argument("kappa_entry: kappa must be in [1, 1/alpha]");
  }
  MenuEntry e;
  e.p = alpha == 1.0 ? 1.0 : (1.0 - kappa * alpha) / (1.0 - alpha);
  e.rate_exponent = kappa - 1.0;
  e.rate_log_power = 0.0;
  e.norm_exponent = 1.0 - kappa * alpha;
  e.norm_log_power = 0.0;
  return e;
}

}  // namespace subergo::rates
