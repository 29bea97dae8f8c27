#include "subergo/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subergo::series {

double power_log_tail(double N, double rho, double beta) {
  if (!(rho > 1) || beta < 0) throw std::invalid_argument("power_log_tail: need rho>1, beta>=0");
  // x^{-rho} ln^beta x is decreasing past e^{beta/rho}; only then does the
  // integral from N dominate the sum past N.
  if (N < 3.0 || N < std::exp(beta / rho)) {
    return std::numeric_limits<double>::infinity();
  }
  // Integration by parts: T(b) = N^{1-rho} ln^b N/(rho-1) + b/(rho-1) T(b-1),
  // closed at b <= 0 by ln^b x <= ln^b N.
  double b = beta;
  double coef = 1.0;
  double acc = 0.0;
  const double lead = std::pow(N, 1.0 - rho) / (rho - 1.0);
  while (b > 0) {
    acc += coef * lead * std::pow(std::log(N), b);
    coef *= b / (rho - 1.0);
    b -= 1.0;
  }
  acc += coef * lead * std::pow(std::log(N), b);
  return acc;
}

Sum sum_geometric_tail(const std::function<double(long)>& term,
                       const std::function<double(long)>& ratio_bound,
                       double rel_tol, long max_terms) {
  Sum out;
  double t = 0;
  for (long i = 1; i <= max_terms; ++i) {
    t = term(i);
    out.value += t;
    out.terms = i;
    if (i >= 8) {
      const double r = ratio_bound(i);
      if (r >= 0 && r < 1) {
        const double tail = t * r / (1.0 - r);
        if (tail <= rel_tol * out.value) {
          out.tail_bound = tail;
          out.converged = true;
          return out;
        }
      }
    }
  }
  out.tail_bound = std::numeric_limits<double>::infinity();
  return out;
}

Sum sum_with_tail(const std::function<double(long)>& term,
                  const std::function<double(long)>& tail_bound,
                  double rel_tol, long max_terms) {
  Sum out;
  long check = 16;
  for (long i = 1; i <= max_terms; ++i) {
    out.value += term(i);
    out.terms = i;
    if (i == check) {
      check *= 2;
      const double tail = tail_bound(i);
      if (tail <= rel_tol * out.value) {
        out.tail_bound = tail;
        out.converged = true;
        return out;
      }
    }
  }
  out.tail_bound = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace subergo::series
