#pragma once

#include <cstddef>
#include <functional>

namespace subergo::series {

struct Sum {
  double value = 0;
  double tail_bound = 0;  // rigorous bound on the neglected remainder
  long terms = 0;
  bool converged = false;
};

// Upper bound for sum_{i>N} i^{-rho} ln(i)^beta with rho > 1, beta >= 0.
// Returns +inf when N is too small for the integral majorant to apply.
double power_log_tail(double N, double rho, double beta);

// Sum of positive terms t(i), i >= 1. ratio_bound(i) must dominate
// sup_{j >= i} t(j+1)/t(j); once it drops below 1 the geometric tail bound
// t(i) * r/(1-r) closes the sum.
Sum sum_geometric_tail(const std::function<double(long)>& term,
                       const std::function<double(long)>& ratio_bound,
                       double rel_tol = 1e-13, long max_terms = 50000000);

// Sum of positive terms with a caller-supplied rigorous tail bound past i.
Sum sum_with_tail(const std::function<double(long)>& term,
                  const std::function<double(long)>& tail_bound,
                  double rel_tol = 1e-13, long max_terms = 50000000);

}  // namespace subergo::series
