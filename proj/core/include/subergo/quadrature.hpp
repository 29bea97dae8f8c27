#pragma once

#include <cstddef>
#include <functional>

namespace subergo::quad {

struct Result {
  double value = 0;
  double abs_error = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod integration on [a, b]. Relative tolerance defaults to
// 1e-10 with a hard budget of about one million integrand evaluations.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, std::size_t max_evals = 1000000);

// Adaptive integration on [a, +inf).
Result integrate_upper(const std::function<double(double)>& f, double a,
                       double rel_tol = 1e-10, std::size_t max_evals = 1000000);

// Fixed-step composite Simpson on [a, b] with step <= max_step (count rounded
// up to an even number of panels). Deterministic by construction; used where a
// reproducible path functional matters more than adaptivity.
double simpson(const std::function<double(double)>& f, double a, double b,
               double max_step);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
// Unnormalized upper incomplete gamma Gamma(a, x).
double gamma_upper(double a, double x);

}  // namespace subergo::quad
