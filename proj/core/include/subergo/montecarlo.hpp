#pragma once

#include <cstdint>
#include <vector>

#include "subergo/model.hpp"

namespace subergo::proc {

// Worker count for trajectory loops: SUBERGO_THREADS if set, else 1. Results
// are independent of the value; trajectories always reduce in index order.
int thread_count();

// f(i) for i in [0, n), partitioned over thread_count() workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

struct MomentEstimate {
  double mean = 0;
  double sd = 0;
  double ci_halfwidth = 0;  // 95% normal CI
  std::size_t n = 0;
  std::size_t truncated = 0;   // trajectories that never hit C
  bool lower_bound = false;    // set when truncated > 0: integrals were cut at the horizon
};

// Monte Carlo estimate of E_x[ int_0^{tau_C(delay)} r(s) f(X_s) ds ] from n
// trajectories. Trajectory k draws from substream(seed, k); truncated paths
// contribute their horizon-clipped integral and flag the estimate as a lower
// bound.
MomentEstimate estimate_modulated_moment(
    const ProcessModel& model, std::span<const double> x0,
    const std::function<double(std::span<const double>)>& f,
    const rates::RateFunction& r, const HittingQuery& query, std::size_t n,
    double horizon, std::uint64_t seed);

// Same reduction for a plain sample of doubles.
MomentEstimate reduce_sample(const std::vector<double>& sample);

struct Ensemble {
  std::vector<double> times;
  int dim = 1;
  std::size_t n = 0;
  std::vector<double> states;  // n * times.size() * dim, trajectory-major
  double at(std::size_t traj, std::size_t ti, int k = 0) const {
    return states[(traj * times.size() + ti) * static_cast<std::size_t>(dim) +
                  static_cast<std::size_t>(k)];
  }
};

// n trajectories evaluated on a common time grid, trajectory k seeded from
// substream(seed, k).
Ensemble ensemble_snapshot(const ProcessModel& model, std::span<const double> x0,
                           std::span<const double> times, std::size_t n,
                           std::uint64_t seed);

}  // namespace subergo::proc
