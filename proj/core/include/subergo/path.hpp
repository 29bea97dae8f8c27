#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "subergo/rates.hpp"

namespace subergo::proc {

// Holds one state vector on [t0, t1).
struct ConstantSeg {
  double t0, t1;
  std::vector<double> state;
};

// Scalar x(t) = x0 exp(-mu (t - t0)) on [t0, t1); mu >= 0.
struct DecaySeg {
  double t0, t1;
  double x0, mu;
};

// Dense sampling of a continuous trajectory; linear interpolation between
// nodes. times must start at t0 and end at t1.
struct GridSeg {
  double t0, t1;
  std::vector<double> times;
  std::vector<double> values;  // times.size() * dim, node-major
};

using Segment = std::variant<ConstantSeg, DecaySeg, GridSeg>;

// A realized trajectory on [0, horizon]: contiguous segments, right-continuous
// state (a jump at a boundary belongs to the segment that starts there).
class Path {
 public:
  Path(int dim, std::vector<Segment> segments);

  int dimension() const { return dim_; }
  double horizon() const { return horizon_; }
  const std::vector<Segment>& segments() const { return segments_; }

  void eval(double t, std::span<double> out) const;
  double scalar(double t) const;  // dim-1 convenience

 private:
  int dim_;
  double horizon_;
  std::vector<Segment> segments_;
};

// Target set plus entry delay. `inside` must be total on the state space.
// When the set is a scalar interval [lo, hi], fill `interval` as well: decay
// segments then get closed-form crossing times instead of a grid search.
struct HittingQuery {
  std::function<bool(std::span<const double>)> inside;
  std::optional<std::pair<double, double>> interval;
  double delay = 0.0;
};

// First entry time inf{t >= delay : X_t in C}, or nullopt if the path runs out
// of horizon first. Exact on constant segments (the state does not move) and
// on decay segments with interval structure; dense segments bisect on the
// interpolant. Throws if delay exceeds the horizon.
std::optional<double> hitting_time(const Path& path, const HittingQuery& query);

// int_0^upto r(s) f(X_s) ds. Constant segments use exact differences of the
// cumulative rate; decay and dense segments use composite Simpson with step
// at most 1e-3 * upto (fixed, for reproducibility).
double path_integral(const Path& path,
                     const std::function<double(std::span<const double>)>& f,
                     const rates::RateFunction& r, double upto);

}  // namespace subergo::proc
