#include "subergo/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subergo/quadrature.hpp"

namespace subergo::proc {
namespace {

double seg_t0(const Segment& s) {
  return std::visit([](const auto& v) { return v.t0; }, s);
}
double seg_t1(const Segment& s) {
  return std::visit([](const auto& v) { return v.t1; }, s);
}

void eval_grid(const GridSeg& g, int dim, double t, std::span<double> out) {
  const auto& ts = g.times;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  if (hi == 0) hi = 1;
  if (hi >= ts.size()) hi = ts.size() - 1;
  const std::size_t lo = hi - 1;
  const double dt = ts[hi] - ts[lo];
  const double w = dt > 0 ? (t - ts[lo]) / dt : 0.0;
  for (int k = 0; k < dim; ++k) {
    const double a = g.values[lo * dim + k];
    const double b = g.values[hi * dim + k];
    out[k] = a + w * (b - a);
  }
}

}  // namespace

Path::Path(int dim, std::vector<Segment> segments)
    : dim_(dim), segments_(std::move(segments)) {
  if (dim_ < 1) throw std::invalid_argument("Path: dimension must be >= 1");
  if (segments_.empty()) throw std::invalid_argument("Path: no segments");
  double t = 0.0;
  for (const auto& s : segments_) {
    if (std::abs(seg_t0(s) - t) > 1e-12 * (1.0 + std::abs(t))) {
      throw std::invalid_argument("Path: segments not contiguous from 0");
    }
    if (!(seg_t1(s) >= seg_t0(s))) throw std::invalid_argument("Path: bad segment span");
    if (const auto* c = std::get_if<ConstantSeg>(&s)) {
      if (static_cast<int>(c->state.size()) != dim_)
        throw std::invalid_argument("Path: state dimension mismatch");
    } else if (std::holds_alternative<DecaySeg>(s)) {
      if (dim_ != 1) throw std::invalid_argument("Path: decay segments are scalar");
    } else if (const auto* g = std::get_if<GridSeg>(&s)) {
      if (g->times.size() < 2 || g->values.size() != g->times.size() * static_cast<std::size_t>(dim_))
        throw std::invalid_argument("Path: malformed grid segment");
      if (g->times.front() != g->t0 || g->times.back() != g->t1)
        throw std::invalid_argument("Path: grid nodes must span the segment");
    }
    t = seg_t1(s);
  }
  horizon_ = t;
}

void Path::eval(double t, std::span<double> out) const {
  if (!(t >= 0) || t > horizon_ * (1.0 + 1e-12) + 1e-300) {
    throw std::invalid_argument("Path::eval: t outside [0, horizon]");
  }
  t = std::min(t, horizon_);
  // Right-continuity: pick the segment whose [t0, t1) contains t; at the final
  // horizon point use the last segment.
  std::size_t idx = segments_.size() - 1;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (t < seg_t1(segments_[i])) {
      idx = i;
      break;
    }
  }
  const Segment& s = segments_[idx];
  if (const auto* c = std::get_if<ConstantSeg>(&s)) {
    std::copy(c->state.begin(), c->state.end(), out.begin());
  } else if (const auto* d = std::get_if<DecaySeg>(&s)) {
    out[0] = d->x0 * std::exp(-d->mu * (t - d->t0));
  } else {
    eval_grid(std::get<GridSeg>(s), dim_, t, out);
  }
}

double Path::scalar(double t) const {
  if (dim_ != 1) throw std::logic_error("Path::scalar: not one-dimensional");
  double v;
  eval(t, {&v, 1});
  return v;
}

namespace {

// First entry into the interval [lo, hi] for x(t) = x0 e^{-mu (t-a')}, scanning
// [a, b). Returns nullopt if the segment never enters.
std::optional<double> decay_hit_interval(const DecaySeg& d, double lo, double hi,
                                         double a, double b) {
  auto at = [&](double t) { return d.x0 * std::exp(-d.mu * (t - d.t0)); };
  const double xa = at(a);
  if (xa >= lo && xa <= hi) return a;
  if (d.mu <= 0 || d.x0 == 0) return std::nullopt;  // frozen outside
  if (xa > hi && d.x0 > 0) {
    // Decreasing toward 0: crosses hi at t*.
    const double tstar = d.t0 + std::log(d.x0 / hi) / d.mu;
    if (tstar >= a && tstar < b) return tstar;
    return std::nullopt;
  }
  // Below lo and shrinking further: never enters.
  return std::nullopt;
}

std::optional<double> bisect_entry(const std::function<bool(double)>& inside_at,
                                   double t_out, double t_in, double tol) {
  for (int it = 0; it < 200 && t_in - t_out > tol; ++it) {
    const double mid = 0.5 * (t_out + t_in);
    (inside_at(mid) ? t_in : t_out) = mid;
  }
  return t_in;
}

}  // namespace

std::optional<double> hitting_time(const Path& path, const HittingQuery& query) {
  if (!query.inside) throw std::invalid_argument("hitting_time: no set predicate");
  if (!(query.delay >= 0)) throw std::invalid_argument("hitting_time: negative delay");
  if (query.delay > path.horizon()) {
    throw std::invalid_argument("hitting_time: delay exceeds path horizon");
  }
  const double T = path.horizon();
  const double tol = 1e-12 * std::max(1.0, T);
  std::vector<double> buf(static_cast<std::size_t>(path.dimension()));
  auto inside_at = [&](double t) {
    path.eval(t, buf);
    return query.inside(buf);
  };

  for (const auto& s : path.segments()) {
    const double t1 = seg_t1(s);
    if (t1 <= query.delay) continue;
    const double a = std::max(seg_t0(s), query.delay);
    if (const auto* c = std::get_if<ConstantSeg>(&s)) {
      if (query.inside(c->state)) return a;
    } else if (const auto* d = std::get_if<DecaySeg>(&s)) {
      if (query.interval) {
        auto hit = decay_hit_interval(*d, query.interval->first,
                                      query.interval->second, a, t1);
        if (hit) return hit;
      } else {
        // No interval structure: sample then refine.
        const int n = 512;
        double prev = a;
        bool prev_in = inside_at(a);
        if (prev_in) return a;
        for (int i = 1; i <= n; ++i) {
          const double t = a + (t1 - a) * static_cast<double>(i) / n;
          if (inside_at(t)) return bisect_entry(inside_at, prev, t, tol);
          prev = t;
        }
      }
    } else {
      const auto& g = std::get<GridSeg>(s);
      double prev = a;
      bool first = true;
      for (std::size_t i = 0; i < g.times.size(); ++i) {
        const double t = g.times[i];
        if (t < a) continue;
        if (inside_at(t)) {
          if (first && t <= a + tol) return a;
          return bisect_entry(inside_at, prev, t, tol);
        }
        prev = t;
        first = false;
      }
    }
  }
  // Check the terminal point (segments are right-open).
  if (inside_at(T)) return T;
  return std::nullopt;
}

double path_integral(const Path& path,
                     const std::function<double(std::span<const double>)>& f,
                     const rates::RateFunction& r, double upto) {
  if (!(upto >= 0) || upto > path.horizon() * (1.0 + 1e-12) + 1e-300) {
    throw std::invalid_argument("path_integral: upto outside [0, horizon]");
  }
  upto = std::min(upto, path.horizon());
  if (upto == 0) return 0.0;
  const double step_cap = 1e-3 * upto;
  std::vector<double> buf(static_cast<std::size_t>(path.dimension()));
  double acc = 0.0;
  for (const auto& s : path.segments()) {
    const double a = seg_t0(s);
    if (a >= upto) break;
    const double b = std::min(seg_t1(s), upto);
    if (b <= a) continue;
    if (const auto* c = std::get_if<ConstantSeg>(&s)) {
      acc += f(c->state) * (r.cumulative(b) - r.cumulative(a));
    } else {
      auto integrand = [&](double t) {
        path.eval(t, buf);
        return f(buf) * r(t);
      };
      acc += quad::simpson(integrand, a, b, step_cap);
    }
  }
  return acc;
}

}  // namespace subergo::proc
