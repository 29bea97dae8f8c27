#include "subergo/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "subergo/rng.hpp"

namespace subergo::proc {

DriftFunction pow_of(const DriftFunction& v, double eta, int dim) {
  if (!v.value) throw std::invalid_argument("pow_of: V has no value");
  if (eta == 1.0) return v;
  DriftFunction w;
  w.label = v.label.empty() ? "" : v.label + "^" + std::to_string(eta);
  w.growth = v.growth;
  w.growth_power = v.growth_power * eta;
  auto val = v.value;
  w.value = [val, eta](std::span<const double> x) {
    return std::pow(val(x), eta);
  };
  if (v.derivative && dim == 1) {
    auto der = v.derivative;
    w.derivative = [val, der, eta](double x) {
      const double s = val({&x, 1});
      return eta * std::pow(s, eta - 1.0) * der(x);
    };
  }
  if (v.gradient) {
    auto grad = v.gradient;
    w.gradient = [val, grad, eta](std::span<const double> x, std::span<double> out) {
      const double s = std::pow(val(x), eta - 1.0) * eta;
      grad(x, out);
      for (auto& g : out) g *= s;
    };
    if (v.laplacian) {
      auto lap = v.laplacian;
      w.laplacian = [val, grad, lap, eta, dim](std::span<const double> x) {
        const double s = val(x);
        std::vector<double> g(static_cast<std::size_t>(dim));
        grad(x, g);
        double g2 = 0;
        for (double gi : g) g2 += gi * gi;
        return eta * std::pow(s, eta - 1.0) * lap(x) +
               eta * (eta - 1.0) * std::pow(s, eta - 2.0) * g2;
      };
    }
  }
  return w;
}

void ProcessModel::simulate_at(std::span<const double> x0,
                               std::span<const double> times, std::uint64_t seed,
                               std::span<double> out) const {
  double horizon = 0;
  for (double t : times) horizon = std::max(horizon, t);
  Path p = simulate(x0, horizon, seed);
  const auto d = static_cast<std::size_t>(dimension());
  for (std::size_t i = 0; i < times.size(); ++i) {
    p.eval(times[i], out.subspan(i * d, d));
  }
}

int thread_count() {
  if (const char* env = std::getenv("SUBERGO_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n;
           i += static_cast<std::size_t>(workers)) {
        f(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

MomentEstimate reduce_sample(const std::vector<double>& sample) {
  MomentEstimate est;
  est.n = sample.size();
  if (sample.empty()) return est;
  double sum = 0;
  for (double v : sample) sum += v;  // index order: bitwise stable
  est.mean = sum / static_cast<double>(sample.size());
  double ss = 0;
  for (double v : sample) ss += (v - est.mean) * (v - est.mean);
  if (sample.size() > 1) {
    est.sd = std::sqrt(ss / static_cast<double>(sample.size() - 1));
    est.ci_halfwidth = 1.959963984540054 * est.sd /
                       std::sqrt(static_cast<double>(sample.size()));
  }
  return est;
}

MomentEstimate estimate_modulated_moment(
    const ProcessModel& model, std::span<const double> x0,
    const std::function<double(std::span<const double>)>& f,
    const rates::RateFunction& r, const HittingQuery& query, std::size_t n,
    double horizon, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("estimate_modulated_moment: n == 0");
  if (!(horizon > 0)) throw std::invalid_argument("estimate_modulated_moment: bad horizon");
  std::vector<double> vals(n);
  std::vector<char> cut(n, 0);
  parallel_for(n, [&](std::size_t k) {
    Path p = model.simulate(x0, horizon, rng::substream_seed(seed, k));
    auto tau = hitting_time(p, query);
    double upto = horizon;
    if (tau) {
      upto = *tau;
    } else {
      cut[k] = 1;
    }
    vals[k] = path_integral(p, f, r, upto);
  });
  MomentEstimate est = reduce_sample(vals);
  for (char c : cut) est.truncated += static_cast<std::size_t>(c);
  est.lower_bound = est.truncated > 0;
  return est;
}

Ensemble ensemble_snapshot(const ProcessModel& model, std::span<const double> x0,
                           std::span<const double> times, std::size_t n,
                           std::uint64_t seed) {
  if (times.empty()) throw std::invalid_argument("ensemble_snapshot: empty time grid");
  Ensemble e;
  e.times.assign(times.begin(), times.end());
  e.dim = model.dimension();
  e.n = n;
  const std::size_t stride = times.size() * static_cast<std::size_t>(e.dim);
  e.states.resize(n * stride);
  parallel_for(n, [&](std::size_t k) {
    model.simulate_at(x0, times, rng::substream_seed(seed, k),
                      {e.states.data() + k * stride, stride});
  });
  return e;
}

}  // namespace subergo::proc
