// Storage process with linear decay and compound-Poisson input: jump laws,
// moment finiteness, exact trajectories, the generator quadrature, and the
// log-power drift certificate.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "subergo/cpou.hpp"
#include "subergo/drift.hpp"
#include "subergo/path.hpp"
#include "subergo/rng.hpp"

using namespace subergo;
using cpou::CPOUModel;
using cpou::JumpLaw;
using proc::DriftFunction;

namespace {

double value_at(const DriftFunction& f, double x) {
  const double xs[1] = {x};
  return f.value(std::span<const double>(xs, 1));
}

double gen_at(const CPOUModel& m, const DriftFunction& f, double x) {
  const double xs[1] = {x};
  return m.generator_apply(f, std::span<const double>(xs, 1));
}

DriftFunction identity_fn() {
  DriftFunction V;
  V.label = "x";
  V.growth = DriftFunction::Growth::Linear;
  V.value = [](std::span<const double> x) { return x[0]; };
  V.derivative = [](double) { return 1.0; };
  return V;
}

DriftFunction exp_decay_fn() {
  DriftFunction V;
  V.label = "exp(-x)";
  V.growth = DriftFunction::Growth::Bounded;
  V.value = [](std::span<const double> x) { return std::exp(-x[0]); };
  V.derivative = [](double x) { return -std::exp(-x); };
  return V;
}

}  // namespace

TEST_CASE("jump law densities and tails") {
  const JumpLaw plog = cpou::pareto_log(3.0);
  CHECK(plog.density(std::exp(1.0)) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(plog.density(2.0) == 0.0);
  CHECK(plog.tail(std::exp(2.0)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(plog.tail(0.0) == 1.0);
  CHECK(plog.tail(1.0) == 1.0);
  CHECK(plog.log_tail(5.0) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(plog.log_tail(0.5) == 1.0);
  CHECK(plog.log_tail(1.0) == 1.0);

  const JumpLaw lw = cpou::log_weibull(0.5);
  CHECK(lw.density(1.0) == doctest::Approx(0.5));
  CHECK(lw.density(0.5) == 0.0);
  // P(log W >= s) = Q(2, sqrt(s)): upper gamma tail of the squared draw.
  CHECK(lw.log_tail(4.0) ==
        doctest::Approx(0.40600584970983807).epsilon(1e-12));
  CHECK(lw.log_tail(1.0) ==
        doctest::Approx(0.73575888234288464).epsilon(1e-12));
  CHECK(lw.log_tail(0.0) == 1.0);

  const JumpLaw pm = cpou::point_mass(2.0);
  CHECK_THROWS_AS((void)pm.density(2.0), std::invalid_argument);
  CHECK(pm.log_tail(0.69) == 1.0);
  CHECK(pm.log_tail(0.70) == 0.0);
  CHECK(pm.tail(1.9) == 1.0);
  CHECK(pm.tail(2.1) == 0.0);

  CHECK(plog.describe() == "pareto-log(k=3) on [e, inf)");
  CHECK(pm.describe() == "point mass at 2");
  CHECK(lw.describe().find("log-weibull") != std::string::npos);

  CHECK_THROWS_AS((void)cpou::point_mass(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::point_mass(-1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::pareto_log(1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::pareto_log(0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::log_weibull(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::log_weibull(-2.0), std::invalid_argument);
}

TEST_CASE("jump sampler matches the analytic tails") {
  const int n = 200000;

  SUBCASE("pareto-log") {
    const JumpLaw law = cpou::pareto_log(3.0);
    rng::SplitMix64 g(77);
    int over_e2 = 0, over_e5 = 0;
    double wmin = 1e300;
    for (int i = 0; i < n; ++i) {
      const double w = law.sample(g);
      wmin = std::min(wmin, w);
      if (w >= std::exp(2.0)) ++over_e2;
      if (w >= std::exp(5.0)) ++over_e5;
    }
    CHECK(wmin >= std::exp(1.0) - 1e-9);
    const double f2 = static_cast<double>(over_e2) / n;
    const double f5 = static_cast<double>(over_e5) / n;
    CHECK(std::abs(f2 - 0.25) <= 4.5 * std::sqrt(0.25 * 0.75 / n));
    CHECK(std::abs(f5 - 0.04) <= 4.5 * std::sqrt(0.04 * 0.96 / n));
  }

  SUBCASE("log-weibull") {
    const JumpLaw law = cpou::log_weibull(0.5);
    rng::SplitMix64 g(78);
    double logsum = 0.0;
    int over = 0;
    for (int i = 0; i < n; ++i) {
      const double w = law.sample(g);
      CHECK(w >= 1.0);
      const double s = std::log(w);
      logsum += s;
      if (s >= 4.0) ++over;
    }
    // log W = G^2, G ~ Gamma(2,1): mean 6, variance 84.
    CHECK(std::abs(logsum / n - 6.0) <= 4.5 * std::sqrt(84.0 / n));
    const double p4 = 0.40600584970983807;
    CHECK(std::abs(static_cast<double>(over) / n - p4) <=
          4.5 * std::sqrt(p4 * (1.0 - p4) / n));
  }

  SUBCASE("point mass") {
    const JumpLaw law = cpou::point_mass(3.0);
    rng::SplitMix64 g(79);
    for (int i = 0; i < 100; ++i) CHECK(law.sample(g) == 3.0);
  }
}

TEST_CASE("log moments of 1 + W") {
  // Point mass: closed form, no quadrature.
  const auto unit = cpou::tail_moment(cpou::point_mass(std::exp(1.0) - 1.0), 1.0);
  REQUIRE(unit.finite);
  CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-14));
  const auto pm2 = cpou::tail_moment(cpou::point_mass(3.0), 2.0);
  REQUIRE(pm2.finite);
  CHECK(pm2.value == doctest::Approx(1.9218120556728057).epsilon(1e-14));

  // Pareto-log: finite exactly when r < k - 1, boundary excluded.
  const auto m2 = cpou::tail_moment(cpou::pareto_log(4.0), 2.0);
  REQUIRE(m2.finite);
  CHECK(m2.value == doctest::Approx(3.6395321506469926).epsilon(1e-9));
  CHECK_FALSE(cpou::tail_moment(cpou::pareto_log(3.0), 2.0).finite);
  CHECK_FALSE(cpou::tail_moment(cpou::pareto_log(3.0), 2.5).finite);
  CHECK(cpou::tail_moment(cpou::pareto_log(3.0), 1.5).finite);

  // Log-Weibull: every order is finite.
  const auto lw1 = cpou::tail_moment(cpou::log_weibull(0.5), 1.0);
  REQUIRE(lw1.finite);
  CHECK(lw1.value == doctest::Approx(6.178899272119922).epsilon(1e-9));
  const auto lw3 = cpou::tail_moment(cpou::log_weibull(1.5), 3.0);
  REQUIRE(lw3.finite);
  CHECK(lw3.value > 0.0);

  CHECK_THROWS_AS((void)cpou::tail_moment(cpou::point_mass(1.0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::tail_moment(cpou::pareto_log(4.0), -1.0),
                  std::invalid_argument);
}

TEST_CASE("heavy tail classification") {
  using cpou::Obstruction;

  const auto r15 = cpou::heavy_tail_classify(cpou::pareto_log(1.5));
  CHECK(r15.verdict == Obstruction::NotPositiveRecurrent);
  CHECK_FALSE(r15.log_mean_finite);
  CHECK(r15.heavy_all_kappa);
  CHECK(r15.reason.find("cannot be positive recurrent") != std::string::npos);

  const auto r20 = cpou::heavy_tail_classify(cpou::pareto_log(2.0));
  CHECK(r20.verdict == Obstruction::NotPositiveRecurrent);

  const auto r3 = cpou::heavy_tail_classify(cpou::pareto_log(3.0));
  CHECK(r3.verdict == Obstruction::NotGeometric);
  CHECK(r3.log_mean_finite);
  CHECK(r3.log_mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r3.heavy_all_kappa);
  CHECK(r3.reason.find("geometric ergodicity is impossible") !=
        std::string::npos);

  const auto lw05 = cpou::heavy_tail_classify(cpou::log_weibull(0.5));
  CHECK(lw05.verdict == Obstruction::NotGeometric);
  CHECK(lw05.log_mean == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(lw05.heavy_all_kappa);

  const auto lw10 = cpou::heavy_tail_classify(cpou::log_weibull(1.0));
  CHECK(lw10.verdict == Obstruction::NoObstruction);
  CHECK(lw10.log_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(lw10.heavy_all_kappa);
  CHECK(lw10.reason.find("kappa < 1") != std::string::npos);

  const auto lw15 = cpou::heavy_tail_classify(cpou::log_weibull(1.5));
  CHECK(lw15.verdict == Obstruction::NoObstruction);
  CHECK(lw15.log_mean == doctest::Approx(0.6594547532155967).epsilon(1e-12));
  CHECK(lw15.reason.find("finite for every kappa") != std::string::npos);

  const auto pm = cpou::heavy_tail_classify(cpou::point_mass(5.0));
  CHECK(pm.verdict == Obstruction::NoObstruction);
  CHECK(pm.log_mean == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK_FALSE(pm.heavy_all_kappa);
  CHECK(pm.reason.find("single jump size") != std::string::npos);
}

TEST_CASE("log-power test function") {
  const DriftFunction V = cpou::log_power_lyapunov(2.0);
  CHECK(V.growth == DriftFunction::Growth::LogPower);
  CHECK(V.growth_power == 2.0);
  CHECK(V.label.find("log") != std::string::npos);
  CHECK(value_at(V, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
  const double e2 = std::exp(2.0), e3 = std::exp(3.0);
  CHECK(value_at(V, e3 - e2) == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(V.derivative(0.0) == doctest::Approx(4.0 / e2).epsilon(1e-14));
  CHECK(V.derivative(e3 - e2) == doctest::Approx(6.0 / e3).epsilon(1e-13));

  CHECK_THROWS_AS((void)cpou::log_power_lyapunov(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cpou::log_power_lyapunov(-1.0), std::invalid_argument);
}

TEST_CASE("model construction and description") {
  const CPOUModel m(1.0, 1.0, cpou::pareto_log(4.0));
  CHECK(m.dimension() == 1);
  CHECK(m.mu() == 1.0);
  CHECK(m.lambda() == 1.0);
  CHECK(m.describe().find("compound-Poisson storage process") !=
        std::string::npos);
  CHECK(m.describe().find("mu=1") != std::string::npos);
  CHECK(m.describe().find("pareto-log") != std::string::npos);

  CHECK_THROWS_AS(CPOUModel(0.0, 1.0, cpou::point_mass(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CPOUModel(-1.0, 1.0, cpou::point_mass(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CPOUModel(1.0, -0.5, cpou::point_mass(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CPOUModel(1.0, 1.0, cpou::point_mass(1.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("exact trajectories") {
  SUBCASE("pure decay when the intensity vanishes") {
    const CPOUModel m(1.0, 0.0, cpou::point_mass(1.0));
    const proc::Path p = m.simulate_exact(4.0, 1.0, 5);
    CHECK(p.segments().size() == 1);
    CHECK(p.scalar(0.0) == doctest::Approx(4.0));
    CHECK(p.scalar(1.0) == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-14));
  }

  SUBCASE("determinism and segment structure") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(3.0));
    const proc::Path a = m.simulate_exact(2.0, 50.0, 42);
    const proc::Path b = m.simulate_exact(2.0, 50.0, 42);
    const proc::Path c = m.simulate_exact(2.0, 50.0, 43);
    REQUIRE(a.segments().size() == b.segments().size());
    bool all_equal = true;
    for (double t = 0.0; t <= 50.0; t += 0.73)
      if (a.scalar(t) != b.scalar(t)) all_equal = false;
    CHECK(all_equal);
    bool differs = c.segments().size() != a.segments().size();
    for (double t = 0.0; !differs && t <= 50.0; t += 0.73)
      if (a.scalar(t) != c.scalar(t)) differs = true;
    CHECK(differs);

    // Every segment decays at rate mu from a nonnegative start; each jump
    // lifts the decayed endpoint by at least e (the pareto-log support floor).
    double prev_end = -1.0;
    for (std::size_t i = 0; i < a.segments().size(); ++i) {
      const auto& seg = std::get<proc::DecaySeg>(a.segments()[i]);
      CHECK(seg.mu == 1.0);
      CHECK(seg.x0 >= 0.0);
      if (i > 0) CHECK(seg.x0 - prev_end >= std::exp(1.0) - 1e-9);
      prev_end = seg.x0 * std::exp(-seg.mu * (seg.t1 - seg.t0));
    }
  }

  SUBCASE("jump count concentrates at lambda T") {
    const CPOUModel m(1.0, 2.0, cpou::point_mass(1.0));
    const proc::Path p = m.simulate_exact(0.0, 50.0, 7);
    const double jumps = static_cast<double>(p.segments().size()) - 1.0;
    CHECK(std::abs(jumps - 100.0) <= 4.5 * 10.0);
  }

  SUBCASE("span interface and default time sampler") {
    const CPOUModel m(1.0, 1.0, cpou::log_weibull(1.5));
    const double x0[1] = {2.0};
    const proc::Path p = m.simulate(std::span<const double>(x0, 1), 3.0, 11);
    const proc::Path q = m.simulate_exact(2.0, 3.0, 11);
    CHECK(p.scalar(1.7) == q.scalar(1.7));

    const double times[2] = {0.5, 1.5};
    double out[2] = {0, 0};
    m.simulate_at(std::span<const double>(x0, 1),
                  std::span<const double>(times, 2), 11,
                  std::span<double>(out, 2));
    CHECK(out[0] == doctest::Approx(q.scalar(0.5)).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(q.scalar(1.5)).epsilon(1e-12));

    const double bad[2] = {1.0, 2.0};
    CHECK_THROWS_AS((void)m.simulate(std::span<const double>(bad, 2), 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)m.simulate_exact(-1.0, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)m.simulate_exact(1.0, 0.0, 0), std::invalid_argument);
  }
}

TEST_CASE("survival lower bound") {
  const CPOUModel m(1.0, 1.0, cpou::pareto_log(3.0));
  CHECK(m.survival_lower_bound(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.survival_lower_bound(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.survival_lower_bound(2.0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(m.survival_lower_bound(5.0) == doctest::Approx(0.02).epsilon(1e-14));
  double prev = 1.0;
  for (double t = 0.0; t <= 10.0; t += 0.25) {
    const double v = m.survival_lower_bound(t);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK_THROWS_AS((void)m.survival_lower_bound(-0.1), std::invalid_argument);

  const CPOUModel m2(1.0, 2.0, cpou::pareto_log(3.0));
  CHECK(m2.survival_lower_bound(2.0) == doctest::Approx(0.1875).epsilon(1e-14));
}

TEST_CASE("empirical survival beats the bound") {
  const CPOUModel m(1.0, 1.0, cpou::pareto_log(3.0));
  const int n = 20000;
  proc::HittingQuery q;
  q.interval = std::make_pair(0.0, 1.0);
  q.inside = [](std::span<const double> x) { return x[0] <= 1.0; };
  int alive = 0;
  for (int i = 0; i < n; ++i) {
    const proc::Path p =
        m.simulate_exact(2.0, 2.0, rng::substream_seed(9100, i));
    if (!proc::hitting_time(p, q).has_value()) ++alive;
  }
  const double p_hat = static_cast<double>(alive) / n;
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / n);
  CHECK(p_hat >= m.survival_lower_bound(2.0) - 4.0 * se);
}

TEST_CASE("generator closed forms and gates") {
  SUBCASE("point mass identity") {
    const CPOUModel m(1.0, 2.0, cpou::point_mass(1.0));
    CHECK(gen_at(m, identity_fn(), 3.0) == doctest::Approx(-1.0).epsilon(1e-14));
  }

  SUBCASE("input validation") {
    const CPOUModel m(1.0, 1.0, cpou::point_mass(1.0));
    DriftFunction no_deriv;
    no_deriv.value = [](std::span<const double> x) { return x[0]; };
    CHECK_THROWS_AS((void)gen_at(m, no_deriv, 1.0), std::invalid_argument);
    DriftFunction no_value;
    no_value.derivative = [](double) { return 1.0; };
    CHECK_THROWS_AS((void)gen_at(m, no_value, 1.0), std::invalid_argument);
    DriftFunction unspec = identity_fn();
    unspec.growth = DriftFunction::Growth::Unspecified;
    CHECK_THROWS_WITH_AS((void)gen_at(m, unspec, 1.0),
                         "jump generator needs a declared growth class on V",
                         std::invalid_argument);
    const double two[2] = {1.0, 2.0};
    CHECK_THROWS_AS(
        (void)m.generator_apply(identity_fn(), std::span<const double>(two, 2)),
        std::invalid_argument);
  }

  SUBCASE("zero intensity skips the jump gate") {
    const CPOUModel m(2.0, 0.0, cpou::pareto_log(3.0));
    DriftFunction sq;
    sq.value = [](std::span<const double> x) { return x[0] * x[0]; };
    sq.derivative = [](double x) { return 2.0 * x; };
    CHECK(gen_at(m, sq, 3.0) == doctest::Approx(-36.0).epsilon(1e-14));
  }

  SUBCASE("growth gates against the jump family") {
    const CPOUModel pareto25(1.0, 1.0, cpou::pareto_log(2.5));
    CHECK_THROWS_AS((void)gen_at(pareto25, identity_fn(), 1.0),
                    std::runtime_error);
    const CPOUModel lw05(1.0, 1.0, cpou::log_weibull(0.5));
    CHECK_THROWS_AS((void)gen_at(lw05, identity_fn(), 1.0), std::runtime_error);
    const CPOUModel lw10(1.0, 1.0, cpou::log_weibull(1.0));
    CHECK_THROWS_AS((void)gen_at(lw10, identity_fn(), 1.0), std::runtime_error);

    const DriftFunction V2 = cpou::log_power_lyapunov(2.0);
    try {
      (void)gen_at(pareto25, V2, 1.0);
      CHECK(false);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("diverges at k =") != std::string::npos);
    }
  }

  SUBCASE("linear growth against the light log-Weibull tail") {
    const CPOUModel m(1.0, 1.0, cpou::log_weibull(1.5));
    // A x = lambda E[W] - mu x with E[W] = int e^{w - w^1.5} dw / Gamma(5/3).
    const double a2 = gen_at(m, identity_fn(), 2.0);
    CHECK(std::abs(a2 - 0.3606659304659336) < 1e-6);
    const double a5 = gen_at(m, identity_fn(), 5.0);
    CHECK(std::abs((a5 - a2) - (-3.0)) < 2e-6);
  }

  SUBCASE("bounded test function") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(3.0));
    // A e^{-x} at x = 1 collapses to e^{-1} E[e^{-W}].
    const double a1 = gen_at(m, exp_decay_fn(), 1.0);
    CHECK(std::abs(a1 - 0.008284585490319276) < 1e-7);
  }

  SUBCASE("log-power function decays at large states") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(4.0));
    CHECK(gen_at(m, cpou::log_power_lyapunov(2.0), std::exp(6.0)) < 0.0);
  }

  SUBCASE("linearity, closed form") {
    const CPOUModel m(1.5, 0.7, cpou::point_mass(2.0));
    const DriftFunction v1 = identity_fn();
    const DriftFunction v2 = exp_decay_fn();
    DriftFunction v3;
    v3.growth = DriftFunction::Growth::Linear;
    v3.value = [](std::span<const double> x) {
      return 2.0 * x[0] + std::exp(-x[0]);
    };
    v3.derivative = [](double x) { return 2.0 - std::exp(-x); };
    const double lhs = gen_at(m, v3, 2.0);
    const double rhs = 2.0 * gen_at(m, v1, 2.0) + gen_at(m, v2, 2.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }

  SUBCASE("linearity, quadrature") {
    // orders differing by an integer keep the combination inside the
    // log-power class the tail completion expands in powers of 1/w
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(6.0));
    const DriftFunction v1 = cpou::log_power_lyapunov(3.0);
    const DriftFunction v2 = cpou::log_power_lyapunov(2.0);
    DriftFunction v3;
    v3.growth = DriftFunction::Growth::LogPower;
    v3.growth_power = 3.0;
    v3.value = [&v1, &v2](std::span<const double> x) {
      return 2.0 * v1.value(x) + v2.value(x);
    };
    v3.derivative = [&v1, &v2](double x) {
      return 2.0 * v1.derivative(x) + v2.derivative(x);
    };
    const double lhs = gen_at(m, v3, 10.0);
    const double rhs = 2.0 * gen_at(m, v1, 10.0) + gen_at(m, v2, 10.0);
    CHECK(std::abs(lhs - rhs) < 1e-5);
  }

  SUBCASE("mean trajectory solves the Dynkin ODE") {
    // dE[X]/dt = lambda u0 - mu E[X]; x0=3, mu=1, lambda=2, u0=1 gives
    // E[X_2] = 2 + e^{-2}.
    const CPOUModel m(1.0, 2.0, cpou::point_mass(1.0));
    const int n = 20000;
    const double x0[1] = {3.0};
    const double t[1] = {2.0};
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      double out[1];
      m.simulate_at(std::span<const double>(x0, 1),
                    std::span<const double>(t, 1),
                    rng::substream_seed(9200, i), std::span<double>(out, 1));
      sum += out[0];
      sumsq += out[0] * out[0];
    }
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n - 1.0);
    const double target = 2.0 + std::exp(-2.0);
    CHECK(std::abs(mean - target) <= 4.5 * std::sqrt(var / n));
  }
}

TEST_CASE("log-power drift certificate") {
  std::vector<double> grid;
  const double lo = 2.0, hi = std::log(1e6);
  for (int i = 0; i < 48; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * i / 47.0));

  SUBCASE("certified for pareto-log(4), r = 2") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(4.0));
    const auto cert = m.lemma18_certificate(2.0, grid);
    REQUIRE(cert.certified());
    CHECK(cert.alpha == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(cert.rows.size() == 3);
    CHECK(cert.rows[0].eta == doctest::Approx(0.5));
    CHECK(cert.rows[1].eta == doctest::Approx(0.75));
    CHECK(cert.rows[2].eta == doctest::Approx(1.0));
    for (const auto& row : cert.rows) {
      CHECK(row.c > 0.0);
      CHECK(row.worst_ratio < 0.0);
    }
    CHECK(cert.scope == "grid plus family tail lemma");
    CHECK(cert.v_label.find("log") != std::string::npos);
    CHECK(cert.model.find("storage") != std::string::npos);
    CHECK(cert.v_level > 0.0);
    CHECK(cert.b >= 0.0);
    // The menu carries the pure-rate row t^{r-1} at the trivial norm.
    REQUIRE(cert.menu.size() == 5);
    bool found = false;
    for (const auto& e : cert.menu)
      if (std::abs(e.rate_exponent - 1.0) < 1e-12 &&
          std::abs(e.norm_exponent) < 1e-12)
        found = true;
    CHECK(found);

    const auto j = cert.to_json();
    CHECK(j.at("status").get<std::string>() == "certified");
    const auto back = drift::DriftCertificate::from_json(j);
    CHECK(back.certified());
    CHECK(back.rows.size() == 3);
    CHECK(back.alpha == doctest::Approx(cert.alpha));
  }

  SUBCASE("refused when the moment diverges") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(2.0));
    const auto cert = m.lemma18_certificate(2.0, grid);
    CHECK(cert.status == drift::Status::Refused);
    CHECK(cert.reason.find("diverges") != std::string::npos);
    CHECK(cert.alpha == doctest::Approx(0.5));
    CHECK(cert.v_label.find("log") != std::string::npos);
  }

  SUBCASE("order must exceed one") {
    const CPOUModel m(1.0, 1.0, cpou::pareto_log(4.0));
    CHECK_THROWS_AS((void)m.lemma18_certificate(1.0, grid),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)m.lemma18_certificate(0.5, grid),
                    std::invalid_argument);
  }
}
