// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL] line;
// the process exit code is the number of failed criteria.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "subergo/convergence.hpp"
#include "subergo/cpou.hpp"
#include "subergo/experiment.hpp"
#include "subergo/jump.hpp"
#include "subergo/langevin.hpp"
#include "subergo/montecarlo.hpp"
#include "subergo/presets.hpp"
#include "subergo/quadrature.hpp"
#include "subergo/rates.hpp"
#include "subergo/rng.hpp"

namespace {

using namespace subergo;

constexpr double kZ95 = 1.9599639845400542;  // Phi^{-1}(0.975)

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    require(std::abs(got - want) <= tol,
            what + ": got " + fmt(got) + ", want " + fmt(want) + " +- " + fmt(tol));
  }
};

// 1. Two-state chain (p_1 = 1 up to 1e-12, unit rates): the transient L1
// distance from the hub is e^{-2t}.
void c1(Check& c) {
  const jump::JumpModel two(jump::geometric_weights(1e-12),
                            jump::constant_rates(1.0));
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const auto d = two.transient_distance(1, 0, t);
    c.near(d.value, std::exp(-2.0 * t), 1e-9, "distance at t=" + fmt(t));
  }
}

// 2. Invariant law for p_i = 2^{-i}, lambda_i = 1/i against an independent
// dense null-space solve of the truncated generator.
void c2(Check& c) {
  constexpr long n = 60;
  const jump::JumpModel model(jump::geometric_weights(0.5),
                              jump::power_rates(1.0, 1.0));
  const auto inv = model.invariant_distribution(n);
  c.require(inv.pi.size() == n + 1, "invariant law has " +
                                        std::to_string(inv.pi.size()) +
                                        " entries, want 61");

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n + 1, n + 1);
  double hub_out = 0;
  for (long i = 1; i <= n; ++i) {
    const double pi_w = std::pow(2.0, -static_cast<double>(i));
    const double lam = 1.0 / static_cast<double>(i);
    q(0, i) = pi_w;
    hub_out += pi_w;
    q(i, 0) = lam;
    q(i, i) = -lam;
  }
  q(0, 0) = -hub_out;

  // pi Q = 0 with sum(pi) = 1: replace one equation of Q^T v = 0 by the
  // normalization row.
  Eigen::MatrixXd a = q.transpose();
  a.row(n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  const Eigen::VectorXd v = a.fullPivLu().solve(b);
  c.require((q.transpose() * v).head(n).lpNorm<Eigen::Infinity>() < 1e-12,
            "null-space residual too large");

  double worst = 0;
  for (long i = 0; i <= n && i < static_cast<long>(inv.pi.size()); ++i)
    worst = std::max(worst, std::abs(inv.pi[i] - v(i)));
  c.require(worst <= 1e-10, "max entry gap " + fmt(worst) + " exceeds 1e-10");
  c.near(inv.pi[0], 1.0 / 3.0, 1e-12, "hub mass");
}

// 3. jump-prop12 preset: the fitted exact-distance slope must reach the
// "no-slower" verdict against the predicted exponent 1 with slack 0.1.
void c3(Check& c) {
  const presets::Preset* p = presets::find("jump-prop12");
  c.require(p != nullptr, "preset jump-prop12 missing");
  if (p == nullptr) return;
  const auto bundle = runner::run(cfg::parse_config_text(p->config_text));
  c.require(bundle.exit_status == runner::kExitOk,
            "exit status " + std::to_string(bundle.exit_status));
  const auto& cmp = bundle.summary.at("comparison");
  c.require(cmp.at("verdict").get<std::string>() == "no-slower",
            "verdict " + cmp.at("verdict").dump() + ", slope " +
                cmp.at("slope").dump());
}

// 4. Conductance bound for lambda_i = 1/i, m = 1: infimum below 2e-3 over
// i <= 1000, shrinking as the scan range grows, with the obstruction flagged.
void c4(Check& c) {
  const jump::JumpModel model(jump::power_weights(4.0),
                              jump::power_rates(1.0, 1.0));
  const auto rep = model.conductance_obstruction(1.0, 1, 1000);
  c.require(rep.infimum < 0.002, "infimum " + fmt(rep.infimum));
  c.require(rep.decreasing, "bound not monotone over the scanned states");
  c.require(rep.obstruction, "obstruction not flagged");
  const double i10 = model.conductance_obstruction(1.0, 1, 10).infimum;
  const double i100 = model.conductance_obstruction(1.0, 1, 100).infimum;
  c.require(i10 > i100 && i100 > rep.infimum,
            "infimum not decreasing with range: " + fmt(i10) + ", " +
                fmt(i100) + ", " + fmt(rep.infimum));
}

// 5. Drift certificates: the polynomial-weight jump model at beta = 2 with
// C = {0}, and the storage process with k = 4 at order 2 on the log grid.
void c5(Check& c) {
  const jump::JumpModel model(jump::power_weights(4.0),
                              jump::power_rates(1.0, 1.0));
  const auto jcert = model.drift_certificate(2.0);
  c.require(jcert.certified(), "jump certificate: " + jcert.reason);
  c.require(jcert.v_level < 2.0,
            "small set extends past the hub (v_level " + fmt(jcert.v_level) + ")");
  c.require(jcert.rows.size() == 9,
            std::to_string(jcert.rows.size()) + " grid rows, want 9");
  for (const auto& row : jcert.rows)
    c.require(row.c > 0, "c <= 0 at eta=" + fmt(row.eta));

  const cpou::CPOUModel storage(1.0, 1.0, cpou::pareto_log(4.0));
  std::vector<double> grid(60);
  const double lo = std::log(std::exp(2.0)), hi = std::log(1e6);
  for (int i = 0; i < 60; ++i)
    grid[i] = std::exp(lo + (hi - lo) * i / 59.0);
  const auto scert = storage.lemma18_certificate(2.0, grid);
  c.require(scert.certified(), "storage certificate: " + scert.reason);
  for (const auto& row : scert.rows)
    c.require(row.c > 0, "storage c <= 0 at eta=" + fmt(row.eta));
}

// 6. Storage-process generator: exact point-mass identity, then quadrature
// jump integrals against 1e6-sample Monte Carlo on ten (V, x) cases.
void c6(Check& c) {
  proc::DriftFunction identity;
  identity.value = [](std::span<const double> x) { return x[0]; };
  identity.derivative = [](double) { return 1.0; };
  identity.growth = proc::DriftFunction::Growth::Linear;
  identity.label = "x";

  proc::DriftFunction bounded;
  bounded.value = [](std::span<const double> x) { return std::exp(-x[0]); };
  bounded.derivative = [](double x) { return -std::exp(-x); };
  bounded.growth = proc::DriftFunction::Growth::Bounded;
  bounded.label = "exp(-x)";

  {
    const cpou::CPOUModel m(1.0, 2.0, cpou::point_mass(1.0));
    const double x = 3.0;
    const double a = m.generator_apply(identity, std::span<const double>(&x, 1));
    c.require(a == -1.0, "point-mass identity generator: got " + fmt(a));
  }

  struct Case {
    cpou::JumpLaw law;
    proc::DriftFunction v;
  };
  std::vector<Case> cases;
  for (double r : {1.3, 1.7, 2.1, 2.4})
    cases.push_back({cpou::pareto_log(6.0), cpou::log_power_lyapunov(r)});
  cases.push_back({cpou::log_weibull(1.5), identity});
  cases.push_back({cpou::log_weibull(1.5), cpou::log_power_lyapunov(2.0)});
  cases.push_back({cpou::log_weibull(1.5), bounded});
  cases.push_back({cpou::point_mass(2.0), identity});
  cases.push_back({cpou::pareto_log(6.0), bounded});
  cases.push_back({cpou::pareto_log(3.0), cpou::log_power_lyapunov(1.5)});

  rng::SplitMix64 xdraw(20260823u);
  constexpr std::size_t n = 1000000;
  std::vector<double> sample(n);
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& cs = cases[k];
    const cpou::CPOUModel m(1.0, 1.0, cs.law);
    const double x = 0.5 + 7.5 * xdraw.uniform();
    const double a = m.generator_apply(cs.v, std::span<const double>(&x, 1));
    const double jump_quad = a + x * cs.v.derivative(x);

    rng::SplitMix64 g(rng::substream_seed(6001, k));
    const double vx = cs.v.value(std::span<const double>(&x, 1));
    for (std::size_t i = 0; i < n; ++i) {
      const double y = x + cs.law.sample(g);
      sample[i] = cs.v.value(std::span<const double>(&y, 1)) - vx;
    }
    const auto est = proc::reduce_sample(sample);
    const double tol = std::max(4.0 * est.ci_halfwidth, 1e-10);
    c.near(jump_quad, est.mean, tol,
           "case " + std::to_string(k) + " (" + cs.law.describe() + ", " +
               cs.v.label + ", x=" + fmt(x) + ")");
  }
}

// 7. Hitting-time survival: 1e5 exact storage paths from x0 = 2 against the
// closed-form lower bound for C = [0, 1], within four CI half-widths.
void c7(Check& c) {
  const cpou::CPOUModel m(1.0, 1.0, cpou::pareto_log(3.0));
  constexpr std::size_t n = 100000;
  const double horizon = 5.0;
  proc::HittingQuery query;
  query.inside = [](std::span<const double> x) { return x[0] <= 1.0; };
  query.interval = {0.0, 1.0};

  std::vector<double> hit(n, -1.0);
  proc::parallel_for(n, [&](std::size_t i) {
    const auto path = m.simulate_exact(2.0, horizon, rng::substream_seed(7001, i));
    if (const auto t = proc::hitting_time(path, query)) hit[i] = *t;
  });

  for (double t : {1.0, 2.0, 5.0}) {
    std::size_t alive = 0;
    for (double h : hit)
      if (h < 0 || h > t) ++alive;
    const double phat = static_cast<double>(alive) / n;
    const double ci = kZ95 * std::sqrt(phat * (1.0 - phat) / n);
    const double bound = m.survival_lower_bound(t);
    c.require(phat >= bound - 4.0 * ci,
              "t=" + fmt(t) + ": MC " + fmt(phat) + " below bound " +
                  fmt(bound) + " - 4*" + fmt(ci));
  }
}

// 8. Heavy-tail classifier verdicts for the four reference jump laws.
void c8(Check& c) {
  using cpou::Obstruction;
  const auto v1 = cpou::heavy_tail_classify(cpou::pareto_log(1.5));
  c.require(v1.verdict == Obstruction::NotPositiveRecurrent,
            "pareto-log(1.5): " + v1.reason);
  const auto v2 = cpou::heavy_tail_classify(cpou::pareto_log(3.0));
  c.require(v2.verdict == Obstruction::NotGeometric, "pareto-log(3): " + v2.reason);
  c.require(v2.log_mean_finite, "pareto-log(3) log mean not finite");
  const auto v3 = cpou::heavy_tail_classify(cpou::point_mass(2.0));
  c.require(v3.verdict == Obstruction::NoObstruction, "point mass: " + v3.reason);
  const auto v4 = cpou::heavy_tail_classify(cpou::log_weibull(0.5));
  c.require(v4.verdict == Obstruction::NotGeometric, "log-weibull(0.5): " + v4.reason);
}

// 9. Overdamped diffusion consistency: numeric elliptic operator against the
// closed tail form, the exact rate exponent at kappa = 0, and the drift
// inequality index for rho = 1/2.
void c9(Check& c) {
  const langevin::LangevinModel m(langevin::polynomial_target(1, 0.25), 0.0);
  const auto v = m.lyapunov(0.5);
  for (int i = 0; i <= 20; ++i) {
    const double r = 5.0 * std::pow(20.0, i / 20.0);
    for (double sign : {1.0, -1.0}) {
      const double x = sign * r;
      const double num = m.elliptic_apply(v, std::span<const double>(&x, 1));
      const double closed = m.lyapunov_tail_form(0.5, r);
      c.require(std::abs(num / closed - 1.0) <= 1e-3,
                "operator mismatch at x=" + fmt(x) + ": " + fmt(num) + " vs " +
                    fmt(closed));
    }
  }

  const auto cls = langevin::theorem16_classify(0.25, 0.25, 0.0, 0.0);
  c.require(cls.regime == langevin::Regime::Cold, "regime not cold");
  c.require(cls.tau == 1.5, "exponent supremum " + fmt(cls.tau) + ", want 1.5");

  std::vector<double> radii;
  for (double r = 2.2; r < 2e4; r *= 1.5) radii.push_back(r);
  const auto scan = m.drift_inequality_scan(0.5, radii);
  c.require(scan.alpha == 1.0, "scan alpha " + fmt(scan.alpha));
  c.require(scan.verdict == "holds", "scan verdict: " + scan.verdict);
}

// 10. Sampling accuracy: 1e4 trajectories to T = 50 reproduce the stationary
// average of 1/(1+x^2) within four CI half-widths, and adding temperature
// d = 1/8 does not move the T = 10 snapshot further from it.
void c10(Check& c) {
  const auto target = langevin::polynomial_target(1, 0.25);
  const auto f = [](double x) { return 1.0 / (1.0 + x * x); };
  const double pif =
      2.0 *
      quad::integrate_upper(
          [&](double x) {
            return f(x) * target.density(std::span<const double>(&x, 1));
          },
          0.0)
          .value;

  constexpr std::size_t n = 10000;
  const double x0 = 3.0;
  const std::vector<double> times = {10.0, 50.0};
  const auto mean_ci = [&](const proc::Ensemble& e, std::size_t ti) {
    std::vector<double> vals(e.n);
    for (std::size_t i = 0; i < e.n; ++i) vals[i] = f(e.at(i, ti));
    const auto est = proc::reduce_sample(vals);
    return std::pair<double, double>{est.mean, est.ci_halfwidth};
  };

  const langevin::LangevinModel cold(target, 0.0, 2e-3);
  const auto cold_ens = proc::ensemble_snapshot(
      cold, std::span<const double>(&x0, 1), times, n, 10001u);
  const auto [cold50, ci50] = mean_ci(cold_ens, 1);
  c.near(cold50, pif, 4.0 * ci50, "ensemble mean at T=50");

  const langevin::LangevinModel warm(target, 0.125, 2e-3);
  const auto warm_ens = proc::ensemble_snapshot(
      warm, std::span<const double>(&x0, 1), times, n, 10002u);
  const double d_cold = std::abs(mean_ci(cold_ens, 0).first - pif);
  const double d_warm = std::abs(mean_ci(warm_ens, 0).first - pif);
  c.require(d_warm <= d_cold, "T=10 distance grew with temperature: " +
                                  fmt(d_warm) + " > " + fmt(d_cold));
}

// 11. Property suites: Young splits, rate submultiplicativity, exact power-law
// fits, the storage-process mean ODE, and bitwise preset determinism.
void c11(Check& c) {
  rng::SplitMix64 g(1112u);
  std::size_t young_bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto pair = rates::make_young_pair(g.uniform());
    const double x = 1.0 + 100.0 * g.uniform() * g.uniform();
    const double y = 1.0 + 100.0 * g.uniform() * g.uniform();
    if (pair.psi1(x) * pair.psi2(y) > (x + y) * (1.0 + 1e-12)) ++young_bad;
  }
  c.require(young_bad == 0, std::to_string(young_bad) + " Young violations");

  const rates::RateFunction fams[] = {
      rates::constant_rate(), rates::log_power_rate(2.5),
      rates::log_power_rate(0.7), rates::poly_log_rate(1.5, 1.0),
      rates::subexp_rate(0.8, 0.5)};
  const char* fam_names[] = {"constant", "log-power 2.5", "log-power 0.7",
                             "poly-log", "subexp"};
  for (std::size_t fi = 0; fi < std::size(fams); ++fi) {
    std::size_t bad = 0;
    for (int i = 0; i < 100; ++i) {
      const double s = i == 0 ? 0.0 : 1e-3 * std::pow(10.0, 6.0 * (i - 1) / 98.0);
      for (int j = 0; j < 100; ++j) {
        const double t = j == 0 ? 0.0 : 1e-3 * std::pow(10.0, 6.0 * (j - 1) / 98.0);
        if (fams[fi](s + t) > fams[fi](s) * fams[fi](t) * (1.0 + 1e-12)) ++bad;
      }
    }
    c.require(bad == 0, std::string(fam_names[fi]) + ": " +
                            std::to_string(bad) + " submultiplicativity violations");
  }

  conv::DistanceSeries series;
  series.method = conv::Method::ExactTruncation;
  for (int i = 0; i < 20; ++i) {
    const double t = std::pow(10.0, 2.0 * i / 19.0);
    series.times.push_back(t);
    series.values.push_back(5.0 * std::pow(t, -2.0));
  }
  const auto fit = conv::fit_exponent(series, 1.0, 100.0);
  c.require(std::abs(fit.slope + 2.0) < 1e-9,
            "power-law slope " + fmt(fit.slope));

  {
    // dE[X_t]/dt = lambda u0 - mu E[X_t]; from x0 = 3 with lambda = 2 the
    // mean at t = 2 is 2 + e^{-2}.
    const cpou::CPOUModel m(1.0, 2.0, cpou::point_mass(1.0));
    constexpr std::size_t n = 20000;
    const double x0 = 3.0, t = 2.0;
    std::vector<double> vals(n);
    proc::parallel_for(n, [&](std::size_t i) {
      double out = 0;
      m.simulate_at(std::span<const double>(&x0, 1),
                    std::span<const double>(&t, 1),
                    rng::substream_seed(11004, i), std::span<double>(&out, 1));
      vals[i] = out;
    });
    const auto est = proc::reduce_sample(vals);
    c.near(est.mean, 2.0 + std::exp(-2.0), 4.0 * est.ci_halfwidth,
           "storage mean at t=2");
  }

  for (const auto& preset : presets::catalog()) {
    const auto config = cfg::parse_config_text(preset.config_text);
    const auto b1 = runner::run(config);
    const auto b2 = runner::run(config);
    bool same = b1.summary.dump() == b2.summary.dump() &&
                b1.metadata.dump() == b2.metadata.dump() &&
                b1.gnuplot == b2.gnuplot && b1.exit_status == b2.exit_status &&
                b1.tables.size() == b2.tables.size();
    if (same)
      for (const auto& [name, bytes] : b1.tables) {
        const auto it = b2.tables.find(name);
        if (it == b2.tables.end() || it->second != bytes) same = false;
      }
    c.require(same, preset.name + " reruns differ");
  }
}

struct Criterion {
  int id;
  const char* label;
  void (*fn)(Check&);
};

}  // namespace

int main() {
  setenv("SUBERGO_THREADS", "4", 0);
  const Criterion table[] = {
      {1, "two-state transient distance equals e^{-2t} within 1e-9", c1},
      {2, "invariant law matches the dense null-space oracle", c2},
      {3, "jump-prop12 fitted slope is no slower than exponent 1", c3},
      {4, "conductance infimum below 2e-3 and shrinking, obstruction flagged", c4},
      {5, "drift certificates hold for both reference models", c5},
      {6, "storage generator matches closed form and Monte Carlo", c6},
      {7, "hitting-time survival respects the closed-form lower bound", c7},
      {8, "heavy-tail classifier returns all four exact verdicts", c8},
      {9, "diffusion operator, rate exponent, and drift index are exact", c9},
      {10, "ensemble averages reach the stationary value, hotter is closer", c10},
      {11, "property suites: inequalities, fits, means, determinism", c11},
  };

  int failed = 0;
  for (const auto& crit : table) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.fn(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (check.ok) {
      std::printf("[PASS] criterion %d: %s (%lld ms)\n", crit.id, crit.label,
                  static_cast<long long>(ms));
    } else {
      ++failed;
      std::printf("[FAIL] criterion %d: %s (%lld ms): %s\n", crit.id,
                  crit.label, static_cast<long long>(ms),
                  check.detail.str().c_str());
    }
    std::fflush(stdout);
  }
  if (failed > 0) std::printf("%d of 11 criteria failed\n", failed);
  return failed;
}
