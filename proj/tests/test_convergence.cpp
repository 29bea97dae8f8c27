// Distance-to-equilibrium series: weighted L1 distances, Monte Carlo gap
// lower bounds, log-log exponent fits, and the directional comparison with a
// predicted decay exponent.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "subergo/convergence.hpp"
#include "subergo/montecarlo.hpp"

using namespace subergo;
using conv::DistanceSeries;
using conv::Method;
using conv::Verdict;

namespace {

// 4 scalar trajectories on times {0, 1}: all start at 0, land on 1..4.
proc::Ensemble small_ensemble() {
  proc::Ensemble e;
  e.times = {0.0, 1.0};
  e.dim = 1;
  e.n = 4;
  e.states = {0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0};
  return e;
}

DistanceSeries power_series(double amp, double expo, int count, double t_lo,
                            double t_hi) {
  DistanceSeries s;
  for (int i = 0; i < count; ++i) {
    const double t =
        t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
    s.times.push_back(t);
    s.values.push_back(amp * std::pow(t, expo));
  }
  return s;
}

}  // namespace

TEST_CASE("method and verdict names") {
  CHECK(conv::method_name(Method::ExactTruncation) == "exact-truncation");
  CHECK(conv::method_name(Method::McFnorm) == "mc-fnorm");
  CHECK(conv::method_name(Method::McMomentGap) == "mc-moment-gap");
  CHECK(conv::verdict_name(Verdict::NoSlower) == "no-slower");
  CHECK(conv::verdict_name(Verdict::Inconclusive) == "inconclusive");
  CHECK(conv::verdict_name(Verdict::Contradiction) == "contradiction");
}

TEST_CASE("weighted distance between laws on a shared support") {
  static constexpr double mu[2] = {0.5, 0.5};
  static constexpr double pi[2] = {1.0, 0.0};
  CHECK(conv::fnorm_distance(mu, pi) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(conv::fnorm_distance(mu, mu) == 0.0);

  static constexpr double mu2[2] = {0.25, 0.75};
  static constexpr double pi2[2] = {0.75, 0.25};
  static constexpr double f[2] = {1.0, 3.0};
  CHECK(conv::fnorm_distance(mu2, pi2, f) ==
        doctest::Approx(2.0).epsilon(1e-15));

  static constexpr double three[3] = {0.2, 0.3, 0.5};
  CHECK_THROWS_AS((void)conv::fnorm_distance(mu, three), std::invalid_argument);
  static constexpr double f1[1] = {1.0};
  CHECK_THROWS_AS(
      (void)conv::fnorm_distance(std::span<const double>(mu, 2),
                                 std::span<const double>(pi, 2),
                                 std::span<const double>(f1, 1)),
      std::invalid_argument);
}

TEST_CASE("monte carlo gap lower bound") {
  const proc::Ensemble e = small_ensemble();

  SUBCASE("constant basis function has zero gap and zero width") {
    std::vector<conv::BasisFunction> basis(1);
    basis[0].g = [](std::span<const double>) { return 1.0; };
    basis[0].pi_value = 1.0;
    basis[0].label = "one";
    const auto gap = conv::mc_fnorm_gap(e, 1, basis, nullptr);
    CHECK(gap.value == 0.0);
    CHECK(gap.ci == 0.0);
    CHECK(gap.argmax == 0);
    CHECK(gap.label == "one");
  }

  SUBCASE("centered basis sees no gap; shifted target sees the mean") {
    std::vector<conv::BasisFunction> basis(1);
    basis[0].g = [](std::span<const double> x) { return x[0]; };
    basis[0].pi_value = 2.5;
    basis[0].label = "x";
    const auto null_gap = conv::mc_fnorm_gap(e, 1, basis, nullptr);
    CHECK(null_gap.value == doctest::Approx(0.0).epsilon(1e-15));

    basis[0].pi_value = 0.0;
    const auto gap = conv::mc_fnorm_gap(e, 1, basis, nullptr);
    CHECK(gap.value == doctest::Approx(2.5).epsilon(1e-14));
    // sample variance of {1,2,3,4} is 5/3; single-function z is 1.96.
    CHECK(gap.ci ==
          doctest::Approx(1.9599639845400542 * std::sqrt(5.0 / 12.0))
              .epsilon(1e-12));
  }

  SUBCASE("bonferroni across a two-function basis") {
    std::vector<conv::BasisFunction> basis(2);
    basis[0].g = [](std::span<const double> x) { return x[0]; };
    basis[0].pi_value = 0.0;
    basis[0].label = "x";
    basis[1].g = [](std::span<const double> x) { return 2.0 * x[0]; };
    basis[1].pi_value = 0.0;
    basis[1].label = "2x";
    const auto gap = conv::mc_fnorm_gap(e, 1, basis, nullptr);
    CHECK(gap.argmax == 1);
    CHECK(gap.label == "2x");
    CHECK(gap.value == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(gap.ci ==
          doctest::Approx(2.2414027276049454 * std::sqrt(20.0 / 12.0))
              .epsilon(1e-12));
  }

  SUBCASE("domination spot check") {
    std::vector<conv::BasisFunction> basis(1);
    basis[0].g = [](std::span<const double> x) { return 2.0 * x[0]; };
    basis[0].pi_value = 0.0;
    basis[0].label = "2x";
    const auto f = [](std::span<const double> x) { return std::abs(x[0]); };
    CHECK_THROWS_AS((void)conv::mc_fnorm_gap(e, 1, basis, f),
                    std::invalid_argument);
    // the same basis passes under a large enough envelope
    const auto f10 = [](std::span<const double> x) {
      return 10.0 * std::abs(x[0]) + 1.0;
    };
    CHECK_NOTHROW((void)conv::mc_fnorm_gap(e, 1, basis, f10));
  }

  SUBCASE("argument validation") {
    std::vector<conv::BasisFunction> basis(1);
    basis[0].g = [](std::span<const double>) { return 1.0; };
    CHECK_THROWS_AS((void)conv::mc_fnorm_gap(e, 2, basis, nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)conv::mc_fnorm_gap(e, 0, {}, nullptr),
                    std::invalid_argument);
    proc::Ensemble tiny;
    tiny.times = {0.0};
    tiny.n = 1;
    tiny.states = {1.0};
    CHECK_THROWS_AS((void)conv::mc_fnorm_gap(tiny, 0, basis, nullptr),
                    std::invalid_argument);
  }
}

TEST_CASE("log-log exponent fit") {
  SUBCASE("exact power law is recovered to rounding") {
    const DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    const auto fit = conv::fit_exponent(s, 1.0, 100.0);
    CHECK(fit.points == 20);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(fit.stderr_slope <= 1e-12);
    CHECK(fit.residual_rms <= 1e-12);
    CHECK(fit.t_lo == 1.0);
    CHECK(fit.t_hi == 100.0);
  }

  SUBCASE("default window drops the earliest fifth") {
    const DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    const auto fit = conv::fit_exponent(s);
    CHECK(fit.points == 16);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  }

  SUBCASE("points within 100x of the exact error floor are dropped") {
    DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    s.method = Method::ExactTruncation;
    s.error_floor = 1e-4;
    // 5 t^-2 >= 1e-2 holds through t = 10^(24/19), the 13th grid point.
    const auto fit = conv::fit_exponent(s);
    CHECK(fit.points == 9);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  }

  SUBCASE("monte carlo series use per-point widths as the floor") {
    DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    s.method = Method::McFnorm;
    s.ci.assign(20, 1e-6);
    s.ci[19] = 1.0;
    const auto fit = conv::fit_exponent(s);
    CHECK(fit.points == 15);
  }

  SUBCASE("five percent noise moves the slope by under 0.05") {
    DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    for (std::size_t i = 0; i < s.values.size(); ++i)
      s.values[i] *= 1.0 + 0.01 * std::sin(static_cast<double>(i));
    const auto fit = conv::fit_exponent(s, 1.0, 100.0);
    CHECK(fit.slope > -2.05);
    CHECK(fit.slope < -1.95);
    CHECK(fit.stderr_slope > 0.0);
  }

  SUBCASE("constant series has zero slope") {
    DistanceSeries s = power_series(3.0, 0.0, 10, 1.0, 50.0);
    const auto fit = conv::fit_exponent(s, 1.0, 50.0);
    CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }

  SUBCASE("rejections") {
    const DistanceSeries s = power_series(5.0, -2.0, 20, 1.0, 100.0);
    CHECK_THROWS_AS((void)conv::fit_exponent(s, 1.0, 1.5),
                    std::invalid_argument);

    DistanceSeries neg = s;
    neg.values[10] = 0.0;
    CHECK_THROWS_AS((void)conv::fit_exponent(neg, 1.0, 100.0),
                    std::invalid_argument);

    DistanceSeries bad = s;
    bad.times[3] = bad.times[2];
    CHECK_THROWS_AS((void)conv::fit_exponent(bad, 1.0, 100.0),
                    std::invalid_argument);

    DistanceSeries empty;
    CHECK_THROWS_AS((void)conv::fit_exponent(empty), std::invalid_argument);

    DistanceSeries ragged = s;
    ragged.values.pop_back();
    CHECK_THROWS_AS((void)conv::fit_exponent(ragged, 1.0, 100.0),
                    std::invalid_argument);

    DistanceSeries zero = power_series(1.0, -1.0, 6, 1.0, 10.0);
    zero.times[0] = 0.0;
    for (std::size_t i = 1; i < 6; ++i) zero.times[i] = static_cast<double>(i);
    CHECK_THROWS_AS((void)conv::fit_exponent(zero, 0.0, 10.0),
                    std::invalid_argument);
  }
}

TEST_CASE("comparison against a predicted exponent") {
  conv::ExponentFit fit;
  fit.stderr_slope = 0.05;

  fit.slope = -2.2;
  auto cmp = conv::compare_to_prediction(fit, 2.0, 0.1);
  CHECK(cmp.verdict == Verdict::NoSlower);
  CHECK(cmp.half == doctest::Approx(0.1));
  CHECK(cmp.text.find("no-slower") != std::string::npos);

  fit.slope = -1.5;
  cmp = conv::compare_to_prediction(fit, 2.0, 0.1);
  CHECK(cmp.verdict == Verdict::Contradiction);

  fit.stderr_slope = 0.1;
  fit.slope = -1.95;
  cmp = conv::compare_to_prediction(fit, 2.0, 0.1);
  CHECK(cmp.verdict == Verdict::Inconclusive);

  // boundary counts as no-slower
  fit.stderr_slope = 0.05;
  fit.slope = -2.0;
  cmp = conv::compare_to_prediction(fit, 2.0, 0.1);
  CHECK(cmp.verdict == Verdict::NoSlower);

  CHECK_THROWS_AS((void)conv::compare_to_prediction(fit, 0.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)conv::compare_to_prediction(fit, -1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)conv::compare_to_prediction(fit, 2.0, -0.1),
                  std::invalid_argument);

  const auto cj = conv::comparison_json(cmp);
  CHECK(cj.at("verdict").get<std::string>() == "no-slower");
  CHECK(cj.at("predicted_exponent").get<double>() == 2.0);
  CHECK(cj.at("two_sigma").get<double>() == doctest::Approx(0.1));
  CHECK(cj.contains("text"));

  const auto fj = conv::fit_json(fit);
  CHECK(fj.at("slope").get<double>() == -2.0);
  CHECK(fj.contains("intercept"));
  CHECK(fj.contains("stderr"));
  CHECK(fj.contains("residual_rms"));
  CHECK(fj.at("window").is_array());
  CHECK(fj.contains("points"));
}

TEST_CASE("series serialization is byte-stable") {
  DistanceSeries s;
  s.times = {1.0, 2.0};
  s.values = {0.5, 0.25};
  s.method = Method::ExactTruncation;
  CHECK(conv::series_csv(s) ==
        "t,value,ci,method\n"
        "1,0.5,0,exact-truncation\n"
        "2,0.25,0,exact-truncation\n");

  s.method = Method::McFnorm;
  s.ci = {0.125, 0.0625};
  const std::string csv = conv::series_csv(s);
  CHECK(csv ==
        "t,value,ci,method\n"
        "1,0.5,0.125,mc-fnorm\n"
        "2,0.25,0.0625,mc-fnorm\n");
  CHECK(conv::series_csv(s) == csv);
}
