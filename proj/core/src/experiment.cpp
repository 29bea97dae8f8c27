#include "subergo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subergo/convergence.hpp"
#include "subergo/cpou.hpp"
#include "subergo/drift.hpp"
#include "subergo/jump.hpp"
#include "subergo/langevin.hpp"
#include "subergo/montecarlo.hpp"
#include "subergo/path.hpp"
#include "subergo/quadrature.hpp"
#include "subergo/rates.hpp"
#include "subergo/rng.hpp"
#include "subergo/version.hpp"

namespace subergo::runner {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw cfg::ConfigError(field + ": " + why);
}

const char* status_name(drift::Status s) {
  switch (s) {
    case drift::Status::Certified: return "certified";
    case drift::Status::NotCertified: return "not-certified";
    case drift::Status::Refused: return "refused";
  }
  return "unknown";
}

json series_value_json(const jump::SeriesValue& s) {
  return json{{"finite", s.finite}, {"value", s.value}, {"tail_bound", s.tail_bound}};
}

int verdict_exit(conv::Verdict v) {
  switch (v) {
    case conv::Verdict::NoSlower: return kExitOk;
    case conv::Verdict::Contradiction: return kExitRefused;
    case conv::Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

// Time grid: explicit action.times, else t_from/t_to/t_count with linear or
// log spacing.
std::vector<double> time_grid(const cfg::ExperimentConfig& c) {
  std::vector<double> ts = c.nums("action", "times");
  if (!ts.empty()) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!(ts[i] > 0) || !std::isfinite(ts[i]))
        bad("action.times", "entries must be positive and finite");
      if (i > 0 && !(ts[i] > ts[i - 1]))
        bad("action.times", "entries must be strictly increasing");
    }
    return ts;
  }
  const double from = c.num("action", "t_from", 1.0);
  const double to = c.num("action", "t_to", 10.0);
  const long count = c.integer("action", "t_count", 20);
  const std::string spacing = c.str("action", "t_spacing", "linear");
  if (!(from > 0)) bad("action.t_from", "must be positive");
  if (!(to > from)) bad("action.t_to", "must exceed t_from");
  if (count < 2) bad("action.t_count", "needs at least two points");
  if (spacing != "linear" && spacing != "log")
    bad("action.t_spacing", "must be \"linear\" or \"log\"");
  ts.resize(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(count - 1);
    ts[static_cast<std::size_t>(i)] =
        spacing == "log" ? std::exp(std::log(from) + w * (std::log(to) - std::log(from)))
                         : from + w * (to - from);
  }
  ts.front() = from;
  ts.back() = to;
  return ts;
}

// Log-spaced state grid from grid_from/grid_to/grid_count.
std::vector<double> state_grid(const cfg::ExperimentConfig& c, double def_from,
                               double def_to, long def_count) {
  const double from = c.num("action", "grid_from", def_from);
  const double to = c.num("action", "grid_to", def_to);
  const long count = c.integer("action", "grid_count", def_count);
  if (!(from > 0) || !std::isfinite(from)) bad("action.grid_from", "must be positive and finite");
  if (!(to > from) || !std::isfinite(to)) bad("action.grid_to", "must exceed grid_from");
  if (count < 2) bad("action.grid_count", "needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(count - 1);
    xs[static_cast<std::size_t>(i)] =
        std::exp(std::log(from) + w * (std::log(to) - std::log(from)));
  }
  xs.front() = from;
  xs.back() = to;
  return xs;
}

jump::JumpModel make_jump(const cfg::ExperimentConfig& c) {
  const std::string w = c.str("model", "weights", "geometric");
  jump::WeightFamily wf =
      w == "geometric" ? jump::geometric_weights(c.num("model", "weight_param", 0.5))
                       : jump::power_weights(c.num("model", "weight_param", 2.0));
  const std::string r = c.str("model", "rates", "constant");
  const double rc = c.num("model", "rate_c", 1.0);
  jump::RateDecay rd =
      r == "constant"
          ? jump::constant_rates(rc)
          : (r == "geometric" ? jump::geometric_rates(rc, c.num("model", "rate_param", 0.5))
                              : jump::power_rates(rc, c.num("model", "rate_param", 1.0)));
  return jump::JumpModel(wf, rd);
}

langevin::LangevinModel make_langevin(const cfg::ExperimentConfig& c) {
  const int n = static_cast<int>(c.integer("model", "dimension", 1));
  const double beta = c.num("model", "beta", 0.25);
  return langevin::LangevinModel(langevin::polynomial_target(n, beta),
                                 c.num("model", "temperature", 0.0),
                                 c.num("model", "step_scale", 1e-3),
                                 c.num("model", "bridge_radius", 2.0));
}

cpou::CPOUModel make_cpou(const cfg::ExperimentConfig& c) {
  const std::string fam = c.str("model", "jump_family", "point-mass");
  cpou::JumpLaw law;
  if (fam == "point-mass")
    law = cpou::point_mass(c.num("model", "jump_param", 1.0));
  else if (fam == "pareto-log")
    law = cpou::pareto_log(c.num("model", "jump_param", 4.0));
  else
    law = cpou::log_weibull(c.num("model", "jump_param", 0.5));
  return cpou::CPOUModel(c.num("model", "mu", 1.0), c.num("model", "lambda", 1.0),
                         std::move(law), c.num("numeric", "quad_tol", 1e-8));
}

std::string series_plot(const std::string& csv, const std::string& ylabel,
                        const conv::ExponentFit* fit) {
  std::string g;
  g += "set datafile separator ','\n";
  g += "set logscale xy\n";
  g += "set xlabel 't'\n";
  g += "set ylabel '" + ylabel + "'\n";
  g += "set key left bottom\n";
  g += "plot '" + csv + "' skip 1 using 1:2 with linespoints pt 7 title 'measured'";
  if (fit != nullptr)
    g += ", \\\n     exp(" + num(fit->intercept) + ") * x**(" + num(fit->slope) +
         ") title 'fitted slope " + num(fit->slope) + "'";
  g += "\n";
  return g;
}

// Scalar start state from action.x0 (single-entry array), with a default.
double scalar_x0(const cfg::ExperimentConfig& c, double fallback) {
  const std::vector<double> xs = c.nums("action", "x0");
  if (xs.empty()) return fallback;
  if (xs.size() != 1) bad("action.x0", "expected a single start state");
  return xs[0];
}

// Shared ladder construction: rungs V^(q alpha) with floors c_q V^((q-1) alpha)
// taken from per-exponent certified decay constants.
drift::NestedSpec build_ladder(const proc::DriftFunction& V, double alpha, int p,
                               const std::vector<double>& cs, double beta_hit,
                               std::vector<std::vector<double>> domain) {
  drift::NestedSpec spec;
  for (int q = 1; q <= p; ++q) {
    const double eta_q = q == p ? 1.0 : static_cast<double>(q) * alpha;
    spec.ladder.push_back(proc::pow_of(V, eta_q, 1));
    proc::DriftFunction f;
    const double cq = cs[static_cast<std::size_t>(q - 1)];
    const double e = static_cast<double>(q - 1) * alpha;
    const auto base = V.value;
    f.value = [base, cq, e](std::span<const double> x) {
      return cq * std::pow(base(x), e);
    };
    f.label = "c_" + std::to_string(q) + " V^" + num(e);
    spec.floors.push_back(std::move(f));
  }
  spec.beta = beta_hit;
  spec.domain = std::move(domain);
  return spec;
}

// Start states for the advisory hitting-moment check: action.x0 entries (each
// a scalar state), else the given defaults.
std::vector<std::vector<double>> hitting_starts(const cfg::ExperimentConfig& c,
                                                std::vector<double> defaults) {
  std::vector<double> xs = c.nums("action", "x0");
  if (xs.empty()) xs = std::move(defaults);
  std::vector<std::vector<double>> starts;
  starts.reserve(xs.size());
  for (double x : xs) starts.push_back({x});
  return starts;
}

void finish_nested(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const proc::ProcessModel& model, const drift::NestedSpec& spec) {
  drift::NestedCertificate ncert = drift::verify_nested(model, spec);
  if (ncert.certified()) {
    const long n = c.integer("numeric", "n", 2000);
    const double horizon = c.num("action", "horizon", 50.0);
    const auto starts = hitting_starts(
        c, c.model_kind() == "cpou" ? std::vector<double>{2.0} : std::vector<double>{1.0, 2.0});
    ncert.mc_floor_report =
        drift::mc_floor_check(model, spec, ncert, starts,
                              static_cast<std::size_t>(std::max<long>(n, 0)), horizon, c.seed());
  }
  b.tables["nested_certificate.json"] = ncert.to_json().dump(2) + "\n";
  json rungs = json::array();
  for (const auto& r : ncert.rungs)
    rungs.push_back(json{{"q", r.q},
                         {"worst_margin", r.worst_margin},
                         {"ladder_c", r.ladder_c}});
  b.summary["nested"] = json{{"status", status_name(ncert.status)},
                             {"p", ncert.p},
                             {"beta", ncert.beta},
                             {"v_level", ncert.v_level},
                             {"b", ncert.b},
                             {"rungs", rungs},
                             {"mc_floor_report", ncert.mc_floor_report},
                             {"reason", ncert.reason}};
  b.exit_status = ncert.certified() ? kExitOk : kExitRefused;
}

// ---------------------------------------------------------------- jump ----

void jump_simulate(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const jump::JumpModel& model) {
  const auto times = time_grid(c);
  const double x0 = scalar_x0(c, 0.0);
  if (!(x0 >= 0) || x0 != std::floor(x0)) bad("action.x0", "jump states are integers >= 0");
  const std::vector<double> start{x0};
  const proc::Path path = model.simulate(start, times.back(), c.seed());
  std::string csv = "t,state\n";
  for (double t : times) csv += num(t) + "," + num(path.scalar(t)) + "\n";
  b.tables["trajectory.csv"] = csv;
  b.summary["transitions"] = path.segments().size() - 1;
  b.summary["horizon"] = times.back();
  b.gnuplot =
      "set datafile separator ','\nset xlabel 't'\nset ylabel 'state'\n"
      "plot 'trajectory.csv' skip 1 using 1:2 with steps title 'trajectory'\n";
}

void jump_drift_check(const cfg::ExperimentConfig& c, ResultBundle& b,
                      const jump::JumpModel& model) {
  const double beta = c.num("action", "order", 2.0);
  const long grid_n = c.integer("action", "grid_n", 4000);
  const long eta_count = c.integer("action", "eta_count", 9);
  if (grid_n < 8) bad("action.grid_n", "grid too small");
  if (eta_count < 1) bad("action.eta_count", "needs at least one exponent");
  const drift::DriftCertificate cert =
      model.drift_certificate(beta, static_cast<int>(eta_count), grid_n);
  b.tables["certificate.json"] = cert.to_json().dump(2) + "\n";
  b.summary["certificate"] = json{{"status", status_name(cert.status)},
                                  {"alpha", cert.alpha},
                                  {"v_level", cert.v_level},
                                  {"b", cert.b},
                                  {"scope", cert.scope},
                                  {"reason", cert.reason},
                                  {"exponents", cert.rows.size()}};
  b.exit_status = cert.certified() ? kExitOk : kExitRefused;
}

void jump_nested_check(const cfg::ExperimentConfig& c, ResultBundle& b,
                       const jump::JumpModel& model) {
  const double order = c.num("action", "order", 2.0);
  if (order < 2.0 || std::abs(order - std::round(order)) > 1e-9)
    bad("action.order", "nested-check needs an integer order >= 2");
  const int p = static_cast<int>(std::lround(order));
  const double beta = static_cast<double>(p);
  const double alpha = 1.0 / beta;
  const jump::SeriesValue mom = model.weight_moment(beta);
  if (!mom.finite) {
    b.summary["nested"] = json{{"status", "refused"},
                               {"reason", "sum p_i lambda_i^{-beta} diverges at beta=" + num(beta)}};
    b.exit_status = kExitRefused;
    return;
  }
  const long grid_n = c.integer("action", "grid_n", 4000);
  if (grid_n < 8) bad("action.grid_n", "grid too small");
  const jump::RateDecay lam = model.rates();
  const double cv = 2.0 * std::pow(lam.sup_spoke(), beta);
  proc::DriftFunction V;
  V.label = "V(i) = lambda_i^{-beta} / c, beta=" + num(beta);
  V.value = [lam, beta, cv](std::span<const double> x) {
    const long i = std::lround(x[0]);
    if (i <= 0) return 1.0;
    return cv * std::pow(lam.lambda(i), -beta);
  };
  std::vector<std::vector<double>> domain;
  const long step_upper = std::min<long>(grid_n, 512);
  for (long i = 0; i <= step_upper; ++i) domain.push_back({static_cast<double>(i)});
  for (double gi = static_cast<double>(step_upper) * 1.15;
       gi < static_cast<double>(grid_n); gi *= 1.15)
    domain.push_back({std::floor(gi)});
  if (grid_n > step_upper) domain.push_back({static_cast<double>(grid_n)});

  drift::DriftSpec flat;
  flat.V = V;
  flat.alpha = alpha;
  for (int q = 1; q <= p; ++q)
    flat.eta_grid.push_back(q == p ? 1.0 : static_cast<double>(q) * alpha);
  flat.domain = domain;
  const drift::DriftCertificate cert = drift::verify(model, flat);
  if (!cert.certified()) {
    b.summary["nested"] = json{{"status", status_name(cert.status)},
                               {"reason", "flat certificate failed: " + cert.reason}};
    b.exit_status = kExitRefused;
    return;
  }
  std::vector<double> cs;
  for (const auto& row : cert.rows) cs.push_back(row.c);
  const drift::NestedSpec spec =
      build_ladder(V, alpha, p, cs, c.num("action", "beta_hit", 1.0), std::move(domain));
  finish_nested(c, b, model, spec);
}

void jump_converge(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const jump::JumpModel& model) {
  const double leak_tol = c.num("numeric", "leak_tol", 1e-10);
  const long n = model.choose_truncation(leak_tol);
  const auto times = time_grid(c);
  const double x0 = scalar_x0(c, 0.0);
  if (!(x0 >= 0) || x0 != std::floor(x0)) bad("action.x0", "jump states are integers >= 0");
  const long x = std::lround(x0);
  if (x > n) bad("action.x0", "start state lies beyond the truncation");

  conv::DistanceSeries series;
  series.times = times;
  series.method = conv::Method::ExactTruncation;
  series.norm_label = "total variation (x2)";
  double floor = 0;
  for (double t : times) {
    const jump::Distance d = model.transient_distance(n, x, t);
    series.values.push_back(d.value);
    floor = std::max(floor, d.error_bar);
  }
  series.error_floor = floor;
  b.tables["distance.csv"] = conv::series_csv(series);
  b.summary["truncation"] = n;
  b.summary["error_floor"] = floor;

  const bool have_tau = c.has("action", "tau");
  conv::ExponentFit fit;
  bool fitted = false;
  try {
    fit = conv::fit_exponent(series);
    fitted = true;
    b.summary["fit"] = conv::fit_json(fit);
  } catch (const std::exception& e) {
    b.summary["fit_error"] = e.what();
  }
  b.gnuplot = series_plot("distance.csv", "distance to equilibrium",
                          fitted ? &fit : nullptr);
  if (!have_tau) {
    b.exit_status = kExitOk;
    return;
  }
  const double tau = c.num("action", "tau", 1.0);
  if (!(tau > 0)) bad("action.tau", "predicted exponent must be positive");
  if (!fitted) {
    b.exit_status = kExitInconclusive;
    return;
  }
  const conv::Comparison cmp =
      conv::compare_to_prediction(fit, tau, c.num("action", "slack", 0.1));
  b.summary["comparison"] = conv::comparison_json(cmp);
  b.exit_status = verdict_exit(cmp.verdict);
}

void jump_classify(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const jump::JumpModel& model) {
  const jump::JumpModel::Recurrence rec = model.recurrence();
  b.summary["recurrence"] = json{{"rates_vanish", rec.rates_vanish},
                                 {"mean_return", series_value_json(rec.mean_return)},
                                 {"positive_recurrent", rec.positive_recurrent}};
  if (rec.positive_recurrent) b.summary["pi0"] = model.pi0();
  const double m = c.num("action", "conduct_m", 1.0);
  const long lo = c.integer("action", "conduct_lo", 1);
  const long hi = c.integer("action", "conduct_hi", 1000);
  if (!(m > 0)) bad("action.conduct_m", "mixing window must be positive");
  if (lo < 1 || hi < lo) bad("action.conduct_hi", "need 1 <= conduct_lo <= conduct_hi");
  const jump::ConductanceReport rep = model.conductance_obstruction(m, lo, hi);
  std::string csv = "i,bound,pi_mass\n";
  for (std::size_t j = 0; j < rep.states.size(); ++j)
    csv += num(static_cast<double>(rep.states[j])) + "," + num(rep.bound[j]) + "," +
           num(rep.pi_mass[j]) + "\n";
  b.tables["conductance.csv"] = csv;
  b.summary["conductance"] = json{{"infimum", rep.infimum},
                                  {"decreasing", rep.decreasing},
                                  {"obstruction", rep.obstruction},
                                  {"note", rep.note}};
  b.exit_status = kExitOk;
}

void jump_rates(const cfg::ExperimentConfig& c, ResultBundle& b,
                const jump::JumpModel& model) {
  const std::string kind_str = c.str("action", "rate_kind", "poly");
  jump::JumpModel::RateKind kind;
  if (kind_str == "poly")
    kind = jump::JumpModel::RateKind::Poly;
  else if (kind_str == "logpow")
    kind = jump::JumpModel::RateKind::LogPow;
  else if (kind_str == "subexp")
    kind = jump::JumpModel::RateKind::Subexp;
  else
    bad("action.rate_kind", "must be \"poly\", \"logpow\" or \"subexp\"");
  const double param = kind == jump::JumpModel::RateKind::Subexp
                           ? c.num("action", "z", 1.0)
                           : c.num("action", "order", 2.0);
  const std::vector<double> kappas = c.nums("action", "kappas");
  if (kappas.empty()) bad("action.kappas", "rates action needs a kappa grid");
  jump::PredictionSet set;
  try {
    set = model.predicted_rates(kind, param, kappas);
  } catch (const std::invalid_argument& e) {
    bad("action.kappas", e.what());
  }
  b.summary["admissible"] = set.admissible;
  b.summary["reason"] = set.reason;
  b.summary["moment"] = series_value_json(set.moment);
  if (!set.admissible) {
    b.exit_status = kExitRefused;
    return;
  }
  std::string csv =
      "kappa,rate_poly,rate_log,rate_subexp_a,rate_subexp_b,norm_pow,norm_log,norm_subexp,z\n";
  json texts = json::array();
  for (const auto& e : set.entries) {
    csv += num(e.kappa) + "," + num(e.rate_poly) + "," + num(e.rate_log) + "," +
           num(e.rate_subexp_a) + "," + num(e.rate_subexp_b) + "," + num(e.norm_pow) + "," +
           num(e.norm_log) + "," + (e.norm_subexp ? "1" : "0") + "," + num(e.z) + "\n";
    texts.push_back(e.text);
  }
  b.tables["rates.csv"] = csv;
  b.summary["entries"] = texts;
  b.exit_status = kExitOk;
}

void run_jump(const cfg::ExperimentConfig& c, ResultBundle& b) {
  const jump::JumpModel model = make_jump(c);
  b.metadata["describe"] = model.describe();
  const std::string a = c.action();
  if (a == "simulate")
    jump_simulate(c, b, model);
  else if (a == "drift-check")
    jump_drift_check(c, b, model);
  else if (a == "nested-check")
    jump_nested_check(c, b, model);
  else if (a == "converge")
    jump_converge(c, b, model);
  else if (a == "classify")
    jump_classify(c, b, model);
  else
    jump_rates(c, b, model);
}

// ------------------------------------------------------------- langevin ----

void langevin_simulate(const cfg::ExperimentConfig& c, ResultBundle& b,
                       const langevin::LangevinModel& model) {
  const auto times = time_grid(c);
  const int n = model.dimension();
  std::vector<double> x0 = c.nums("action", "x0");
  if (x0.empty()) x0.assign(static_cast<std::size_t>(n), 0.0);
  if (x0.size() != static_cast<std::size_t>(n))
    bad("action.x0", "expected " + std::to_string(n) + " coordinates");
  std::vector<double> out(times.size() * static_cast<std::size_t>(n));
  try {
    model.simulate_at(x0, times, c.seed(), out);
  } catch (const std::runtime_error& e) {
    b.summary["refusal"] = e.what();
    b.exit_status = kExitRefused;
    return;
  }
  std::string csv = "t";
  for (int k = 1; k <= n; ++k) csv += ",x" + std::to_string(k);
  csv += "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    csv += num(times[i]);
    for (int k = 0; k < n; ++k)
      csv += "," + num(out[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)]);
    csv += "\n";
  }
  b.tables["trajectory.csv"] = csv;
  b.summary["horizon"] = times.back();
  b.gnuplot =
      "set datafile separator ','\nset xlabel 't'\nset ylabel 'x'\n"
      "plot 'trajectory.csv' skip 1 using 1:2 with lines title 'trajectory'\n";
}

void langevin_drift_check(const cfg::ExperimentConfig& c, ResultBundle& b,
                          const langevin::LangevinModel& model) {
  if (!c.has("action", "rho")) bad("action.rho", "drift-check needs the Lyapunov exponent rho");
  const double rho = c.num("action", "rho", 0.0);
  const double r0 = model.bridge_radius();
  const auto radii = state_grid(c, 1.1 * r0, 1e4, 60);
  const langevin::ScanResult scan = model.drift_inequality_scan(rho, radii);
  std::string csv = "radius,ratio,numeric,closed_form\n";
  for (const auto& row : scan.rows)
    csv += num(row.radius) + "," + num(row.ratio) + "," + num(row.numeric) + "," +
           num(row.closed_form) + "\n";
  b.tables["scan.csv"] = csv;
  b.summary["scan"] = json{{"alpha", scan.alpha},
                           {"c", scan.c},
                           {"R", scan.R},
                           {"rho", rho},
                           {"verdict", scan.verdict}};
  b.exit_status = scan.verdict == "holds" ? kExitOk : kExitRefused;
}

void langevin_classify(const cfg::ExperimentConfig& c, ResultBundle& b,
                       const langevin::LangevinModel& model) {
  const langevin::TargetDensity& tgt = model.target();
  const double gamma = tgt.gamma;
  std::vector<double> t_grid = c.nums("action", "t_grid");
  if (t_grid.empty()) t_grid = {10.0, 100.0, 1000.0};
  const double r0 = model.bridge_radius();
  bool did_anything = false;

  if (c.has("action", "temperatures")) {
    const std::vector<double> ds = c.nums("action", "temperatures");
    if (ds.empty()) bad("action.temperatures", "sweep needs at least one value");
    std::string csv = "temperature,growth_exponent,regular,conclusive\n";
    json rows = json::array();
    for (double d : ds) {
      if (!(d >= 0)) bad("action.temperatures", "temperatures must be >= 0");
      const langevin::LangevinModel probe(tgt, d);
      const langevin::RegularityReport rep = probe.regularity_check(r0, t_grid);
      csv += num(d) + "," + num(rep.growth_exponent) + "," + (rep.regular ? "1" : "0") + "," +
             (rep.conclusive ? "1" : "0") + "\n";
      rows.push_back(json{{"temperature", d},
                          {"growth_exponent", rep.growth_exponent},
                          {"regular", rep.regular},
                          {"conclusive", rep.conclusive}});
    }
    b.tables["regularity.csv"] = csv;
    b.summary["regularity_sweep"] = rows;
    b.summary["regularity_boundary"] = 0.5 * (1.0 + gamma);
    did_anything = true;
  }

  if (c.has("action", "kappa")) {
    const double kappa = c.num("action", "kappa", 0.0);
    langevin::Classification cls;
    try {
      cls = langevin::theorem16_classify(tgt.beta, gamma, model.temperature(), kappa);
    } catch (const std::invalid_argument& e) {
      bad("action.kappa", e.what());
    }
    b.summary["classification"] =
        json{{"regime", cls.regime == langevin::Regime::Cold ? "cold" : "geometric"},
             {"uniform", cls.uniform},
             {"tau", cls.tau},
             {"kappa", cls.kappa},
             {"norm", cls.norm_text}};
    did_anything = true;
  }

  if (!did_anything) {
    const langevin::RegularityReport rep = model.regularity_check(r0, t_grid);
    json partials = json::array();
    for (const auto& [t, v] : rep.partials) partials.push_back(json{{"T", t}, {"integral", v}});
    b.summary["regularity"] = json{{"regular", rep.regular},
                                   {"conclusive", rep.conclusive},
                                   {"growth_exponent", rep.growth_exponent},
                                   {"partials", partials},
                                   {"note", rep.note}};
  }
  b.exit_status = kExitOk;
}

void langevin_converge(const cfg::ExperimentConfig& c, ResultBundle& b,
                       const langevin::LangevinModel& model) {
  if (model.dimension() != 1)
    bad("model.dimension", "converge needs the one-dimensional diffusion");
  const langevin::RegularityReport reg =
      model.regularity_check(model.bridge_radius(), std::vector<double>{10.0, 100.0, 1000.0});
  if (reg.conclusive && !reg.regular) {
    b.summary["refusal"] = "diffusion is not well posed at this temperature: " + reg.note;
    b.exit_status = kExitRefused;
    return;
  }
  const auto times = time_grid(c);
  const long nsamp = c.integer("numeric", "n", 10000);
  if (nsamp < 100) bad("numeric.n", "needs at least 100 trajectories");
  std::vector<double> x0 = c.nums("action", "x0");
  if (x0.empty()) x0 = {0.0};
  if (x0.size() != 1) bad("action.x0", "expected a single coordinate");

  const langevin::TargetDensity tgt = model.target();
  auto pi_of = [&tgt](const std::function<double(double)>& g) {
    auto f = [&g, &tgt](double x) {
      const double xs[1] = {x};
      return (g(x) + g(-x)) * tgt.density(std::span<const double>(xs, 1));
    };
    return quad::integrate_upper(f, 0.0, 1e-10).value;
  };
  std::vector<conv::BasisFunction> basis(3);
  basis[0].g = [](std::span<const double> x) { return 1.0 / (1.0 + x[0] * x[0]); };
  basis[0].pi_value = pi_of([](double x) { return 1.0 / (1.0 + x * x); });
  basis[0].label = "1/(1+x^2)";
  basis[1].g = [](std::span<const double> x) { return x[0] / (1.0 + x[0] * x[0]); };
  basis[1].pi_value = pi_of([](double x) { return x / (1.0 + x * x); });
  basis[1].label = "x/(1+x^2)";
  basis[2].g = [](std::span<const double> x) { return std::exp(-std::abs(x[0])); };
  basis[2].pi_value = pi_of([](double x) { return std::exp(-std::abs(x)); });
  basis[2].label = "exp(-|x|)";

  const proc::Ensemble ens = proc::ensemble_snapshot(
      model, x0, times, static_cast<std::size_t>(nsamp), c.seed());
  auto f_one = [](std::span<const double>) { return 1.0; };
  conv::DistanceSeries series;
  series.times = times;
  series.method = conv::Method::McFnorm;
  series.norm_label = "f-norm gap lower bound, f = 1";
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const conv::GapEstimate gap = conv::mc_fnorm_gap(ens, ti, basis, f_one);
    series.values.push_back(gap.value);
    series.ci.push_back(gap.ci);
  }
  b.tables["distance.csv"] = conv::series_csv(series);
  b.summary["trajectories"] = nsamp;

  const bool have_tau = c.has("action", "tau");
  conv::ExponentFit fit;
  bool fitted = false;
  try {
    fit = conv::fit_exponent(series);
    fitted = true;
    b.summary["fit"] = conv::fit_json(fit);
  } catch (const std::exception& e) {
    b.summary["fit_error"] = e.what();
  }
  b.gnuplot = series_plot("distance.csv", "f-norm gap (lower bound)",
                          fitted ? &fit : nullptr);
  if (!have_tau) {
    b.exit_status = kExitOk;
    return;
  }
  if (!fitted) {
    b.exit_status = kExitInconclusive;
    return;
  }
  const double tau = c.num("action", "tau", 1.0);
  if (!(tau > 0)) bad("action.tau", "predicted exponent must be positive");
  const conv::Comparison cmp =
      conv::compare_to_prediction(fit, tau, c.num("action", "slack", 0.1));
  b.summary["comparison"] = conv::comparison_json(cmp);
  b.exit_status = verdict_exit(cmp.verdict);
}

void langevin_rates(const cfg::ExperimentConfig& c, ResultBundle& b,
                    const langevin::LangevinModel& model) {
  const langevin::TargetDensity& tgt = model.target();
  const double gamma = tgt.gamma;
  const double beta = tgt.beta;
  const double d = model.temperature();
  const bool cold = d < beta;
  const double kappa_max = cold ? 1.0 + gamma - 2.0 * beta : 1.0 + gamma - 2.0 * d;
  std::vector<double> kappas = c.nums("action", "kappas");
  if (kappas.empty()) {
    const double lo = cold ? 0.0 : 0.1 * kappa_max;
    const double hi = cold ? 0.8 * kappa_max : 0.9 * kappa_max;
    for (int i = 0; i < 5; ++i) kappas.push_back(lo + (hi - lo) * i / 4.0);
  }
  std::string csv = "kappa,tau,regime\n";
  json rows = json::array();
  for (double k : kappas) {
    langevin::Classification cls;
    try {
      cls = langevin::theorem16_classify(beta, gamma, d, k);
    } catch (const std::invalid_argument& e) {
      bad("action.kappas", e.what());
    }
    const bool is_cold = cls.regime == langevin::Regime::Cold;
    csv += num(k) + "," + num(is_cold ? cls.tau : 0.0) + "," +
           (is_cold ? "cold" : "geometric") + "\n";
    rows.push_back(json{{"kappa", k},
                        {"tau", is_cold ? cls.tau : 0.0},
                        {"regime", is_cold ? "cold" : "geometric"},
                        {"uniform", cls.uniform}});
  }
  b.tables["rates.csv"] = csv;
  b.summary["entries"] = rows;
  b.summary["kappa_bound"] = kappa_max;
  b.exit_status = kExitOk;
}

void run_langevin(const cfg::ExperimentConfig& c, ResultBundle& b) {
  const langevin::LangevinModel model = make_langevin(c);
  b.metadata["describe"] = model.describe();
  const std::string a = c.action();
  if (a == "simulate")
    langevin_simulate(c, b, model);
  else if (a == "drift-check")
    langevin_drift_check(c, b, model);
  else if (a == "nested-check")
    bad("action.kind", "nested-check supports the jump and cpou models");
  else if (a == "converge")
    langevin_converge(c, b, model);
  else if (a == "classify")
    langevin_classify(c, b, model);
  else
    langevin_rates(c, b, model);
}

// ----------------------------------------------------------------- cpou ----

void cpou_simulate(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const cpou::CPOUModel& model) {
  const auto times = time_grid(c);
  const double x0 = scalar_x0(c, 1.0);
  if (!(x0 >= 0)) bad("action.x0", "storage level must be >= 0");
  const proc::Path path = model.simulate_exact(x0, times.back(), c.seed());
  std::string csv = "t,x\n";
  for (double t : times) csv += num(t) + "," + num(path.scalar(t)) + "\n";
  b.tables["trajectory.csv"] = csv;
  b.summary["jumps"] = path.segments().size() - 1;
  b.summary["horizon"] = times.back();
  b.gnuplot =
      "set datafile separator ','\nset xlabel 't'\nset ylabel 'x'\n"
      "plot 'trajectory.csv' skip 1 using 1:2 with lines title 'trajectory'\n";
}

void cpou_drift_check(const cfg::ExperimentConfig& c, ResultBundle& b,
                      const cpou::CPOUModel& model) {
  const double r = c.num("action", "order", 2.0);
  if (!(r > 1)) bad("action.order", "iterated-logarithm certificate needs order > 1");
  const auto grid = state_grid(c, std::exp(std::min(r, 30.0)), 1e6, 60);
  const drift::DriftCertificate cert = model.lemma18_certificate(r, grid);
  b.tables["certificate.json"] = cert.to_json().dump(2) + "\n";
  b.summary["certificate"] = json{{"status", status_name(cert.status)},
                                  {"alpha", cert.alpha},
                                  {"v_level", cert.v_level},
                                  {"b", cert.b},
                                  {"scope", cert.scope},
                                  {"reason", cert.reason},
                                  {"exponents", cert.rows.size()}};
  b.exit_status = cert.certified() ? kExitOk : kExitRefused;
}

void cpou_nested_check(const cfg::ExperimentConfig& c, ResultBundle& b,
                       const cpou::CPOUModel& model) {
  const double order = c.num("action", "order", 2.0);
  if (order < 2.0 || std::abs(order - std::round(order)) > 1e-9)
    bad("action.order", "nested-check needs an integer order >= 2");
  const int p = static_cast<int>(std::lround(order));
  const double r = static_cast<double>(p);
  const double alpha = 1.0 / r;
  const cpou::TailMoment mom =
      cpou::tail_moment(model.jump_law(), r, c.num("numeric", "quad_tol", 1e-8));
  if (!mom.finite) {
    b.summary["nested"] =
        json{{"status", "refused"},
             {"reason", "log-moment of order " + num(r) + " diverges for " +
                            model.jump_law().describe()}};
    b.exit_status = kExitRefused;
    return;
  }
  const proc::DriftFunction V = cpou::log_power_lyapunov(r);
  const auto xs = state_grid(c, std::exp(std::min(r, 30.0)), 1e6, 60);
  std::vector<std::vector<double>> domain;
  for (double x : xs) domain.push_back({x});

  drift::DriftSpec flat;
  flat.V = V;
  flat.alpha = alpha;
  for (int q = 1; q <= p; ++q)
    flat.eta_grid.push_back(q == p ? 1.0 : static_cast<double>(q) * alpha);
  flat.domain = domain;
  const drift::DriftCertificate cert = drift::verify(model, flat);
  if (!cert.certified()) {
    b.summary["nested"] = json{{"status", status_name(cert.status)},
                               {"reason", "flat certificate failed: " + cert.reason}};
    b.exit_status = kExitRefused;
    return;
  }
  std::vector<double> cs;
  for (const auto& row : cert.rows) cs.push_back(row.c);
  const drift::NestedSpec spec =
      build_ladder(V, alpha, p, cs, c.num("action", "beta_hit", 1.0), std::move(domain));
  finish_nested(c, b, model, spec);
}

void cpou_classify(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const cpou::CPOUModel& model) {
  const cpou::HeavyTailReport rep = cpou::heavy_tail_classify(model.jump_law());
  const char* verdict = rep.verdict == cpou::Obstruction::NotPositiveRecurrent
                            ? "not-positive-recurrent"
                            : (rep.verdict == cpou::Obstruction::NotGeometric
                                   ? "not-geometric"
                                   : "no-obstruction");
  b.summary["heavy_tail"] = json{{"verdict", verdict},
                                 {"log_mean_finite", rep.log_mean_finite},
                                 {"log_mean", rep.log_mean},
                                 {"heavy_all_kappa", rep.heavy_all_kappa},
                                 {"reason", rep.reason}};
  if (c.has("action", "order")) {
    const double r = c.num("action", "order", 2.0);
    if (!(r > 0)) bad("action.order", "moment order must be positive");
    const cpou::TailMoment mom =
        cpou::tail_moment(model.jump_law(), r, c.num("numeric", "quad_tol", 1e-8));
    b.summary["log_moment"] = json{{"order", r}, {"finite", mom.finite}, {"value", mom.value}};
  }
  b.exit_status = kExitOk;
}

void cpou_converge(const cfg::ExperimentConfig& c, ResultBundle& b,
                   const cpou::CPOUModel& model) {
  const std::string mode = c.str("action", "compare", "survival-bound");
  if (mode != "survival-bound")
    bad("action.compare", "cpou converge supports \"survival-bound\" only");
  const auto times = time_grid(c);
  const double x0 = scalar_x0(c, 2.0);
  if (!(x0 > 1)) bad("action.x0", "survival comparison starts above the unit interval");
  const long nsamp = c.integer("numeric", "n", 100000);
  if (nsamp < 100) bad("numeric.n", "needs at least 100 paths");
  const double horizon = times.back();
  const std::uint64_t seed = c.seed();

  std::vector<double> tau(static_cast<std::size_t>(nsamp));
  proc::parallel_for(static_cast<std::size_t>(nsamp), [&](std::size_t k) {
    const proc::Path p = model.simulate_exact(x0, horizon, rng::substream_seed(seed, k));
    proc::HittingQuery q;
    q.interval = std::pair<double, double>{0.0, 1.0};
    q.inside = [](std::span<const double> x) { return x[0] >= 0.0 && x[0] <= 1.0; };
    const auto h = proc::hitting_time(p, q);
    tau[k] = h ? *h : std::numeric_limits<double>::infinity();
  });

  // The closed-form bound is derived for the start level 2; other starts get
  // the Monte Carlo curve only.
  const bool bound_valid = std::abs(x0 - 2.0) < 1e-12;
  const double z = 1.959963984540054;
  std::string csv = "t,mc,ci,bound\n";
  json rows = json::array();
  bool all_ok = true;
  for (double t : times) {
    std::size_t live = 0;
    for (double tv : tau) live += tv > t ? 1 : 0;
    const double phat = static_cast<double>(live) / static_cast<double>(nsamp);
    const double ci =
        z * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(nsamp));
    const double bound = bound_valid ? model.survival_lower_bound(t) : 0.0;
    const bool ok = !bound_valid || phat + 4.0 * ci >= bound;
    all_ok = all_ok && ok;
    csv += num(t) + "," + num(phat) + "," + num(ci) + "," + num(bound) + "\n";
    rows.push_back(json{{"t", t}, {"mc", phat}, {"ci", ci}, {"bound", bound}, {"ok", ok}});
  }
  b.tables["survival.csv"] = csv;
  b.summary["survival"] = rows;
  b.summary["paths"] = nsamp;
  const std::string verdict =
      !bound_valid ? "mc-only" : (all_ok ? "bound-respected" : "bound-violated");
  b.summary["verdict"] = verdict;
  b.gnuplot =
      "set datafile separator ','\nset xlabel 't'\nset ylabel 'P(tau > t)'\n"
      "set logscale y\n"
      "plot 'survival.csv' skip 1 using 1:2:3 with yerrorbars title 'empirical'" +
      std::string(bound_valid ? ", \\\n     'survival.csv' skip 1 using 1:4 with lines title 'lower bound'"
                              : "") +
      "\n";
  b.exit_status = verdict == "bound-violated" ? kExitRefused : kExitOk;
}

void cpou_rates(const cfg::ExperimentConfig& c, ResultBundle& b,
                const cpou::CPOUModel& model) {
  const double r = c.num("action", "order", 2.0);
  if (!(r > 1)) bad("action.order", "rate menu needs order > 1");
  const cpou::TailMoment mom =
      cpou::tail_moment(model.jump_law(), r, c.num("numeric", "quad_tol", 1e-8));
  b.summary["log_moment"] = json{{"order", r}, {"finite", mom.finite}, {"value", mom.value}};
  if (!mom.finite) {
    b.summary["reason"] = "log-moment of order " + num(r) + " diverges; no menu";
    b.exit_status = kExitRefused;
    return;
  }
  std::vector<double> ps = c.nums("action", "p_grid");
  if (ps.empty()) ps = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr double b_grid[] = {0.0};
  const rates::RateNormMenu menu = rates::tradeoff_menu(1.0 / r, ps, b_grid);
  std::string csv = "p,rate_exponent,rate_log_power,norm_exponent,norm_log_power\n";
  double best = 0;
  for (const auto& e : menu) {
    csv += num(e.p) + "," + num(e.rate_exponent) + "," + num(e.rate_log_power) + "," +
           num(e.norm_exponent) + "," + num(e.norm_log_power) + "\n";
    best = std::max(best, e.rate_exponent);
  }
  b.tables["rates.csv"] = csv;
  b.summary["alpha"] = 1.0 / r;
  b.summary["best_rate_exponent"] = best;  // r - 1 against the flat norm
  b.exit_status = kExitOk;
}

void run_cpou(const cfg::ExperimentConfig& c, ResultBundle& b) {
  const cpou::CPOUModel model = make_cpou(c);
  b.metadata["describe"] = model.describe();
  const std::string a = c.action();
  if (a == "simulate")
    cpou_simulate(c, b, model);
  else if (a == "drift-check")
    cpou_drift_check(c, b, model);
  else if (a == "nested-check")
    cpou_nested_check(c, b, model);
  else if (a == "converge")
    cpou_converge(c, b, model);
  else if (a == "classify")
    cpou_classify(c, b, model);
  else
    cpou_rates(c, b, model);
}

}  // namespace

ResultBundle run(const cfg::ExperimentConfig& config) {
  ResultBundle b;
  b.metadata = json{{"version", kVersion},
                    {"rng", rng::kGeneratorId},
                    {"seed", config.seed()},
                    {"model", config.model_kind()},
                    {"action", config.action()},
                    {"config", config.doc()}};
  const std::string kind = config.model_kind();
  if (kind == "jump")
    run_jump(config, b);
  else if (kind == "langevin")
    run_langevin(config, b);
  else
    run_cpou(config, b);
  b.summary["model"] = kind;
  b.summary["action"] = config.action();
  b.summary["exit_status"] = b.exit_status;
  return b;
}

void write_bundle(const ResultBundle& bundle, const cfg::ExperimentConfig& config,
                  const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&dir](const std::string& name, const std::string& bytes) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
    out << bytes;
  };
  put("config.json", config.doc().dump(2) + "\n");
  put("metadata.json", bundle.metadata.dump(2) + "\n");
  put("summary.json", bundle.summary.dump(2) + "\n");
  for (const auto& [name, bytes] : bundle.tables) put(name, bytes);
  bool plots = true;
  const auto& doc = config.doc();
  if (doc.contains("output") && doc["output"].contains("gnuplot"))
    plots = doc["output"]["gnuplot"].get<bool>();
  if (plots && !bundle.gnuplot.empty()) put("plot.gp", bundle.gnuplot);
}

}  // namespace subergo::runner
