#include "subergo/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "subergo/montecarlo.hpp"
#include "subergo/path.hpp"
#include "subergo/rng.hpp"

namespace subergo::drift {

namespace {

std::string format_state(const std::vector<double>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k) os << ", ";
    os << x[k];
  }
  os << ")";
  return os.str();
}

nlohmann::json state_json(const std::vector<double>& x) {
  return nlohmann::json(x);
}

}  // namespace

std::vector<double> default_eta_grid(double alpha, int count) {
  if (count < 2) throw std::invalid_argument("eta grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    grid[static_cast<std::size_t>(k)] =
        alpha + (1.0 - alpha) * static_cast<double>(k) / (count - 1);
  grid.back() = 1.0;
  return grid;
}

DriftCertificate verify(const proc::ProcessModel& model, const DriftSpec& spec) {
  DriftCertificate cert;
  cert.alpha = spec.alpha;
  cert.model = model.describe();
  cert.v_label = spec.V.label;
  cert.scope = spec.tail_note.empty() ? "grid-only" : "grid plus family tail lemma";

  if (!spec.V.value) {
    cert.reason = "no V supplied";
    return cert;
  }
  if (!(spec.alpha > 0.0) || spec.alpha > 1.0) {
    cert.reason = "alpha must lie in (0, 1]";
    return cert;
  }
  if (spec.domain.empty()) {
    cert.reason = "empty state grid";
    return cert;
  }
  std::vector<double> etas =
      spec.eta_grid.empty() ? default_eta_grid(spec.alpha) : spec.eta_grid;
  for (double e : etas)
    if (e < spec.alpha - 1e-12 || e > 1.0 + 1e-12) {
      cert.reason = "eta grid must stay within [alpha, 1]";
      return cert;
    }

  const std::size_t m = spec.domain.size();
  const std::size_t ne = etas.size();
  std::vector<double> v_of(m);
  // ratio[e * m + s]
  std::vector<double> ratio(ne * m);
  std::vector<double> gen_val(ne * m);
  for (std::size_t s = 0; s < m; ++s) {
    const double v = spec.V.value(spec.domain[s]);
    if (!(v >= 1.0 - 1e-12) || !std::isfinite(v)) {
      cert.reason = "V drops below 1 at state " + format_state(spec.domain[s]);
      return cert;
    }
    v_of[s] = std::max(v, 1.0);
  }
  for (std::size_t e = 0; e < ne; ++e) {
    const proc::DriftFunction Ve =
        proc::pow_of(spec.V, etas[e], model.dimension());
    for (std::size_t s = 0; s < m; ++s) {
      double a;
      try {
        a = model.generator_apply(Ve, spec.domain[s]);
      } catch (const std::runtime_error& err) {
        cert.reason = std::string("generator not defined on V^eta: ") + err.what();
        return cert;
      }
      if (!std::isfinite(a)) {
        cert.reason = "generator value not finite at state " +
                      format_state(spec.domain[s]);
        return cert;
      }
      gen_val[e * m + s] = a;
      ratio[e * m + s] = a / std::pow(v_of[s], etas[e] - spec.alpha);
    }
  }

  // Order states by V and find the smallest sublevel cut so that every eta
  // ratio is strictly negative on the outside.
  std::vector<std::size_t> order(m);
  for (std::size_t s = 0; s < m; ++s) order[s] = s;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v_of[a] < v_of[b]; });

  // suffix_max[e][k] = max over ordered positions >= k of ratio.
  std::vector<std::vector<double>> suffix_max(
      ne, std::vector<double>(m + 1, -std::numeric_limits<double>::infinity()));
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t k = m; k-- > 0;)
      suffix_max[e][k] =
          std::max(suffix_max[e][k + 1], ratio[e * m + order[k]]);

  std::size_t cut = m;  // first ordered index outside C
  for (std::size_t k = 0; k < m; ++k) {
    bool ok = true;
    for (std::size_t e = 0; e < ne; ++e)
      if (!(suffix_max[e][k] < 0.0)) { ok = false; break; }
    if (ok) {
      // Sublevel sets cannot split ties in V.
      if (k > 0 && v_of[order[k]] <= v_of[order[k - 1]] * (1.0 + 1e-12)) continue;
      cut = k;
      break;
    }
  }
  if (cut == m) {
    std::ostringstream os;
    os << "no sublevel cut leaves every eta ratio negative; worst offender at "
       << format_state(spec.domain[order[m - 1]]);
    cert.reason = os.str();
    cert.status = Status::NotCertified;
    return cert;
  }

  cert.v_level = cut == 0 ? v_of[order[0]] : v_of[order[cut - 1]];
  cert.rows.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    EtaRow& row = cert.rows[e];
    row.eta = etas[e];
    row.worst_ratio = suffix_max[e][cut];
    row.c = -row.worst_ratio;
    for (std::size_t k = cut; k < m; ++k)
      if (ratio[e * m + order[k]] == row.worst_ratio) {
        row.worst_state = spec.domain[order[k]];
        break;
      }
  }
  double b = 0.0;
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t k = 0; k < cut; ++k) {
      const std::size_t s = order[k];
      b = std::max(b, gen_val[e * m + s] +
                          cert.rows[e].c *
                              std::pow(v_of[s], etas[e] - spec.alpha));
    }
  cert.b = b;
  cert.status = Status::Certified;
  static constexpr double p_grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr double b_grid[] = {0.0};
  cert.menu = rates::tradeoff_menu(spec.alpha, p_grid, b_grid);
  return cert;
}

nlohmann::json DriftCertificate::to_json() const {
  nlohmann::json j;
  j["status"] = status == Status::Certified      ? "certified"
                : status == Status::NotCertified ? "not-certified"
                                                 : "refused";
  j["alpha"] = alpha;
  j["v_level"] = v_level;
  j["b"] = b;
  j["scope"] = scope;
  j["reason"] = reason;
  j["model"] = model;
  j["v_label"] = v_label;
  j["rows"] = nlohmann::json::array();
  for (const EtaRow& r : rows) {
    nlohmann::json row;
    row["eta"] = r.eta;
    row["c"] = r.c;
    row["worst_ratio"] = r.worst_ratio;
    row["worst_state"] = state_json(r.worst_state);
    j["rows"].push_back(row);
  }
  j["menu"] = nlohmann::json::array();
  for (const rates::MenuEntry& e : menu) {
    nlohmann::json row;
    row["p"] = e.p;
    row["rate_exponent"] = e.rate_exponent;
    row["rate_log_power"] = e.rate_log_power;
    row["norm_exponent"] = e.norm_exponent;
    row["norm_log_power"] = e.norm_log_power;
    j["menu"].push_back(row);
  }
  return j;
}

DriftCertificate DriftCertificate::from_json(const nlohmann::json& j) {
  DriftCertificate cert;
  const std::string st = j.at("status").get<std::string>();
  cert.status = st == "certified"      ? Status::Certified
                : st == "not-certified" ? Status::NotCertified
                                        : Status::Refused;
  cert.alpha = j.at("alpha").get<double>();
  cert.v_level = j.at("v_level").get<double>();
  cert.b = j.at("b").get<double>();
  cert.scope = j.at("scope").get<std::string>();
  cert.reason = j.at("reason").get<std::string>();
  cert.model = j.at("model").get<std::string>();
  cert.v_label = j.at("v_label").get<std::string>();
  for (const auto& row : j.at("rows")) {
    EtaRow r;
    r.eta = row.at("eta").get<double>();
    r.c = row.at("c").get<double>();
    r.worst_ratio = row.at("worst_ratio").get<double>();
    r.worst_state = row.at("worst_state").get<std::vector<double>>();
    cert.rows.push_back(r);
  }
  for (const auto& row : j.at("menu")) {
    rates::MenuEntry e;
    e.p = row.at("p").get<double>();
    e.rate_exponent = row.at("rate_exponent").get<double>();
    e.rate_log_power = row.at("rate_log_power").get<double>();
    e.norm_exponent = row.at("norm_exponent").get<double>();
    e.norm_log_power = row.at("norm_log_power").get<double>();
    cert.menu.push_back(e);
  }
  return cert;
}

NestedCertificate verify_nested(const proc::ProcessModel& model,
                                const NestedSpec& spec) {
  NestedCertificate cert;
  cert.p = static_cast<int>(spec.ladder.size());
  cert.beta = spec.beta;
  if (spec.ladder.empty() || spec.ladder.size() != spec.floors.size()) {
    cert.reason = "ladder and floors must be nonempty and of equal length";
    return cert;
  }
  if (!(spec.beta > 0.0)) {
    cert.reason = "beta must be positive";
    return cert;
  }
  if (spec.domain.empty()) {
    cert.reason = "empty state grid";
    return cert;
  }
  const std::size_t m = spec.domain.size();
  const std::size_t p = spec.ladder.size();
  std::vector<double> v_top(m);
  std::vector<std::vector<double>> margin(p, std::vector<double>(m));
  std::vector<std::vector<double>> fval(p, std::vector<double>(m));
  std::vector<std::vector<double>> vval(p, std::vector<double>(m));
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t q = 0; q < p; ++q) {
      const double v = spec.ladder[q].value(spec.domain[s]);
      const double f = spec.floors[q].value(spec.domain[s]);
      if (!(v >= 1.0 - 1e-12)) {
        cert.reason = "ladder function below 1 at state " +
                      format_state(spec.domain[s]);
        return cert;
      }
      double a;
      try {
        a = model.generator_apply(spec.ladder[q], spec.domain[s]);
      } catch (const std::runtime_error& err) {
        cert.reason = std::string("generator not defined on ladder rung: ") +
                      err.what();
        return cert;
      }
      vval[q][s] = v;
      fval[q][s] = f;
      margin[q][s] = a + f;
    }
    v_top[s] = vval[p - 1][s];
  }

  std::vector<std::size_t> order(m);
  for (std::size_t s = 0; s < m; ++s) order[s] = s;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v_top[a] < v_top[b]; });
  std::vector<std::vector<double>> suffix_max(
      p, std::vector<double>(m + 1, -std::numeric_limits<double>::infinity()));
  for (std::size_t q = 0; q < p; ++q)
    for (std::size_t k = m; k-- > 0;)
      suffix_max[q][k] = std::max(suffix_max[q][k + 1], margin[q][order[k]]);

  std::size_t cut = m;
  for (std::size_t k = 0; k < m; ++k) {
    bool ok = true;
    for (std::size_t q = 0; q < p && ok; ++q) {
      if (!(suffix_max[q][k] < 0.0)) ok = false;
      // floors must stay positive off C
      for (std::size_t kk = k; kk < m && ok; ++kk)
        if (!(fval[q][order[kk]] > 0.0)) ok = false;
    }
    if (ok) {
      if (k > 0 && v_top[order[k]] <= v_top[order[k - 1]] * (1.0 + 1e-12)) continue;
      cut = k;
      break;
    }
  }
  if (cut == m) {
    cert.status = Status::NotCertified;
    cert.reason = "no sublevel cut leaves every rung margin negative";
    return cert;
  }
  cert.v_level = cut == 0 ? v_top[order[0]] : v_top[order[cut - 1]];
  cert.rungs.resize(p);
  double b = 0.0;
  for (std::size_t q = 0; q < p; ++q) {
    RungRow& r = cert.rungs[q];
    r.q = static_cast<int>(q) + 1;
    r.worst_margin = suffix_max[q][cut];
    for (std::size_t k = cut; k < m; ++k)
      if (margin[q][order[k]] == r.worst_margin) {
        r.worst_state = spec.domain[order[k]];
        break;
      }
    if (q > 0) {
      double c = 0.0;
      for (std::size_t k = cut; k < m; ++k) {
        const std::size_t s = order[k];
        c = std::max(c, vval[q - 1][s] / fval[q][s]);
      }
      r.ladder_c = c;
    }
    for (std::size_t k = 0; k < cut; ++k)
      b = std::max(b, margin[q][order[k]]);
  }
  cert.b = b;
  cert.status = Status::Certified;
  for (int k = 0; k <= 8; ++k) {
    const double eta = k / 8.0;
    cert.prediction.emplace_back(
        eta, (static_cast<double>(p) - 1.0 + spec.beta) * eta);
  }
  return cert;
}

nlohmann::json NestedCertificate::to_json() const {
  nlohmann::json j;
  j["status"] = status == Status::Certified      ? "certified"
                : status == Status::NotCertified ? "not-certified"
                                                 : "refused";
  j["p"] = p;
  j["beta"] = beta;
  j["v_level"] = v_level;
  j["b"] = b;
  j["reason"] = reason;
  j["mc_floor_report"] = mc_floor_report;
  j["rungs"] = nlohmann::json::array();
  for (const RungRow& r : rungs) {
    nlohmann::json row;
    row["q"] = r.q;
    row["worst_margin"] = r.worst_margin;
    row["worst_state"] = state_json(r.worst_state);
    row["ladder_c"] = r.ladder_c;
    j["rungs"].push_back(row);
  }
  j["prediction"] = nlohmann::json::array();
  for (const auto& [eta, ex] : prediction)
    j["prediction"].push_back({{"eta", eta}, {"rate_exponent", ex}});
  return j;
}

std::string mc_floor_check(const proc::ProcessModel& model, const NestedSpec& spec,
                           const NestedCertificate& cert,
                           std::span<const std::vector<double>> starts,
                           std::size_t n, double horizon, std::uint64_t seed) {
  if (!cert.certified()) return "skipped: certificate not certified";
  const proc::DriftFunction& Vp = spec.ladder.back();
  const proc::DriftFunction& f1 = spec.floors.front();
  std::ostringstream os;
  os.precision(6);
  for (std::size_t si = 0; si < starts.size(); ++si) {
    const std::vector<double>& x0 = starts[si];
    std::vector<double> samples(n, 0.0);
    proc::parallel_for(n, [&](std::size_t k) {
      const proc::Path path = model.simulate(
          x0, horizon, rng::substream_seed(seed + 1013 * si, k));
      proc::HittingQuery q;
      q.inside = [&](std::span<const double> x) {
        std::vector<double> v(x.begin(), x.end());
        return Vp.value(v) <= cert.v_level * (1.0 + 1e-12);
      };
      const auto tau = proc::hitting_time(path, q);
      const double t = tau.value_or(horizon);
      samples[k] = std::pow(t, spec.beta);
    });
    const proc::MomentEstimate est = proc::reduce_sample(samples);
    // one-sided 95% lower confidence bound; horizon-clipped samples only pull
    // the estimate down, so the bound stays valid.
    const double lower = est.mean - 1.6448536269514722 * est.sd /
                                        std::sqrt(static_cast<double>(n));
    const double floor = f1.value(x0);
    os << "x0=" << format_state(x0) << " E[tau^beta] ~ " << est.mean
       << " (lcb " << lower << ") vs floor " << floor << ": "
       << (lower > floor ? "WARNING floor exceeded" : "consistent") << "\n";
  }
  return os.str();
}

}  // namespace subergo::drift
