#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "subergo/model.hpp"
#include "subergo/rates.hpp"

namespace subergo::drift {

// Request to certify the one-parameter family of inequalities
//   (generator applied to V^eta)(x) <= -c_eta V(x)^{eta - alpha} + b 1_C(x)
// for every eta on the grid, with the small set C restricted to sublevel sets
// {V <= v}. The checker picks the lowest workable level.
struct DriftSpec {
  proc::DriftFunction V;
  double alpha = 0.5;                        // in (0, 1]
  std::vector<double> eta_grid;              // defaults to 9 points on [alpha, 1]
  std::vector<std::vector<double>> domain;   // states to scan
  // Nonempty when a family argument extends the grid verdict to all untested
  // states (monotone ratio along the tail); recorded in the certificate scope.
  std::string tail_note;
};

std::vector<double> default_eta_grid(double alpha, int count = 9);

enum class Status { Certified, NotCertified, Refused };

struct EtaRow {
  double eta = 0;
  double c = 0;            // certified decay constant (positive when certified)
  double worst_ratio = 0;  // sup over states outside C of AV^eta / V^{eta-alpha}
  std::vector<double> worst_state;
};

struct DriftCertificate {
  Status status = Status::Refused;
  double alpha = 0;
  double v_level = 0;  // C = {V <= v_level}
  double b = 0;        // inequality slack inside C
  std::vector<EtaRow> rows;
  std::string scope;   // "grid plus family tail lemma" or "grid-only"
  std::string reason;  // refusal / failure detail
  std::string model;
  std::string v_label;
  rates::RateNormMenu menu;  // attached on certification

  bool certified() const { return status == Status::Certified; }
  nlohmann::json to_json() const;
  static DriftCertificate from_json(const nlohmann::json& j);
};

DriftCertificate verify(const proc::ProcessModel& model, const DriftSpec& spec);

// Ladder variant: generator(V_q) <= -f_q + b 1_C for q = 1..p, again with C a
// sublevel set of V_p, recording the coupling constants sup V_{q-1}/f_q.
struct NestedSpec {
  std::vector<proc::DriftFunction> ladder;  // V_1..V_p
  std::vector<proc::DriftFunction> floors;  // f_1..f_p
  double beta = 1;                          // hitting-moment power vs f_1
  std::vector<std::vector<double>> domain;
};

struct RungRow {
  int q = 0;
  double worst_margin = 0;  // sup outside C of generator(V_q) + f_q (negative when certified)
  std::vector<double> worst_state;
  double ladder_c = 0;      // sup of V_{q-1}/f_q (q >= 2), else 0
};

struct NestedCertificate {
  Status status = Status::Refused;
  int p = 0;
  double beta = 1;
  double v_level = 0;
  double b = 0;
  std::vector<RungRow> rungs;
  // Rate menu implied by the ladder: exponent (p - 1 + beta) * eta against the
  // norm weakened to f^(1 - eta), eta on [0, 1].
  std::vector<std::pair<double, double>> prediction;
  std::string mc_floor_report;  // advisory hitting-moment comparison
  std::string reason;

  bool certified() const { return status == Status::Certified; }
  nlohmann::json to_json() const;
};

NestedCertificate verify_nested(const proc::ProcessModel& model,
                                const NestedSpec& spec);

// Advisory Monte Carlo check of E_x[tau_C^beta] <= f_1(x) at the given start
// states (one-sided 95%). Returns a report; never flips a certificate.
std::string mc_floor_check(const proc::ProcessModel& model, const NestedSpec& spec,
                           const NestedCertificate& cert,
                           std::span<const std::vector<double>> starts,
                           std::size_t n, double horizon, std::uint64_t seed);

}  // namespace subergo::drift
