#include "subergo/presets.hpp"

#include <array>

namespace subergo::presets {

namespace {

const std::array<Preset, 10> kCatalog = {{
    {"jump-prop12", "prop12",
     "hub-and-spoke chain with power-law mean holding times; exact distance to "
     "equilibrium on a log time grid, fitted decay exponent checked against the "
     "polynomial prediction",
     R"([model]
kind = "jump"
weights = "power"
weight_param = 4.0
rates = "power"
rate_c = 1.0
rate_param = 1.0

[action]
kind = "converge"
x0 = [0]
t_from = 5.0
t_to = 200.0
t_count = 40
t_spacing = "log"
tau = 1.0
slack = 0.1

[numeric]
seed = 1903
leak_tol = 1e-10

[output]
directory = "out/jump-prop12"
)",
     "no-slower"},

    {"jump-prop14-log", "prop14-log",
     "geometric spoke weights with geometrically growing mean holding times; "
     "the polynomial moment of the return time diverges but the logarithmic "
     "one converges, so only logarithmic decay rates are predicted",
     R"([model]
kind = "jump"
weights = "geometric"
weight_param = 0.25
rates = "geometric"
rate_c = 1.0
rate_param = 0.5

[action]
kind = "rates"
rate_kind = "logpow"
order = 2.0
kappas = [0.0, 0.5, 1.0, 1.5, 2.0]

[numeric]
seed = 1904

[output]
directory = "out/jump-prop14-log"
)",
     "admissible"},

    {"jump-prop14-subexp", "prop14-subexp",
     "geometric weights with linearly growing spoke rates; the stretched "
     "exponential return-time moment converges, giving sub-exponential decay "
     "predictions over the interpolation grid",
     R"([model]
kind = "jump"
weights = "geometric"
weight_param = 0.2
rates = "power"
rate_c = 1.0
rate_param = 1.0

[action]
kind = "rates"
rate_kind = "subexp"
z = 1.2
kappas = [0.0, 0.25, 0.5, 0.75, 1.0]

[numeric]
seed = 1905

[output]
directory = "out/jump-prop14-subexp"
)",
     "admissible"},

    {"jump-lemma10-conductance", "lemma10",
     "certifies that the power-rate chain cannot converge geometrically: the "
     "spoke conductance bound decays to an infimum below 0.002 over the first "
     "thousand states",
     R"([model]
kind = "jump"
weights = "power"
weight_param = 4.0
rates = "power"
rate_c = 1.0
rate_param = 1.0

[action]
kind = "classify"
conduct_m = 1.0
conduct_lo = 1
conduct_hi = 1000

[numeric]
seed = 1906

[output]
directory = "out/jump-lemma10-conductance"
)",
     "obstruction"},

    {"langevin-thm16-cold", "thm16-cold",
     "one-dimensional Langevin diffusion targeting a polynomial-tailed law at "
     "zero temperature; the classifier places it in the cold regime with "
     "polynomial decay exponent 1.5 for the total-variation norm",
     R"([model]
kind = "langevin"
dimension = 1
beta = 0.25
temperature = 0.0

[action]
kind = "classify"
kappa = 0.0

[numeric]
seed = 1907

[output]
directory = "out/langevin-thm16-cold"
)",
     "cold"},

    {"langevin-thm16-geometric", "thm16-geometric",
     "same polynomial target run warm enough that the moment condition turns "
     "geometric; the classifier reports geometric decay and uniform "
     "ergodicity",
     R"([model]
kind = "langevin"
dimension = 1
beta = 0.25
temperature = 0.3

[action]
kind = "classify"
kappa = 0.3

[numeric]
seed = 1908

[output]
directory = "out/langevin-thm16-geometric"
)",
     "geometric"},

    {"langevin-regularity-sweep", "regularity",
     "sweeps the temperature exponent across the well-posedness boundary for "
     "the beta = 0.25 target and records where the diffusion stays "
     "non-explosive with an integrable speed measure",
     R"([model]
kind = "langevin"
dimension = 1
beta = 0.25
temperature = 0.0

[action]
kind = "classify"
temperatures = [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.7, 0.75]

[numeric]
seed = 1909

[output]
directory = "out/langevin-regularity-sweep"
)",
     "report"},

    {"cpou-lemma17-classify", "lemma17",
     "storage process fed by log-Pareto jumps with tail index 3: positive "
     "recurrent because the logarithmic jump mean is finite, but every "
     "exponential moment diverges, ruling out geometric convergence",
     R"([model]
kind = "cpou"
mu = 1.0
lambda = 1.0
jump_family = "pareto-log"
jump_param = 3.0

[action]
kind = "classify"

[numeric]
seed = 1910

[output]
directory = "out/cpou-lemma17-classify"
)",
     "not-geometric"},

    {"cpou-lemma18-certify", "lemma18",
     "iterated-logarithm Lyapunov certificate for the log-Pareto storage "
     "process with tail index 4: the order-2 drift inequality is verified on "
     "a log grid and closed by a concavity tail argument",
     R"([model]
kind = "cpou"
mu = 1.0
lambda = 1.0
jump_family = "pareto-log"
jump_param = 4.0

[action]
kind = "drift-check"
order = 2.0
grid_from = 7.38905609893065
grid_to = 1.0e6
grid_count = 60

[numeric]
seed = 1911
quad_tol = 1.0e-8

[output]
directory = "out/cpou-lemma18-certify"
)",
     "certified"},

    {"cpou-eq23-survival", "eq23",
     "Monte Carlo occupation of the storage process started at 2 against the "
     "closed-form lower bound for staying above the unit interval; the "
     "empirical survival must not undercut the bound",
     R"([model]
kind = "cpou"
mu = 1.0
lambda = 1.0
jump_family = "pareto-log"
jump_param = 3.0

[action]
kind = "converge"
compare = "survival-bound"
x0 = [2.0]
times = [1.0, 2.0, 5.0]

[numeric]
seed = 1912
n = 100000

[output]
directory = "out/cpou-eq23-survival"
)",
     "bound-respected"},
}};

}  // namespace

std::span<const Preset> catalog() { return {kCatalog.data(), kCatalog.size()}; }

const Preset* find(const std::string& name) {
  for (const auto& p : kCatalog) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace subergo::presets
