#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "subergo/path.hpp"

namespace subergo::proc {

// Test function handed to a generator. Only `value` is mandatory; each model
// checks for the derivatives it needs (scalar derivative for the storage
// process, gradient plus Hessian trace for diffusions) and refuses otherwise.
// `growth` declares the growth class used to certify convergence of jump
// integrals against heavy-tailed laws.
struct DriftFunction {
  enum class Growth { Unspecified, Bounded, LogPower, Linear };

  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::function<double(std::span<const double>)> laplacian;  // trace of Hessian
  std::function<double(double)> derivative;                  // scalar models
  Growth growth = Growth::Unspecified;
  double growth_power = 0;  // log-power exponent when growth == LogPower
  std::string label;
};

// W = V^eta with chain-rule derivatives. Requires V > 0 wherever evaluated;
// the Hessian trace additionally needs V's gradient.
DriftFunction pow_of(const DriftFunction& v, double eta, int dim);

class ProcessModel {
 public:
  virtual ~ProcessModel() = default;

  virtual int dimension() const = 0;

  // One trajectory from x0 on [0, horizon]. Equal seeds give equal paths.
  virtual Path simulate(std::span<const double> x0, double horizon,
                        std::uint64_t seed) const = 0;

  // States at the given times, written to out (times.size() * dim). Default
  // goes through simulate(); models with long dense paths override to stream.
  virtual void simulate_at(std::span<const double> x0,
                           std::span<const double> times, std::uint64_t seed,
                           std::span<double> out) const;

  // Generator applied to V at x.
  virtual double generator_apply(const DriftFunction& V,
                                 std::span<const double> x) const = 0;

  virtual std::string describe() const = 0;
};

}  // namespace subergo::proc
