#pragma once

#include <cstdint>
#include <optional>

#include "hestonfwd/simulate.hpp"
#include "hestonfwd/util.hpp"

namespace hestonfwd {

// Payoff on the delivery-average forward price. The smoothed call (softplus)
// is the one with a Lipschitz derivative, which the Skorohod estimator needs;
// the plain call is priced but is ineligible for derivative-based Greeks.
struct Payoff {
  enum class Kind { Linear, Call, SmoothedCall };
  Kind kind = Kind::Linear;
  // Strike; unset means at-the-money, resolved against the deterministic
  // forward J_{x,d}(S_tau x0) at pricing time.
  std::optional<double> strike;
  double kappa = 0.1;  // softplus smoothing scale

  static Payoff linear() { return {}; }
  static Payoff call(std::optional<double> k) { return {Kind::Call, k, 0.0}; }
  static Payoff smoothed_call(std::optional<double> k, double kappa) {
    return {Kind::SmoothedCall, k, kappa};
  }

  double value(double s, double k_resolved) const;
  double deriv(double s, double k_resolved) const;
  bool differentiable() const { return kind != Kind::Call; }
};

struct OptionSpec {
  double tau = 0.5;  // exercise time
  double x = 0.25;   // time to delivery start at exercise
  double d = 0.25;   // delivery length
  double r = 0.02;   // interest rate
  Payoff payoff;
};

// f(t,x) = delta_x(X)
double forward_f(const Curve& x_curve, double x);
// g(t,x,d) = J_{x,d}(X)
double forward_g(const Curve& x_curve, double x, double d);

// Deterministic part of the terminal delivery forward, J_{x,d}(S_tau x0);
// also the at-the-money strike.
double deterministic_forward(const ModelSpec& m, const OptionSpec& opt);
double resolve_strike(const ModelSpec& m, const OptionSpec& opt);

// Per-path terminal delivery prices g(tau, x, d), without materializing X:
// the stochastic convolution is folded through the delivery functional.
std::vector<double> terminal_g_samples(const ModelSpec& m, const OptionSpec& opt,
                                       std::size_t n_paths, std::uint64_t seed,
                                       int threads = 1);

struct PriceEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n_paths = 0;
  double strike = 0.0;  // resolved strike actually used
};

PriceEstimate price_option(const ModelSpec& m, const OptionSpec& opt,
                           std::size_t n_paths, std::uint64_t seed, int threads = 1);

}  // namespace hestonfwd
