#include "hestonfwd/pricing.hpp"

#include <cmath>
#include <stdexcept>

namespace hestonfwd {

double Payoff::value(double s, double k) const {
  switch (kind) {
    case Kind::Linear:
      return s;
    case Kind::Call:
      return std::max(s - k, 0.0);
    case Kind::SmoothedCall: {
      const double u = (s - k) / kappa;
      // softplus, stable for both tails
      return u > 0 ? (s - k) + kappa * std::log1p(std::exp(-u))
                   : kappa * std::log1p(std::exp(u));
    }
  }
  throw std::logic_error("unreachable payoff kind");
}

double Payoff::deriv(double s, double k) const {
  switch (kind) {
    case Kind::Linear:
      return 1.0;
    case Kind::Call:
      throw std::invalid_argument("call payoff is not differentiable; use smoothed_call");
    case Kind::SmoothedCall: {
      const double u = (s - k) / kappa;
      return u > 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    }
  }
  throw std::logic_error("unreachable payoff kind");
}

double forward_f(const Curve& x_curve, double x) { return x_curve.eval(x); }

double forward_g(const Curve& x_curve, double x, double d) {
  return integ_Jxd(x_curve, x, d);
}

double deterministic_forward(const ModelSpec& m, const OptionSpec& opt) {
  const Curve sx0 = semigroup_apply(m.s_semigroup, opt.tau, m.x0);
  return integ_Jxd(sx0, opt.x, opt.d);
}

double resolve_strike(const ModelSpec& m, const OptionSpec& opt) {
  if (opt.payoff.strike) return *opt.payoff.strike;
  return deterministic_forward(m, opt);
}

std::vector<double> terminal_g_samples(const ModelSpec& m, const OptionSpec& opt,
                                       std::size_t n_paths, std::uint64_t seed,
                                       int threads) {
  ModelSpec ms = m;
  ms.tau = opt.tau;
  if (!ms.s_semigroup.shifts())
    throw std::invalid_argument("delivery pricing needs a shift semigroup for X");
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);
  const double det = deterministic_forward(ms, opt);

  std::vector<double> g(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eta_base{1.0,
                                                                  &eng.prepared_eta()};
  const Curve y0c =
      clip_curve(ms.y0, working_cells(ms, opt.x + opt.tau + opt.d));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double acc = det;
    eng.run(nz, y0c, PathEngine::OpCombo{&eta_base, 1}, [&](const StepInfo& s) {
      if (s.sigma == 0.0) return;
      const std::size_t mm = n - s.k;
      acc += s.sigma * std::pow(ds, double(mm)) *
             integ_Jxd(s.y, opt.x + double(mm) * dt, opt.d);
    });
    g[p] = acc;
  });
  return g;
}

PriceEstimate price_option(const ModelSpec& m, const OptionSpec& opt,
                           std::size_t n_paths, std::uint64_t seed, int threads) {
  if (n_paths == 0) throw std::invalid_argument("price_option: n_paths must be > 0");
  const double k = resolve_strike(m, opt);
  const double disc = std::exp(-opt.r * opt.tau);
  std::vector<double> v = terminal_g_samples(m, opt, n_paths, seed, threads);
  for (double& s : v) s = disc * opt.payoff.value(s, k);
  const MeanSe r = mean_se(v);
  return {r.mean, r.se, n_paths, k};
}

}  // namespace hestonfwd
