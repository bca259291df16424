#include "hestonfwd/greeks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hestonfwd/rng.hpp"

namespace hestonfwd {

namespace {

double direction_norm(const GreekRequest& req) {
  if (req.parameter == GreekParam::Eta) {
    if (!req.dir_op)
      throw std::invalid_argument("eta Greek needs an operator direction");
    return hs_norm(*req.dir_op);
  }
  if (!req.dir_curve)
    throw std::invalid_argument("x0/y0 Greek needs a curve direction");
  return req.dir_curve->norm();
}

struct Setup {
  ModelSpec ms;
  double dt = 0.0;
  double ds = 1.0;  // per-step decay of the X semigroup
  double det = 0.0;
  double strike = 0.0;
  double disc = 1.0;
  std::size_t n = 0;
};

Setup make_setup(const ModelSpec& m, const OptionSpec& opt) {
  Setup s{m, 0, 1, 0, 0, 1, 0};
  s.ms.tau = opt.tau;
  if (!s.ms.s_semigroup.shifts())
    throw std::invalid_argument("delivery Greeks need a shift semigroup for X");
  s.n = s.ms.n_steps();
  s.dt = s.ms.dt();
  s.ds = s.ms.s_semigroup.decay(s.dt);
  s.det = deterministic_forward(s.ms, opt);
  s.strike = resolve_strike(s.ms, opt);
  s.disc = std::exp(-opt.r * opt.tau);
  return s;
}

// Terminal delivery price for one path, arbitrary start state / volatility
// operator combination (used by the finite-difference legs).
double g_run(const PathEngine& eng, const Setup& su, const OptionSpec& opt,
             const NoiseIncrements& nz, const Curve& y_start,
             PathEngine::OpCombo ops) {
  double acc = su.det;
  eng.run(nz, y_start, ops, [&](const StepInfo& s) {
    if (s.sigma == 0.0) return;
    const std::size_t mm = su.n - s.k;
    acc += s.sigma * std::pow(su.ds, double(mm)) *
           integ_Jxd(s.y, opt.x + double(mm) * su.dt, opt.d);
  });
  return acc;
}

// Per-path terminal price g and tangent delivery average tj for the
// requested parameter, over all paths. For x0 the tangent is deterministic
// (S_tau h folded through J), for y0 it is driven by the deterministic
// flow of the direction, for eta by a noisy flow sharing the same noise.
void base_pass(const Setup& su, const OptionSpec& opt, const GreekRequest& req,
               std::vector<double>& g, std::vector<double>& tj) {
  const ModelSpec& ms = su.ms;
  PathEngine eng(ms);
  g.assign(req.n_paths, 0.0);
  tj.assign(req.n_paths, 0.0);
  const std::pair<double, const PathEngine::PreparedOp*> eta_base{
      1.0, &eng.prepared_eta()};
  const PathEngine::OpCombo eta_ops{&eta_base, 1};
  const std::size_t wc = working_cells(ms, opt.x + opt.tau + opt.d);
  const Curve y0c = clip_curve(ms.y0, wc);

  switch (req.parameter) {
    case GreekParam::X0: {
      const Curve st = semigroup_apply(ms.s_semigroup, opt.tau, *req.dir_curve);
      const double c = integ_Jxd(st, opt.x, opt.d);
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        g[p] = g_run(eng, su, opt, nz, y0c, eta_ops);
        tj[p] = c;
      });
      return;
    }
    case GreekParam::Y0: {
      // J of the deterministic tangent U_{k dt} h, per left point, with the
      // X-semigroup decay already folded in.
      const Curve& h = *req.dir_curve;
      const double du = ms.u_semigroup.decay(su.dt);
      std::vector<double> jc(su.n);
      for (std::size_t k = 0; k < su.n; ++k) {
        const std::size_t mm = su.n - k;
        double pt = opt.x + double(mm) * su.dt;
        if (ms.u_semigroup.shifts()) pt += double(k) * su.dt;
        jc[k] = std::pow(su.ds, double(mm)) * std::pow(du, double(k)) *
                integ_Jxd(h, pt, opt.d);
      }
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        double acc = su.det, t = 0.0;
        eng.run(nz, y0c, eta_ops, [&](const StepInfo& s) {
          if (s.sigma == 0.0) return;
          const std::size_t mm = su.n - s.k;
          acc += s.sigma * std::pow(su.ds, double(mm)) *
                 integ_Jxd(s.y, opt.x + double(mm) * su.dt, opt.d);
          t += s.sigma * jc[s.k];
        });
        g[p] = acc;
        tj[p] = t;
      });
      return;
    }
    case GreekParam::Eta: {
      const PathEngine::PreparedOp zeta = eng.prepare(*req.dir_op);
      const std::pair<double, const PathEngine::PreparedOp*> zeta_base{1.0, &zeta};
      const PathEngine::OpCombo zeta_ops{&zeta_base, 1};
      const Curve zero = clip_curve(Curve::constant(ms.space, 0.0), wc);
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        Curve y = y0c;
        Curve de = zero;
        double acc = su.det, t = 0.0;
        for (std::size_t k = 0; k < su.n; ++k) {
          const auto b_row = nz.m_b ? nz.b_row(k) : std::span<const double>{};
          const auto w_row = nz.m_w ? nz.w_row(k) : std::span<const double>{};
          const auto [sigma, qbz] = eng.z_terms(y, b_row);
          (void)qbz;
          if (sigma != 0.0) {
            const std::size_t mm = su.n - k;
            const double w = std::pow(su.ds, double(mm));
            const double pt = opt.x + double(mm) * su.dt;
            acc += sigma * w * integ_Jxd(y, pt, opt.d);
            t += sigma * w * integ_Jxd(de, pt, opt.d);
          }
          eng.step_flow(de, w_row, zeta_ops);
          eng.step_flow(y, w_row, eta_ops);
        }
        g[p] = acc;
        tj[p] = t;
      });
      return;
    }
  }
  throw std::logic_error("unreachable parameter");
}

GreekEstimate finish(std::span<const double> slots, GreekEstimator kind) {
  const MeanSe r = mean_se(slots);
  GreekEstimate e;
  e.value = r.mean;
  e.se = r.se;
  e.n_paths = r.n;
  e.estimator = kind;
  return e;
}

}  // namespace

GreekEstimate greek_fd(const ModelSpec& m, const OptionSpec& opt,
                       const GreekRequest& req) {
  if (req.n_paths == 0) throw std::invalid_argument("greek_fd: n_paths must be > 0");
  if (req.fd_epsilon <= 0) throw std::invalid_argument("fd_epsilon must be > 0");
  const double nrm = direction_norm(req);
  GreekEstimate zero;
  zero.estimator = GreekEstimator::Fd;
  zero.n_paths = req.n_paths;
  if (nrm == 0.0) return zero;
  const double eps = req.fd_epsilon / nrm;
  const Setup su = make_setup(m, opt);
  const ModelSpec& ms = su.ms;
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eta_base{
      1.0, &eng.prepared_eta()};
  const PathEngine::OpCombo eta_ops{&eta_base, 1};
  std::vector<double> slots(req.n_paths);
  const double scale = su.disc / (2.0 * eps);
  const std::size_t wc = working_cells(ms, opt.x + opt.tau + opt.d);
  const Curve y0c = clip_curve(ms.y0, wc);

  switch (req.parameter) {
    case GreekParam::X0: {
      const Curve st = semigroup_apply(ms.s_semigroup, opt.tau, *req.dir_curve);
      const double c = integ_Jxd(st, opt.x, opt.d);
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        const double g = g_run(eng, su, opt, nz, y0c, eta_ops);
        slots[p] = scale * (opt.payoff.value(g + eps * c, su.strike) -
                            opt.payoff.value(g - eps * c, su.strike));
      });
      break;
    }
    case GreekParam::Y0: {
      Curve up = y0c, dn = y0c;
      up.add_scaled(*req.dir_curve, eps);
      dn.add_scaled(*req.dir_curve, -eps);
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        const double gp = g_run(eng, su, opt, nz, up, eta_ops);
        const double gm = g_run(eng, su, opt, nz, dn, eta_ops);
        slots[p] = scale * (opt.payoff.value(gp, su.strike) -
                            opt.payoff.value(gm, su.strike));
      });
      break;
    }
    case GreekParam::Eta: {
      const PathEngine::PreparedOp zeta = eng.prepare(*req.dir_op);
      const std::pair<double, const PathEngine::PreparedOp*> up[] = {
          {1.0, &eng.prepared_eta()}, {eps, &zeta}};
      const std::pair<double, const PathEngine::PreparedOp*> dn[] = {
          {1.0, &eng.prepared_eta()}, {-eps, &zeta}};
      for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
        NoiseIncrements nz = gen_increments(ms, req.seed, p);
        const double gp = g_run(eng, su, opt, nz, y0c, PathEngine::OpCombo{up, 2});
        const double gm = g_run(eng, su, opt, nz, y0c, PathEngine::OpCombo{dn, 2});
        slots[p] = scale * (opt.payoff.value(gp, su.strike) -
                            opt.payoff.value(gm, su.strike));
      });
      break;
    }
  }
  return finish(slots, GreekEstimator::Fd);
}

GreekEstimate greek_pathwise(const ModelSpec& m, const OptionSpec& opt,
                             const GreekRequest& req) {
  if (req.n_paths == 0)
    throw std::invalid_argument("greek_pathwise: n_paths must be > 0");
  if (!opt.payoff.differentiable())
    throw std::invalid_argument(
        "pathwise Greek needs a differentiable payoff (linear or smoothed_call)");
  const Setup su = make_setup(m, opt);
  std::vector<double> g, tj;
  base_pass(su, opt, req, g, tj);
  std::vector<double> slots(req.n_paths);
  for (std::size_t p = 0; p < req.n_paths; ++p)
    slots[p] = su.disc * opt.payoff.deriv(g[p], su.strike) * tj[p];
  return finish(slots, GreekEstimator::Pathwise);
}

GreekEstimate greek_skorohod(const ModelSpec& m, const OptionSpec& opt,
                             const GreekRequest& req, const RandomizationSpec& rand) {
  if (req.n_paths == 0)
    throw std::invalid_argument("greek_skorohod: n_paths must be > 0");
  if (!opt.payoff.differentiable())
    throw std::invalid_argument(
        "Skorohod Greek needs a differentiable payoff (linear or smoothed_call)");
  const Setup su = make_setup(m, opt);
  const double sd = std::sqrt(eval_norm_sq(su.ms.space, rand.eval_point));
  std::vector<double> g, tj;
  base_pass(su, opt, req, g, tj);
  std::vector<double> slots(req.n_paths), control(req.n_paths);
  for (std::size_t p = 0; p < req.n_paths; ++p) {
    RngStream rs(req.seed, p, StreamTag::Randomizer);
    const double gx = sd * rs.normal();
    const double psi = su.disc * opt.payoff.value(g[p], su.strike);
    const double pw = su.disc * opt.payoff.deriv(g[p], su.strike) * tj[p];
    slots[p] = pw - psi * gx;
    control[p] = psi * gx;
  }
  GreekEstimate e = finish(slots, GreekEstimator::Skorohod);
  const MeanSe c = mean_se(control);
  e.control_mean = c.mean;
  e.control_se = c.se;
  return e;
}

std::vector<double> make_lambda_grid(double tau, std::size_t n_points, double width) {
  if (n_points < 2) throw std::invalid_argument("lambda grid needs >= 2 points");
  const double lo = -width * std::sqrt(tau);
  const double hi = width * std::sqrt(tau);
  std::vector<double> g(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    g[i] = std::exp(lo + (hi - lo) * double(i) / double(n_points - 1));
  return g;
}

LambdaGridResult skorohod_lambda_grid(const ModelSpec& m, const OptionSpec& opt,
                                      const GreekRequest& req,
                                      const RandomizationSpec& rand,
                                      std::span<const double> lambda_grid) {
  if (req.n_paths == 0)
    throw std::invalid_argument("skorohod_lambda_grid: n_paths must be > 0");
  if (!opt.payoff.differentiable())
    throw std::invalid_argument(
        "Skorohod Greek needs a differentiable payoff (linear or smoothed_call)");
  if (lambda_grid.size() < 2)
    throw std::invalid_argument("lambda grid needs >= 2 points");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()) ||
      lambda_grid.front() <= 0.0)
    throw std::invalid_argument("lambda grid must be positive and ascending");

  const Setup su = make_setup(m, opt);
  const ModelSpec& ms = su.ms;
  const double sd = std::sqrt(eval_norm_sq(ms.space, rand.eval_point));
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eta_base{
      1.0, &eng.prepared_eta()};
  const PathEngine::OpCombo eta_ops{&eta_base, 1};

  // Base path quantities; the tangent values double as the pathwise factor
  // at the perturbed parameter (the tangent flow does not depend on the
  // parameter being perturbed for any of the three cases).
  std::vector<double> g, tj;
  base_pass(su, opt, req, g, tj);
  double cx0 = 0.0;
  if (req.parameter == GreekParam::X0) cx0 = tj.empty() ? 0.0 : tj[0];
  PathEngine::PreparedOp zeta;
  if (req.parameter == GreekParam::Eta) zeta = eng.prepare(*req.dir_op);
  const std::size_t wc = working_cells(ms, opt.x + opt.tau + opt.d);
  const Curve y0c = clip_curve(ms.y0, wc);

  const std::size_t nl = lambda_grid.size();
  std::vector<double> slots(req.n_paths), slopes(req.n_paths);
  std::vector<unsigned char> miss(req.n_paths, 0);

  for_each_path(req.n_paths, req.threads, [&](std::size_t p) {
    RngStream rs(req.seed, p, StreamTag::Randomizer);
    const double gx = sd * rs.normal();
    const double xi = std::exp(std::sqrt(opt.tau) * rs.normal());
    NoiseIncrements nz = gen_increments(ms, req.seed, p);

    // g at the randomized parameter theta + (lambda xi - 1) dir
    auto g_lambda = [&](double lam) -> double {
      const double c = lam * xi - 1.0;
      switch (req.parameter) {
        case GreekParam::X0:
          return g[p] + c * cx0;
        case GreekParam::Y0: {
          Curve ys = y0c;
          ys.add_scaled(*req.dir_curve, c);
          return g_run(eng, su, opt, nz, ys, eta_ops);
        }
        case GreekParam::Eta: {
          const std::pair<double, const PathEngine::PreparedOp*> ops[] = {
              {1.0, &eng.prepared_eta()}, {c, &zeta}};
          return g_run(eng, su, opt, nz, y0c, PathEngine::OpCombo{ops, 2});
        }
      }
      throw std::logic_error("unreachable parameter");
    };

    std::vector<double> integrand(nl);
    for (std::size_t i = 0; i < nl; ++i) {
      const double lam = lambda_grid[i];
      const double gl = g_lambda(lam);
      const double psi = su.disc * opt.payoff.value(gl, su.strike);
      const double pw = su.disc * opt.payoff.deriv(gl, su.strike) * tj[p];
      integrand[i] = psi * gx - lam * xi * pw;
    }
    double sl = 0.0;
    for (std::size_t i = 0; i + 1 < nl; ++i)
      sl = std::max(sl, std::abs(integrand[i + 1] - integrand[i]) /
                            (lambda_grid[i + 1] - lambda_grid[i]));
    slopes[p] = sl;

    double u = 1.0 / xi;
    if (u < lambda_grid.front() || u > lambda_grid.back()) {
      miss[p] = 1;
      u = std::clamp(u, lambda_grid.front(), lambda_grid.back());
    }
    const auto it = std::upper_bound(lambda_grid.begin(), lambda_grid.end(), u);
    const std::size_t hi = std::min<std::size_t>(
        std::max<std::ptrdiff_t>(it - lambda_grid.begin(), 1), nl - 1);
    const double l0 = lambda_grid[hi - 1], l1 = lambda_grid[hi];
    const double w = (u - l0) / (l1 - l0);
    slots[p] = -((1.0 - w) * integrand[hi - 1] + w * integrand[hi]);
  });

  std::size_t n_miss = 0;
  for (unsigned char c : miss) n_miss += c;
  const double frac = double(n_miss) / double(req.n_paths);
  if (frac > 1e-3)
    throw std::runtime_error("lambda grid does not cover the 1/xi distribution");

  LambdaGridResult out;
  out.est = finish(slots, GreekEstimator::LambdaGrid);
  out.coverage_miss = frac;
  out.max_slope = *std::max_element(slopes.begin(), slopes.end());
  return out;
}

}  // namespace hestonfwd
