#include "hestonfwd/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace hestonfwd {

namespace {

ModelSpec with_horizon(const ModelSpec& m, double t) {
  ModelSpec ms = m;
  ms.tau = t;
  return ms;
}

// S_t^* h (adjoint of the X semigroup), including any damping factor.
Curve semigroup_adjoint(const SemigroupSpec& s, double t, const Curve& h) {
  Curve a = s.shifts() ? shift_adjoint(h, t) : h;
  const double d = s.decay(t);
  if (d != 1.0) a.scale(d);
  return a;
}

// Adjoints S_{m dt}^* h for m = 1..n, indexed [m-1].
std::vector<Curve> adjoint_ladder(const ModelSpec& m, std::size_t n, const Curve& h) {
  std::vector<Curve> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k)
    out.push_back(semigroup_adjoint(m.s_semigroup, double(k) * m.dt(), h));
  return out;
}

// Probe point for evaluating S_{m dt} applied to a curve: for shift kinds
// the evaluation moves right; the decay factor is handled by the caller.
double probe_point(const SemigroupSpec& s, double x, std::size_t m, double dt) {
  return s.shifts() ? x + double(m) * dt : x;
}

}  // namespace

std::vector<CharFuncEstimate> char_functional(const ModelSpec& m,
                                              std::span<const Curve> probes, double t,
                                              std::size_t n_paths, std::uint64_t seed,
                                              int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const std::size_t np = probes.size();
  std::vector<double> phase(np);
  const Curve drift = semigroup_apply(ms.s_semigroup, t, ms.x0);
  std::vector<std::vector<Curve>> adj;
  adj.reserve(np);
  for (std::size_t j = 0; j < np; ++j) {
    phase[j] = inner_product(drift, probes[j]);
    adj.push_back(adjoint_ladder(ms, n, probes[j]));
  }

  std::vector<std::vector<double>> slots(np, std::vector<double>(n_paths));
  PathEngine eng(ms);
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    std::vector<double> q(np, 0.0);
    eng.run(nz, [&](const StepInfo& s) {
      for (std::size_t j = 0; j < np; ++j) {
        const double c = inner_product(s.y, adj[j][n - 1 - s.k]);
        q[j] += dt * s.qbz_sq * c * c;
      }
    });
    for (std::size_t j = 0; j < np; ++j) slots[j][p] = std::exp(-0.5 * q[j]);
  });

  std::vector<CharFuncEstimate> out(np);
  for (std::size_t j = 0; j < np; ++j) {
    const MeanSe r = mean_se(slots[j]);
    const std::complex<double> ph{std::cos(phase[j]), std::sin(phase[j])};
    out[j].value = ph * r.mean;
    out[j].re_se = std::abs(ph.real()) * r.se;
    out[j].im_se = std::abs(ph.imag()) * r.se;
    out[j].n_paths = n_paths;
  }
  return out;
}

CharFuncEstimate char_functional(const ModelSpec& m, const Curve& h, double t,
                                 std::size_t n_paths, std::uint64_t seed, int threads) {
  return char_functional(m, std::span<const Curve>{&h, 1}, t, n_paths, seed,
                         threads)[0];
}

std::vector<CharFuncEstimate> char_functional_empirical(const ModelSpec& m,
                                                        std::span<const Curve> probes,
                                                        double t, std::size_t n_paths,
                                                        std::uint64_t seed,
                                                        int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const std::size_t np = probes.size();
  std::vector<double> phase(np);
  const Curve drift = semigroup_apply(ms.s_semigroup, t, ms.x0);
  std::vector<std::vector<Curve>> adj;
  adj.reserve(np);
  for (std::size_t j = 0; j < np; ++j) {
    phase[j] = inner_product(drift, probes[j]);
    adj.push_back(adjoint_ladder(ms, n, probes[j]));
  }

  std::vector<std::vector<double>> re(np, std::vector<double>(n_paths));
  std::vector<std::vector<double>> im(np, std::vector<double>(n_paths));
  PathEngine eng(ms);
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    std::vector<double> v(np);
    for (std::size_t j = 0; j < np; ++j) v[j] = phase[j];
    eng.run(nz, [&](const StepInfo& s) {
      if (s.sigma == 0.0) return;
      for (std::size_t j = 0; j < np; ++j)
        v[j] += s.sigma * inner_product(s.y, adj[j][n - 1 - s.k]);
    });
    for (std::size_t j = 0; j < np; ++j) {
      re[j][p] = std::cos(v[j]);
      im[j][p] = std::sin(v[j]);
    }
  });

  std::vector<CharFuncEstimate> out(np);
  for (std::size_t j = 0; j < np; ++j) {
    const MeanSe rr = mean_se(re[j]);
    const MeanSe ri = mean_se(im[j]);
    out[j].value = {rr.mean, ri.mean};
    out[j].re_se = rr.se;
    out[j].im_se = ri.se;
    out[j].n_paths = n_paths;
  }
  return out;
}

MeanSe mc_forward_mean(const ModelSpec& m, double t, double x, std::size_t n_paths,
                       std::uint64_t seed, int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double det = semigroup_apply(ms.s_semigroup, t, ms.x0).eval(x);
  const double ds = ms.s_semigroup.decay(dt);

  std::vector<double> slots(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  const Curve y0c = clip_curve(ms.y0, working_cells(ms, x + t));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double acc = det;
    eng.run(nz, y0c, PathEngine::OpCombo{&eb, 1}, [&](const StepInfo& s) {
      if (s.sigma == 0.0) return;
      const std::size_t mm = n - s.k;
      acc += s.sigma * std::pow(ds, double(mm)) *
             s.y.eval(probe_point(ms.s_semigroup, x, mm, dt));
    });
    slots[p] = acc;
  });
  return mean_se(slots);
}

namespace {

// Paired forward samples (value at two probes) for covariance estimates.
MeanSe paired_cov(std::vector<double>& a, std::vector<double>& b) {
  const MeanSe ma = mean_se(a);
  const MeanSe mb = mean_se(b);
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    prod[i] = (a[i] - ma.mean) * (b[i] - mb.mean);
  MeanSe r = mean_se(prod);
  if (r.n > 1) r.mean *= double(r.n) / double(r.n - 1);
  return r;
}

}  // namespace

MeanSe mc_forward_cov(const ModelSpec& m, double t, double x, double y,
                      std::size_t n_paths, std::uint64_t seed, int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);

  std::vector<double> fx(n_paths), fy(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  const Curve y0c = clip_curve(ms.y0, working_cells(ms, std::max(x, y) + t));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double ax = 0.0, ay = 0.0;
    eng.run(nz, y0c, PathEngine::OpCombo{&eb, 1}, [&](const StepInfo& s) {
      if (s.sigma == 0.0) return;
      const std::size_t mm = n - s.k;
      const double d = std::pow(ds, double(mm));
      ax += s.sigma * d * s.y.eval(probe_point(ms.s_semigroup, x, mm, dt));
      ay += s.sigma * d * s.y.eval(probe_point(ms.s_semigroup, y, mm, dt));
    });
    fx[p] = ax;
    fy[p] = ay;
  });
  return paired_cov(fx, fy);
}

MeanSe mc_delivery_cov(const ModelSpec& m, double t, double x, double d1, double y,
                       double d2, std::size_t n_paths, std::uint64_t seed, int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);
  if (!ms.s_semigroup.shifts())
    throw std::invalid_argument("delivery covariance needs a shift semigroup for X");

  std::vector<double> gx(n_paths), gy(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  const Curve y0c =
      clip_curve(ms.y0, working_cells(ms, std::max(x + d1, y + d2) + t));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double ax = 0.0, ay = 0.0;
    eng.run(nz, y0c, PathEngine::OpCombo{&eb, 1}, [&](const StepInfo& s) {
      if (s.sigma == 0.0) return;
      const std::size_t mm = n - s.k;
      const double d = std::pow(ds, double(mm));
      ax += s.sigma * d * integ_Jxd(s.y, x + double(mm) * dt, d1);
      ay += s.sigma * d * integ_Jxd(s.y, y + double(mm) * dt, d2);
    });
    gx[p] = ax;
    gy[p] = ay;
  });
  return paired_cov(gx, gy);
}

MeanSe cov_forward(const ModelSpec& m, double t, double x, double y, std::size_t n_paths,
                   std::uint64_t seed, int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);

  std::vector<double> slots(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  const Curve y0c = clip_curve(ms.y0, working_cells(ms, std::max(x, y) + t));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double acc = 0.0;
    eng.run(nz, y0c, PathEngine::OpCombo{&eb, 1}, [&](const StepInfo& s) {
      const std::size_t mm = n - s.k;
      const double d2 = std::pow(ds, 2.0 * double(mm));
      acc += dt * s.qbz_sq * d2 *
             s.y.eval(probe_point(ms.s_semigroup, x, mm, dt)) *
             s.y.eval(probe_point(ms.s_semigroup, y, mm, dt));
    });
    slots[p] = acc;
  });
  return mean_se(slots);
}

double cov_forward_const_gamma(const ModelSpec& m, double t, double x, double y) {
  if (m.z_policy.kind != ZPolicyKind::ConstantGamma)
    throw std::invalid_argument("closed-form forward covariance needs a constant gamma");
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);
  const double du = ms.u_semigroup.decay(dt);

  double qbz = 0.0;
  for (std::size_t nn = 0; nn < ms.q_b.count(); ++nn) {
    const double pr = inner_product(*ms.z_policy.gamma, ms.q_b.eigvecs[nn]);
    qbz += ms.q_b.eigvals[nn] * pr * pr;
  }

  std::vector<Curve> ev;  // eta applied to each Q_W eigenvector
  ev.reserve(ms.q_w.count());
  for (std::size_t nn = 0; nn < ms.q_w.count(); ++nn)
    ev.push_back(ms.eta.apply(ms.q_w.eigvecs[nn]));

  auto eval_u = [&](const Curve& c, std::size_t j, double pt) {
    return std::pow(du, double(j)) *
           c.eval(probe_point(ms.u_semigroup, pt, j, dt));
  };

  double cov = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t mm = n - k;
    const double a = probe_point(ms.s_semigroup, x, mm, dt);
    const double b = probe_point(ms.s_semigroup, y, mm, dt);
    // E[Y_k(a) Y_k(b)] under the discrete scheme
    double second = eval_u(ms.y0, k, a) * eval_u(ms.y0, k, b);
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t nn = 0; nn < ev.size(); ++nn)
        second += ms.q_w.eigvals[nn] * dt * eval_u(ev[nn], i, a) * eval_u(ev[nn], i, b);
    cov += dt * qbz * std::pow(ds, 2.0 * double(mm)) * second;
  }
  return cov;
}

MeanSe cov_delivery(const ModelSpec& m, double t, double x, double d1, double y,
                    double d2, std::size_t n_paths, std::uint64_t seed, int threads) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  const double ds = ms.s_semigroup.decay(dt);
  if (!ms.s_semigroup.shifts())
    throw std::invalid_argument("delivery covariance needs a shift semigroup for X");

  std::vector<double> slots(n_paths);
  PathEngine eng(ms);
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  const Curve y0c =
      clip_curve(ms.y0, working_cells(ms, std::max(x + d1, y + d2) + t));
  for_each_path(n_paths, threads, [&](std::size_t p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    double acc = 0.0;
    eng.run(nz, y0c, PathEngine::OpCombo{&eb, 1}, [&](const StepInfo& s) {
      const std::size_t mm = n - s.k;
      const double dd = std::pow(ds, 2.0 * double(mm));
      acc += dt * s.qbz_sq * dd * integ_Jxd(s.y, x + double(mm) * dt, d1) *
             integ_Jxd(s.y, y + double(mm) * dt, d2);
    });
    slots[p] = acc;
  });
  return mean_se(slots);
}

Curve cov_operator_apply(const ModelSpec& m, double t, const Curve& h,
                         std::size_t n_paths, std::uint64_t seed) {
  const ModelSpec ms = with_horizon(m, t);
  const std::size_t n = ms.n_steps();
  const double dt = ms.dt();
  if (n == 0 || n_paths == 0) return Curve::constant(ms.space, 0.0);
  const std::vector<Curve> adj = adjoint_ladder(ms, n, h);

  PathEngine eng(ms);
  Curve acc = Curve::constant(ms.space, 0.0);
  auto apply_s = [&](Curve& c) {
    if (ms.s_semigroup.shifts())
      c.shift_decay_in_place(eng.s_decay());
    else
      c.scale(eng.s_decay());
  };
  for (std::size_t p = 0; p < n_paths; ++p) {
    NoiseIncrements nz = gen_increments(ms, seed, p);
    Curve a = Curve::constant(ms.space, 0.0);
    eng.run(nz, [&](const StepInfo& s) {
      const double c = inner_product(s.y, adj[n - 1 - s.k]);
      a.add_scaled(s.y, dt * s.qbz_sq * c);
      apply_s(a);
    });
    acc.add_scaled(a, 1.0);
  }
  acc.scale(1.0 / double(n_paths));
  return acc;
}

}  // namespace hestonfwd
