#include "hestonfwd/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace hestonfwd {

std::vector<double> gen_coefficients(const CovOp& q, double dt, std::size_t n_steps,
                                     RngStream& stream) {
  const std::size_t m = q.count();
  std::vector<double> out(n_steps * m);
  std::vector<double> sd(m);
  for (std::size_t n = 0; n < m; ++n) sd[n] = std::sqrt(q.eigvals[n] * dt);
  for (std::size_t k = 0; k < n_steps; ++k)
    for (std::size_t n = 0; n < m; ++n) out[k * m + n] = sd[n] * stream.normal();
  return out;
}

NoiseIncrements gen_increments(const ModelSpec& m, std::uint64_t seed,
                               std::uint64_t path_index) {
  NoiseIncrements nz;
  nz.n_steps = m.n_steps();
  nz.m_w = m.q_w.count();
  nz.m_b = m.q_b.count();
  RngStream sw(seed, path_index, StreamTag::W);
  RngStream sb(seed, path_index, StreamTag::B);
  nz.w_coef = gen_coefficients(m.q_w, m.dt(), nz.n_steps, sw);
  nz.b_coef = gen_coefficients(m.q_b, m.dt(), nz.n_steps, sb);
  return nz;
}

PathEngine::PathEngine(const ModelSpec& m) : model_(&m) {
  eta_ = prepare(m.eta);
  u_decay_ = m.u_semigroup.decay(m.dt());
  s_decay_ = m.s_semigroup.decay(m.dt());
  if (m.z_policy.kind == ZPolicyKind::ConstantGamma) {
    const Curve& g = *m.z_policy.gamma;
    gamma_proj_.resize(m.q_b.count());
    qbz_const_ = 0.0;
    for (std::size_t n = 0; n < gamma_proj_.size(); ++n) {
      const double p = inner_product(g, m.q_b.eigvecs[n]);
      gamma_proj_[n] = p;
      qbz_const_ += m.q_b.eigvals[n] * p * p;
    }
  }
}

PathEngine::PreparedOp PathEngine::prepare(const FiniteRankOp& op) const {
  PreparedOp p;
  p.op = &op;
  const std::size_t m = model_->q_w.count();
  p.gram.resize(op.terms.size() * m);
  for (std::size_t j = 0; j < op.terms.size(); ++j)
    for (std::size_t n = 0; n < m; ++n)
      p.gram[j * m + n] = inner_product(op.terms[j].a, model_->q_w.eigvecs[n]);
  return p;
}

void PathEngine::step_flow(Curve& y, std::span<const double> w_row, OpCombo ops) const {
  const std::size_t m = w_row.size();
  for (const auto& [c, p] : ops) {
    for (std::size_t j = 0; j < p->op->terms.size(); ++j) {
      double dot = 0.0;
      for (std::size_t n = 0; n < m; ++n) dot += p->gram[j * m + n] * w_row[n];
      const double amp = c * p->op->terms[j].sigma * dot;
      if (amp != 0.0) y.add_scaled(p->op->terms[j].b, amp);
    }
  }
  if (model_->u_semigroup.shifts())
    y.shift_decay_in_place(u_decay_);
  else
    y.scale(u_decay_);
}

void PathEngine::compute_z_terms(const Curve& y, std::span<const double> b_row,
                                 double& sigma, double& qbz_sq) const {
  if (model_->z_policy.kind == ZPolicyKind::ConstantGamma) {
    double s = 0.0;
    for (std::size_t n = 0; n < b_row.size(); ++n) s += gamma_proj_[n] * b_row[n];
    sigma = s;
    qbz_sq = qbz_const_;
    return;
  }
  const double nrm = y.norm();
  if (nrm == 0.0) {
    sigma = 0.0;
    qbz_sq = 0.0;
    return;
  }
  double s = 0.0, q = 0.0;
  for (std::size_t n = 0; n < b_row.size(); ++n) {
    const double p = inner_product(y, model_->q_b.eigvecs[n]) / nrm;
    s += p * b_row[n];
    q += model_->q_b.eigvals[n] * p * p;
  }
  sigma = s;
  qbz_sq = q;
}

std::pair<double, double> PathEngine::z_terms(const Curve& y,
                                             std::span<const double> b_row) const {
  double s = 0.0, q = 0.0;
  compute_z_terms(y, b_row, s, q);
  return {s, q};
}

void step_system(const PathEngine& eng, Curve& y, Curve& x, std::span<const double> w_row,
                 std::span<const double> b_row) {
  const auto [sigma, qbz] = eng.z_terms(y, b_row);
  (void)qbz;
  if (sigma != 0.0) x.add_scaled(y, sigma);
  if (eng.model().s_semigroup.shifts())
    x.shift_decay_in_place(eng.s_decay());
  else
    x.scale(eng.s_decay());
  const std::pair<double, const PathEngine::PreparedOp*> base{1.0, &eng.prepared_eta()};
  eng.step_flow(y, w_row, PathEngine::OpCombo{&base, 1});
}

PathBundle simulate_path(const ModelSpec& m, std::uint64_t seed, std::uint64_t path_index,
                         const TangentDirections* dirs) {
  PathEngine eng(m);
  PathBundle out;
  out.seed = seed;
  out.path_index = path_index;
  out.noise = gen_increments(m, seed, path_index);
  const std::size_t n = m.n_steps();

  const bool want_y0 = dirs && dirs->y0_dir.has_value();
  const bool want_eta = dirs && dirs->eta_dir.has_value();
  PathEngine::PreparedOp eta_dir_prep;
  if (want_eta) eta_dir_prep = eng.prepare(*dirs->eta_dir);

  Curve y = m.y0;
  Curve x = m.x0;
  std::optional<Curve> dy, dxy;  // tangent in y0 direction
  std::optional<Curve> de, dxe;  // tangent in eta direction
  if (want_y0) {
    dy = *dirs->y0_dir;
    dxy = Curve::constant(m.space, 0.0);
  }
  if (want_eta) {
    de = Curve::constant(m.space, 0.0);
    dxe = Curve::constant(m.space, 0.0);
  }

  const std::pair<double, const PathEngine::PreparedOp*> eta_base{1.0,
                                                                  &eng.prepared_eta()};
  const std::pair<double, const PathEngine::PreparedOp*> eta_dir_base{1.0,
                                                                      &eta_dir_prep};
  auto apply_s = [&](Curve& c) {
    if (m.s_semigroup.shifts())
      c.shift_decay_in_place(eng.s_decay());
    else
      c.scale(eng.s_decay());
  };

  out.y.push_back(y);
  out.x.push_back(x);
  if (want_y0) out.tangent_x_y0.push_back(*dxy);
  if (want_eta) out.tangent_x_eta.push_back(*dxe);

  for (std::size_t k = 0; k < n; ++k) {
    const auto b_row = out.noise.m_b ? out.noise.b_row(k) : std::span<const double>{};
    const auto w_row = out.noise.m_w ? out.noise.w_row(k) : std::span<const double>{};
    const auto [sigma, qbz] = eng.z_terms(y, b_row);
    (void)qbz;
    if (sigma != 0.0) x.add_scaled(y, sigma);
    apply_s(x);
    if (want_y0) {
      if (sigma != 0.0) dxy->add_scaled(*dy, sigma);
      apply_s(*dxy);
      // deterministic flow: d/deps of Y started at y0 + eps h
      if (m.u_semigroup.shifts())
        dy->shift_decay_in_place(eng.u_decay());
      else
        dy->scale(eng.u_decay());
    }
    if (want_eta) {
      if (sigma != 0.0) dxe->add_scaled(*de, sigma);
      apply_s(*dxe);
      eng.step_flow(*de, w_row, PathEngine::OpCombo{&eta_dir_base, 1});
    }
    eng.step_flow(y, w_row, PathEngine::OpCombo{&eta_base, 1});
    out.y.push_back(y);
    out.x.push_back(x);
    if (want_y0) out.tangent_x_y0.push_back(*dxy);
    if (want_eta) out.tangent_x_eta.push_back(*dxe);
  }

  if (dirs && dirs->x0_dir)
    out.tangent_x_x0 = semigroup_apply(m.s_semigroup, m.tau, *dirs->x0_dir);
  return out;
}

std::size_t working_cells(const ModelSpec& m, double max_point) {
  const std::size_t full = m.space->grid().n_cells;
  if (m.z_policy.kind != ZPolicyKind::ConstantGamma) return full;
  const std::size_t probe =
      std::size_t(std::ceil(max_point / m.space->dx() - 1e-9));
  return std::min(full, probe + m.n_steps() + 2);
}

Curve clip_curve(const Curve& c, std::size_t cells) {
  if (cells >= c.valid_len()) return c;
  return Curve(c.space(), c.f0(), c.deriv(), cells);
}

}  // namespace hestonfwd
