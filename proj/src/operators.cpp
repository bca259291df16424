#include "hestonfwd/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace hestonfwd {

double CovOp::trace() const {
  double t = 0.0;
  for (double l : eigvals) t += l;
  return t;
}

Curve CovOp::apply(const Curve& f) const {
  Curve out = Curve::constant(f.space(), 0.0);
  for (std::size_t n = 0; n < eigvals.size(); ++n)
    out.add_scaled(eigvecs[n], eigvals[n] * inner_product(eigvecs[n], f));
  return out;
}

Curve RankOneOp::apply(const Curve& f) const {
  Curve out = right;
  out.scale(inner_product(left, f));
  return out;
}

Curve FiniteRankOp::apply(const Curve& f) const {
  if (terms.empty()) throw std::invalid_argument("empty finite-rank operator");
  Curve out = Curve::constant(f.space(), 0.0);
  for (const auto& t : terms) out.add_scaled(t.b, t.sigma * inner_product(t.a, f));
  return out;
}

FiniteRankOp FiniteRankOp::scaled(double c) const {
  FiniteRankOp out = *this;
  for (auto& t : out.terms) t.sigma *= c;
  return out;
}

double SemigroupSpec::decay(double t) const {
  return kind == SemigroupKind::LeftShift ? 1.0 : std::exp(-kappa * t);
}

std::vector<Curve> build_onb(const std::vector<Curve>& seed_family) {
  if (seed_family.empty()) throw std::invalid_argument("empty seed family");
  std::vector<Curve> onb;
  onb.reserve(seed_family.size());
  for (const Curve& seed : seed_family) {
    Curve v = seed;
    const double before = v.norm();
    for (const Curve& e : onb) v.add_scaled(e, -inner_product(e, v));
    const double after = v.norm();
    // condition estimate ~ (before/after)^2; reject past 1e12
    if (after <= 0.0 || before / after > 1e6)
      throw std::invalid_argument("degenerate seed family: near-singular Gram matrix");
    v.scale(1.0 / after);
    onb.push_back(std::move(v));
  }
  return onb;
}

Curve cov_sqrt_apply(const CovOp& q, const Curve& f) {
  Curve out = Curve::constant(f.space(), 0.0);
  for (std::size_t n = 0; n < q.eigvals.size(); ++n)
    out.add_scaled(q.eigvecs[n], std::sqrt(q.eigvals[n]) * inner_product(q.eigvecs[n], f));
  return out;
}

double hs_norm(const RankOneOp& t) { return t.left.norm() * t.right.norm(); }

double hs_norm(const FiniteRankOp& t) {
  // ||T||_HS^2 = sum_{jk} s_j s_k <a_j,a_k> <b_j,b_k>
  double acc = 0.0;
  for (const auto& tj : t.terms)
    for (const auto& tk : t.terms)
      acc += tj.sigma * tk.sigma * inner_product(tj.a, tk.a) * inner_product(tj.b, tk.b);
  return std::sqrt(std::max(acc, 0.0));
}

Curve semigroup_apply(const SemigroupSpec& s, double t, const Curve& f) {
  if (t < 0.0) throw std::domain_error("semigroup time must be nonnegative");
  switch (s.kind) {
    case SemigroupKind::LeftShift:
      return shift(f, t);
    case SemigroupKind::DampedLeftShift: {
      Curve out = shift(f, t);
      out.scale(std::exp(-s.kappa * t));
      return out;
    }
    case SemigroupKind::ScalarDecay: {
      Curve out = f;
      out.scale(std::exp(-s.kappa * t));
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace hestonfwd
