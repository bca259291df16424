#include "hestonfwd/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hestonfwd {

Curve ZPolicy::apply(const Curve& y) const {
  if (kind == ZPolicyKind::ConstantGamma) {
    if (!gamma) throw std::invalid_argument("constant Z policy needs gamma");
    return *gamma;
  }
  const double n2 = y.norm_sq();
  if (n2 == 0.0) return Curve::constant(y.space(), 0.0);
  Curve z = y;
  z.scale(1.0 / std::sqrt(n2));
  return z;
}

std::size_t ModelSpec::n_steps() const {
  const double r = tau / dt();
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9)
    throw std::invalid_argument("horizon must be a whole number of time steps");
  return std::size_t(k);
}

void ModelSpec::validate(double d_max) const {
  if (!space) throw std::invalid_argument("model needs a space");
  if (tau < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  (void)n_steps();
  if (x0.space() != space || y0.space() != space)
    throw std::invalid_argument("initial curves live on a different grid");
  const double need = (tau + d_max) / space->dx();
  if (double(space->grid().extension) + 1e-9 < std::ceil(need))
    throw std::invalid_argument("grid extension too small for horizon plus delivery");
  if (q_w.eigvals.size() != q_w.eigvecs.size() || q_b.eigvals.size() != q_b.eigvecs.size())
    throw std::invalid_argument("covariance eigenpairs inconsistent");
  for (double l : q_w.eigvals)
    if (l < 0.0) throw std::invalid_argument("negative covariance eigenvalue");
  for (double l : q_b.eigvals)
    if (l < 0.0) throw std::invalid_argument("negative covariance eigenvalue");
  if (z_policy.kind == ZPolicyKind::ConstantGamma) {
    if (!z_policy.gamma) throw std::invalid_argument("constant Z policy needs gamma");
    if (std::abs(z_policy.gamma->norm() - 1.0) > 1e-6)
      throw std::invalid_argument("gamma must have unit norm");
  }
}

}  // namespace hestonfwd
