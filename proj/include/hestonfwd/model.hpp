#pragma once

#include <optional>

#include "hestonfwd/operators.hpp"

namespace hestonfwd {

enum class ZPolicyKind { ConstantGamma, NormalizedY };

struct ZPolicy {
  ZPolicyKind kind = ZPolicyKind::ConstantGamma;
  std::optional<Curve> gamma;  // required for ConstantGamma, unit norm

  // Z_t as a curve; for NormalizedY returns exactly zero when y = 0.
  Curve apply(const Curve& y) const;
};

// Full model state for the coupled forward/volatility system.
struct ModelSpec {
  SpacePtr space;
  Curve x0;
  Curve y0;
  FiniteRankOp eta;
  CovOp q_w;
  CovOp q_b;
  SemigroupSpec s_semigroup;  // drives X
  SemigroupSpec u_semigroup;  // drives Y
  ZPolicy z_policy;
  double tau = 0.5;  // simulation horizon

  double dt() const { return space->dx(); }
  std::size_t n_steps() const;
  // d_max: longest delivery period the run will query
  void validate(double d_max = 0.0) const;
};

}  // namespace hestonfwd
