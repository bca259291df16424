#pragma once

#include <vector>

#include "hestonfwd/curve.hpp"

namespace hestonfwd {

// Trace-class covariance operator given by eigenpairs orthonormal in the
// curve space.
struct CovOp {
  std::vector<double> eigvals;
  std::vector<Curve> eigvecs;

  std::size_t count() const { return eigvals.size(); }
  double trace() const;
  Curve apply(const Curve& f) const;
};

// a (x) b : f -> <a, f>_w b
struct RankOneOp {
  Curve left;
  Curve right;

  Curve apply(const Curve& f) const;
};

// f -> sum_j sigma_j <a_j, f>_w b_j
struct FiniteRankTerm {
  double sigma;
  Curve a;
  Curve b;
};

struct FiniteRankOp {
  std::vector<FiniteRankTerm> terms;

  Curve apply(const Curve& f) const;
  FiniteRankOp scaled(double c) const;
};

enum class SemigroupKind { LeftShift, DampedLeftShift, ScalarDecay };

struct SemigroupSpec {
  SemigroupKind kind = SemigroupKind::LeftShift;
  double kappa = 0.0;

  // multiplicative factor e^{-kappa t} (1 for the pure shift)
  double decay(double t) const;
  bool shifts() const { return kind != SemigroupKind::ScalarDecay; }
};

// Modified Gram-Schmidt in <.,.>_w; throws on a near-singular seed family.
std::vector<Curve> build_onb(const std::vector<Curve>& seed_family);

Curve cov_sqrt_apply(const CovOp& q, const Curve& f);

double hs_norm(const RankOneOp& t);
double hs_norm(const FiniteRankOp& t);

Curve semigroup_apply(const SemigroupSpec& s, double t, const Curve& f);

}  // namespace hestonfwd
