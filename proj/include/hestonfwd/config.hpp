#pragma once

#include <string>

#include "hestonfwd/greeks.hpp"

namespace hestonfwd {

// Symbolic curve expression: a sum of terms, each an optional scalar times
// one of the named generators:
//   const(c)    constant curve c
//   sat(a,k)    a * (1 - exp(-k x))
//   kernel(x)   reproducing kernel h_x
//   onb(i)      i-th vector (1-based) of the orthonormal basis built from
//               the saturating seed family {1, 1-e^-x, 1-e^-2x, ...}
struct CurveTerm {
  enum class Kind { Const, Sat, Kernel, Onb };
  Kind kind = Kind::Const;
  double coef = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
};
using CurveExpr = std::vector<CurveTerm>;

CurveExpr parse_curve_expr(const std::string& text);
std::string format_curve_expr(const CurveExpr& e);

struct EtaTermSpec {
  double sigma = 0.0;
  CurveExpr a;
  CurveExpr b;
};

struct ModelBlock {
  double alpha = 1.0;
  double dx = 1.0 / 64.0;
  std::size_t n_nodes = 1920;
  std::size_t extension = 64;
  CurveExpr x0;
  CurveExpr y0;
  std::vector<EtaTermSpec> eta_terms;
  std::size_t qw_modes = 8;
  double qw_scale = 1.0;
  std::size_t qb_modes = 8;
  double qb_scale = 1.0;
  SemigroupKind s_kind = SemigroupKind::LeftShift;
  double s_kappa = 0.0;
  SemigroupKind u_kind = SemigroupKind::DampedLeftShift;
  double u_kappa = 0.5;
  ZPolicyKind z_kind = ZPolicyKind::ConstantGamma;
  CurveExpr gamma;
  double tau = 0.5;
};

struct OptionBlock {
  Payoff payoff;  // strike unset = at-the-money
  double tau = 0.5;
  double x = 0.25;
  double d = 0.25;
  double r = 0.02;
};

struct RunBlock {
  std::size_t n_paths = 20000;
  std::uint64_t seed = 20260801;
  int threads = 1;
  std::size_t dump_paths = 4;        // trajectories written by the path dump
  bool fault_inject_kernel = false;  // testing hook: corrupt the verify kernels
};

struct GreekBlock {
  GreekParam parameter = GreekParam::X0;
  CurveExpr direction;                      // x0 / y0
  std::vector<EtaTermSpec> direction_terms; // eta
  std::vector<GreekEstimator> estimators = {
      GreekEstimator::Fd, GreekEstimator::Pathwise, GreekEstimator::Skorohod};
  double fd_epsilon = 1e-3;
  double eval_point = 0.25;
};

struct ScenarioConfig {
  ModelBlock model;
  OptionBlock option;
  RunBlock run;
  GreekBlock greek;
};

ScenarioConfig default_config();

// Plain-text nested-block format; unknown blocks or keys are rejected.
ScenarioConfig parse_config(const std::string& text);
// Canonical form: parse(serialize(c)) == c and serializes identically.
std::string serialize_config(const ScenarioConfig& c);

// Built objects.
struct BuiltScenario {
  SpacePtr space;
  std::vector<Curve> onb;  // shared basis behind onb(i), Q_W, Q_B
  ModelSpec model;
  OptionSpec option;
};

BuiltScenario build_scenario(const ScenarioConfig& c);
Curve build_curve(const CurveExpr& e, const SpacePtr& space,
                  const std::vector<Curve>& onb);
FiniteRankOp build_finite_rank(const std::vector<EtaTermSpec>& terms,
                               const SpacePtr& space, const std::vector<Curve>& onb);

}  // namespace hestonfwd
