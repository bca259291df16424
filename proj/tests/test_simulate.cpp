#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hestonfwd/config.hpp"
#include "hestonfwd/simulate.hpp"

using namespace hestonfwd;

namespace {

BuiltScenario scenario(const std::string& extra = "") {
  return build_scenario(parse_config("model {\n n_nodes 256\n" + extra + "}\n"));
}

}  // namespace

TEST_CASE("noise increments are reproducible and stream-separated") {
  const auto sc = scenario();
  const NoiseIncrements a = gen_increments(sc.model, 7, 3);
  const NoiseIncrements b = gen_increments(sc.model, 7, 3);
  CHECK(a.w_coef == b.w_coef);
  CHECK(a.b_coef == b.b_coef);
  const NoiseIncrements c = gen_increments(sc.model, 7, 4);
  CHECK(a.w_coef != c.w_coef);
  CHECK(a.n_steps == sc.model.n_steps());
  CHECK(a.m_w == sc.model.q_w.count());
  CHECK(a.m_b == sc.model.q_b.count());
}

TEST_CASE("increment variance matches the spectrum") {
  const auto sc = scenario();
  const double dt = sc.model.dt();
  double acc = 0.0;
  const std::size_t n_paths = 400;
  for (std::size_t p = 0; p < n_paths; ++p) {
    const NoiseIncrements nz = gen_increments(sc.model, 11, p);
    for (std::size_t k = 0; k < nz.n_steps; ++k) {
      const double v = nz.w_row(k)[0];
      acc += v * v;
    }
  }
  const double var = acc / double(n_paths * sc.model.n_steps());
  CHECK(var == doctest::Approx(sc.model.q_w.eigvals[0] * dt).epsilon(0.05));
}

TEST_CASE("constant-gamma z terms are constant in y") {
  const auto sc = scenario();
  const PathEngine eng(sc.model);
  const NoiseIncrements nz = gen_increments(sc.model, 5, 0);
  const auto [s1, q1] = eng.z_terms(sc.model.y0, nz.b_row(0));
  Curve y2 = sc.model.y0;
  y2.scale(3.0);
  const auto [s2, q2] = eng.z_terms(y2, nz.b_row(0));
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-14));
  CHECK(q1 == doctest::Approx(q2).epsilon(1e-14));
  // gamma = first basis vector: ||Q_B^{1/2} gamma||^2 = lambda_1
  CHECK(q1 == doctest::Approx(sc.model.q_b.eigvals[0]).epsilon(1e-10));
}

TEST_CASE("normalized-y z policy is unit scale and zero at zero") {
  const auto sc = scenario(" z_policy normalized_y\n");
  const Curve z = sc.model.z_policy.apply(sc.model.y0);
  CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const Curve z0 = sc.model.z_policy.apply(Curve::constant(sc.space, 0.0));
  CHECK(z0.norm() == 0.0);
}

TEST_CASE("zero vol-of-forward collapses X to the drifted start") {
  const auto sc = scenario(" qb_scale 0\n");
  const PathBundle pb = simulate_path(sc.model, 3, 0);
  const Curve sx0 = semigroup_apply(sc.model.s_semigroup, sc.model.tau, sc.model.x0);
  for (double x : {0.1, 0.5, 1.0})
    CHECK(pb.x.back().eval(x) == doctest::Approx(sx0.eval(x)).epsilon(1e-12));
}

TEST_CASE("path simulation is deterministic") {
  const auto sc = scenario();
  const PathBundle a = simulate_path(sc.model, 9, 2);
  const PathBundle b = simulate_path(sc.model, 9, 2);
  Curve d = a.x.back();
  d.add_scaled(b.x.back(), -1.0);
  CHECK(d.norm() == 0.0);
  CHECK(a.y.size() == sc.model.n_steps() + 1);
  CHECK(a.x.size() == sc.model.n_steps() + 1);
}

TEST_CASE("x0 tangent is the drift semigroup applied to the direction") {
  const auto sc = scenario();
  TangentDirections dirs;
  dirs.x0_dir = kernel_hx(sc.space, 0.5);
  const PathBundle pb = simulate_path(sc.model, 9, 2, &dirs);
  REQUIRE(pb.tangent_x_x0.has_value());
  Curve d = *pb.tangent_x_x0;
  d.add_scaled(semigroup_apply(sc.model.s_semigroup, sc.model.tau, *dirs.x0_dir), -1.0);
  CHECK(d.norm() <= 1e-12);
}

TEST_CASE("y0 tangent scales linearly for the constant-gamma policy") {
  const auto sc = scenario();
  TangentDirections d1, d2;
  d1.y0_dir = kernel_hx(sc.space, 0.5);
  d2.y0_dir = kernel_hx(sc.space, 0.5);
  d2.y0_dir->scale(2.0);
  const PathBundle a = simulate_path(sc.model, 9, 2, &d1);
  const PathBundle b = simulate_path(sc.model, 9, 2, &d2);
  Curve diff = b.tangent_x_y0.back();
  diff.add_scaled(a.tangent_x_y0.back(), -2.0);
  CHECK(diff.norm() <= 1e-10);
}

TEST_CASE("working-length clipping preserves the flow on the window") {
  const auto sc = scenario();
  const ModelSpec& m = sc.model;
  const double max_point = 0.5;
  const std::size_t wc = working_cells(m, max_point);
  CHECK(wc < m.space->n_cells());

  const PathEngine eng(m);
  const NoiseIncrements nz = gen_increments(m, 13, 1);

  std::vector<double> full, clipped;
  const std::pair<double, const PathEngine::PreparedOp*> eb{1.0, &eng.prepared_eta()};
  eng.run(nz, m.y0, PathEngine::OpCombo{&eb, 1},
          [&](const StepInfo& s) { full.push_back(s.y.eval(max_point)); });
  eng.run(nz, clip_curve(m.y0, wc), PathEngine::OpCombo{&eb, 1},
          [&](const StepInfo& s) { clipped.push_back(s.y.eval(max_point)); });
  REQUIRE(full.size() == clipped.size());
  for (std::size_t k = 0; k < full.size(); ++k) CHECK(full[k] == clipped[k]);
}
