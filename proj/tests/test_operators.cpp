#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hestonfwd/operators.hpp"

using namespace hestonfwd;

namespace {

SpacePtr sp() {
  static SpacePtr s = make_space(Weight::exponential(1.0), Grid(1.0 / 64, 512, 64));
  return s;
}

std::vector<Curve> onb3() {
  std::vector<Curve> seeds;
  seeds.push_back(Curve::constant(sp(), 1.0));
  for (double k : {1.0, 2.0}) {
    seeds.push_back(Curve::from_function(
        sp(), [k](double x) { return 1.0 - std::exp(-k * x); },
        [k](double x) { return k * std::exp(-k * x); }));
  }
  return build_onb(seeds);
}

}  // namespace

TEST_CASE("gram-schmidt produces an orthonormal family") {
  const auto e = onb3();
  REQUIRE(e.size() == 3);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j)
      CHECK(inner_product(e[i], e[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("gram-schmidt rejects a dependent family") {
  std::vector<Curve> seeds{Curve::constant(sp(), 1.0), Curve::constant(sp(), 2.0)};
  CHECK_THROWS_AS(build_onb(seeds), std::invalid_argument);
}

TEST_CASE("covariance operator spectral action") {
  const auto e = onb3();
  CovOp q{{0.9, 0.3, 0.1}, e};
  CHECK(q.trace() == doctest::Approx(1.3).epsilon(1e-14));
  for (std::size_t n = 0; n < 3; ++n) {
    Curve v = q.apply(e[n]);
    v.add_scaled(e[n], -q.eigvals[n]);
    CHECK(v.norm() <= 1e-10);
    Curve s = cov_sqrt_apply(q, e[n]);
    s.add_scaled(e[n], -std::sqrt(q.eigvals[n]));
    CHECK(s.norm() <= 1e-10);
  }
}

TEST_CASE("finite rank operator convention f -> sum sigma <a,f> b") {
  const auto e = onb3();
  FiniteRankOp op{{{2.0, e[0], e[1]}, {0.5, e[1], e[2]}}};
  const Curve f = op.apply(e[0]);  // = 2 e[1]
  Curve d = f;
  d.add_scaled(e[1], -2.0);
  CHECK(d.norm() <= 1e-10);
  CHECK(inner_product(op.apply(e[1]), e[2]) == doctest::Approx(0.5).epsilon(1e-10));
  const FiniteRankOp half = op.scaled(0.5);
  CHECK(inner_product(half.apply(e[0]), e[1]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hilbert-schmidt norms") {
  const auto e = onb3();
  RankOneOp r{e[0], e[1]};
  CHECK(hs_norm(r) == doctest::Approx(1.0).epsilon(1e-10));
  FiniteRankOp op{{{2.0, e[0], e[1]}, {0.5, e[1], e[2]}}};
  CHECK(hs_norm(op) == doctest::Approx(std::sqrt(4.25)).epsilon(1e-10));
}

TEST_CASE("semigroup kinds") {
  const Curve f = Curve::from_function(
      sp(), [](double x) { return std::exp(-x); },
      [](double x) { return -std::exp(-x); });

  const SemigroupSpec pure{SemigroupKind::LeftShift, 0.0};
  CHECK(semigroup_apply(pure, 0.5, f).eval(0.25) ==
        doctest::Approx(f.eval(0.75)).epsilon(1e-12));

  const SemigroupSpec damped{SemigroupKind::DampedLeftShift, 0.4};
  CHECK(semigroup_apply(damped, 0.5, f).eval(0.25) ==
        doctest::Approx(std::exp(-0.2) * f.eval(0.75)).epsilon(1e-12));

  const SemigroupSpec scal{SemigroupKind::ScalarDecay, 0.4};
  CHECK(semigroup_apply(scal, 0.5, f).eval(0.25) ==
        doctest::Approx(std::exp(-0.2) * f.eval(0.25)).epsilon(1e-12));

  // semigroup law, exact for index shifts
  Curve a = semigroup_apply(damped, 0.375, f);
  a.add_scaled(semigroup_apply(damped, 0.25, semigroup_apply(damped, 0.125, f)), -1.0);
  CHECK(a.norm() <= 1e-13);
}

TEST_CASE("non-grid shift times are rejected") {
  const Curve f = Curve::constant(sp(), 1.0);
  CHECK_THROWS_AS(shift(f, 0.01), std::invalid_argument);
}
