#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hestonfwd/config.hpp"
#include "hestonfwd/greeks.hpp"

using namespace hestonfwd;

namespace {

BuiltScenario scenario(const std::string& extra = "") {
  return build_scenario(parse_config("model {\n n_nodes 256\n}\n" + extra));
}

GreekRequest request(const BuiltScenario& sc, GreekParam p, std::size_t n_paths) {
  GreekRequest req;
  req.parameter = p;
  req.n_paths = n_paths;
  req.seed = 424242;
  req.threads = 1;
  if (p == GreekParam::Eta) {
    FiniteRankOp dir;
    dir.terms.push_back({1.0, sc.onb[0], sc.onb[1]});
    req.dir_op = dir;
  } else {
    req.dir_curve = kernel_hx(sc.space, 0.5);
  }
  return req;
}

double zstat(const GreekEstimate& a, const GreekEstimate& b) {
  return std::abs(a.value - b.value) / std::sqrt(a.se * a.se + b.se * b.se + 1e-300);
}

}  // namespace

TEST_CASE("linear payoff: pathwise x0 sensitivity is exact") {
  const auto sc = scenario("option {\n payoff linear\n}\n");
  const GreekRequest req = request(sc, GreekParam::X0, 200);
  const GreekEstimate e = greek_pathwise(sc.model, sc.option, req);
  const Curve sh = semigroup_apply(sc.model.s_semigroup, sc.option.tau, *req.dir_curve);
  const double exact = std::exp(-sc.option.r * sc.option.tau) *
                       integ_Jxd(sh, sc.option.x, sc.option.d);
  CHECK(e.value == doctest::Approx(exact).epsilon(1e-12));
  CHECK(e.se <= 1e-12);
}

TEST_CASE("fd and pathwise agree for the smoothed call") {
  const auto sc = scenario();
  for (GreekParam p : {GreekParam::X0, GreekParam::Y0, GreekParam::Eta}) {
    const GreekRequest req = request(sc, p, 3000);
    const GreekEstimate fd = greek_fd(sc.model, sc.option, req);
    const GreekEstimate pw = greek_pathwise(sc.model, sc.option, req);
    CHECK(zstat(fd, pw) <= 4.0);
  }
}

TEST_CASE("skorohod agrees with pathwise and its control is centered") {
  const auto sc = scenario();
  const RandomizationSpec rnd{0.25};
  for (GreekParam p : {GreekParam::X0, GreekParam::Y0}) {
    const GreekRequest req = request(sc, p, 5000);
    const GreekEstimate pw = greek_pathwise(sc.model, sc.option, req);
    const GreekEstimate sk = greek_skorohod(sc.model, sc.option, req, rnd);
    CHECK(zstat(pw, sk) <= 4.0);
    CHECK(std::abs(sk.control_mean) <= 4.0 * sk.control_se);
  }
}

TEST_CASE("skorohod value does not depend on the randomizer eval point") {
  const auto sc = scenario();
  const GreekRequest req = request(sc, GreekParam::X0, 5000);
  const GreekEstimate a = greek_skorohod(sc.model, sc.option, req, {0.1});
  const GreekEstimate b = greek_skorohod(sc.model, sc.option, req, {1.0});
  CHECK(zstat(a, b) <= 4.0);
}

TEST_CASE("zero direction gives an exact zero") {
  const auto sc = scenario();
  GreekRequest req = request(sc, GreekParam::X0, 100);
  req.dir_curve = Curve::constant(sc.space, 0.0);
  const GreekEstimate e = greek_fd(sc.model, sc.option, req);
  CHECK(e.value == 0.0);
  CHECK(e.se == 0.0);
}

TEST_CASE("call payoff is rejected by derivative estimators") {
  const auto sc = scenario("option {\n payoff call atm\n}\n");
  const GreekRequest req = request(sc, GreekParam::X0, 100);
  CHECK_THROWS_AS(greek_pathwise(sc.model, sc.option, req), std::invalid_argument);
}

TEST_CASE("lambda-grid re-simulation cross-checks the skorohod estimator") {
  const auto sc = scenario();
  const RandomizationSpec rnd{0.25};
  const GreekRequest req = request(sc, GreekParam::X0, 3000);
  const auto grid = make_lambda_grid(sc.option.tau, 25);
  const LambdaGridResult lg = skorohod_lambda_grid(sc.model, sc.option, req, rnd, grid);
  const GreekEstimate sk = greek_skorohod(sc.model, sc.option, req, rnd);
  CHECK(zstat(lg.est, sk) <= 4.0);
  CHECK(lg.coverage_miss <= 1e-3);
  CHECK(lg.max_slope < 1e6);
  CHECK(std::isfinite(lg.max_slope));
}

TEST_CASE("estimators are thread-count invariant") {
  const auto sc = scenario();
  GreekRequest a = request(sc, GreekParam::Y0, 1000);
  GreekRequest b = a;
  b.threads = 4;
  const GreekEstimate ea = greek_skorohod(sc.model, sc.option, a, {0.25});
  const GreekEstimate eb = greek_skorohod(sc.model, sc.option, b, {0.25});
  CHECK(ea.value == eb.value);
  CHECK(ea.se == eb.se);
}
