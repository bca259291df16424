#include "hestonfwd/engine.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hestonfwd/analytics.hpp"
#include "hestonfwd/greeks.hpp"

namespace hestonfwd {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Small row-oriented table that renders deterministically as CSV and JSON.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void row(std::vector<std::string> r) {
    if (r.size() != columns.size())
      throw std::logic_error("table row width mismatch in " + name);
    rows.push_back(std::move(r));
  }

  std::string csv() const {
    std::ostringstream os;
    os << "# hestonfwd " << name << " schema v1\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
    return os.str();
  }

  std::string json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = r[i];
      arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
  }
};

std::string greek_param_name(GreekParam p) {
  switch (p) {
    case GreekParam::X0:
      return "x0";
    case GreekParam::Y0:
      return "y0";
    case GreekParam::Eta:
      return "eta";
  }
  return "?";
}

std::string greek_estimator_name(GreekEstimator e) {
  switch (e) {
    case GreekEstimator::Fd:
      return "fd";
    case GreekEstimator::Pathwise:
      return "pathwise";
    case GreekEstimator::Skorohod:
      return "skorohod";
    case GreekEstimator::LambdaGrid:
      return "lambda_grid";
  }
  return "?";
}

std::string payoff_name(const Payoff& p) {
  switch (p.kind) {
    case Payoff::Kind::Linear:
      return "linear";
    case Payoff::Kind::Call:
      return "call";
    case Payoff::Kind::SmoothedCall:
      return "smoothed_call";
  }
  return "?";
}

}  // namespace

Engine::Engine(const std::string& config_text) : cfg_(parse_config(config_text)) {}

void Engine::set_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  cfg_.run.threads = threads;
}

bool Engine::run(const std::string& command) {
  artifacts_.clear();
  if (command == "simulate") {
    cmd_simulate();
  } else if (command == "price") {
    cmd_price();
  } else if (command == "greeks") {
    cmd_greeks();
  } else if (command == "verify") {
    return cmd_verify();
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  return true;
}

void Engine::cmd_simulate() {
  const BuiltScenario sc = build_scenario(cfg_);
  const ModelSpec& m = sc.model;
  const RunBlock& r = cfg_.run;
  const OptionSpec& opt = sc.option;

  Table sum{"summary", {"quantity", "point", "mean", "stderr", "reference", "z"}, {}};
  const Curve sx0 = semigroup_apply(m.s_semigroup, m.tau, m.x0);
  auto zrow = [&](const std::string& q, const std::string& pt, const MeanSe& e,
                  double ref) {
    const double z = e.se > 0 ? (e.mean - ref) / e.se : 0.0;
    sum.row({q, pt, fmt(e.mean), fmt(e.se), fmt(ref), fmt(z)});
  };
  for (double x : {0.1, opt.x, 1.0}) {
    const MeanSe e = mc_forward_mean(m, m.tau, x, r.n_paths, r.seed, r.threads);
    zrow("forward_mean", fmt(x), e, sx0.eval(x));
  }
  {
    const std::vector<double> g =
        terminal_g_samples(m, opt, r.n_paths, r.seed, r.threads);
    zrow("delivery_mean", fmt(opt.x) + ";" + fmt(opt.d), mean_se(g),
         deterministic_forward(m, opt));
  }
  {
    const MeanSe e =
        mc_forward_cov(m, m.tau, opt.x, opt.x, r.n_paths, r.seed, r.threads);
    double ref;
    double se_ref = 0.0;
    if (m.z_policy.kind == ZPolicyKind::ConstantGamma) {
      ref = cov_forward_const_gamma(m, m.tau, opt.x, opt.x);
    } else {
      const MeanSe cf = cov_forward(m, m.tau, opt.x, opt.x, r.n_paths, r.seed, r.threads);
      ref = cf.mean;
      se_ref = cf.se;
    }
    const double se = std::sqrt(e.se * e.se + se_ref * se_ref);
    const double z = se > 0 ? (e.mean - ref) / se : 0.0;
    sum.row({"forward_var", fmt(opt.x), fmt(e.mean), fmt(e.se), fmt(ref), fmt(z)});
  }
  artifacts_.emplace_back("summary.csv", sum.csv());
  if (json_) artifacts_.emplace_back("summary.json", sum.json());

  Table paths{"paths", {"path", "step", "t", "y_value", "x_value"}, {}};
  const double probe = opt.x;
  for (std::uint64_t p = 0; p < r.dump_paths; ++p) {
    const PathBundle pb = simulate_path(m, r.seed, p);
    for (std::size_t k = 0; k < pb.y.size(); ++k) {
      paths.row({std::to_string(p), std::to_string(k), fmt(double(k) * m.dt()),
                 fmt(pb.y[k].eval(probe)), fmt(pb.x[k].eval(probe))});
    }
  }
  artifacts_.emplace_back("paths.csv", paths.csv());
  if (json_) artifacts_.emplace_back("paths.json", paths.json());
}

void Engine::cmd_price() {
  const BuiltScenario sc = build_scenario(cfg_);
  const RunBlock& r = cfg_.run;
  const OptionSpec& opt = sc.option;
  const PriceEstimate pe = price_option(sc.model, opt, r.n_paths, r.seed, r.threads);

  // Linear payoff has a closed form: the discounted deterministic forward.
  double ref = std::nan("");
  double z = std::nan("");
  if (opt.payoff.kind == Payoff::Kind::Linear) {
    ref = std::exp(-opt.r * opt.tau) * deterministic_forward(sc.model, opt);
    if (pe.se > 0) z = (pe.value - ref) / pe.se;
  }
  Table t{"price",
          {"payoff", "strike", "kappa", "tau", "x", "d", "r", "n_paths", "seed",
           "value", "stderr", "reference", "z"},
          {}};
  t.row({payoff_name(opt.payoff), fmt(pe.strike), fmt(opt.payoff.kappa), fmt(opt.tau),
         fmt(opt.x), fmt(opt.d), fmt(opt.r), std::to_string(pe.n_paths),
         std::to_string(r.seed), fmt(pe.value), fmt(pe.se), fmt(ref), fmt(z)});
  artifacts_.emplace_back("price.csv", t.csv());
  if (json_) artifacts_.emplace_back("price.json", t.json());
}

void Engine::cmd_greeks() {
  const BuiltScenario sc = build_scenario(cfg_);
  const RunBlock& r = cfg_.run;
  const GreekBlock& g = cfg_.greek;

  GreekRequest req;
  req.parameter = g.parameter;
  req.fd_epsilon = g.fd_epsilon;
  req.n_paths = r.n_paths;
  req.seed = r.seed;
  req.threads = r.threads;
  if (g.parameter == GreekParam::Eta) {
    if (g.direction_terms.empty())
      throw std::invalid_argument("eta Greeks need at least one direction_term");
    req.dir_op = build_finite_rank(g.direction_terms, sc.space, sc.onb);
  } else {
    if (g.direction.empty())
      throw std::invalid_argument("x0/y0 Greeks need a direction curve");
    req.dir_curve = build_curve(g.direction, sc.space, sc.onb);
  }
  const RandomizationSpec rnd{g.eval_point};

  Table t{"greeks",
          {"parameter", "estimator", "value", "stderr", "n_paths", "epsilon",
           "eval_point", "control_mean", "control_stderr", "max_slope",
           "coverage_miss"},
          {}};
  const std::string pname = greek_param_name(g.parameter);
  for (GreekEstimator est : g.estimators) {
    GreekEstimate e;
    double max_slope = std::nan("");
    double coverage = std::nan("");
    double eps = std::nan("");
    double evp = std::nan("");
    switch (est) {
      case GreekEstimator::Fd:
        e = greek_fd(sc.model, sc.option, req);
        eps = g.fd_epsilon;
        break;
      case GreekEstimator::Pathwise:
        e = greek_pathwise(sc.model, sc.option, req);
        break;
      case GreekEstimator::Skorohod:
        e = greek_skorohod(sc.model, sc.option, req, rnd);
        evp = g.eval_point;
        break;
      case GreekEstimator::LambdaGrid: {
        const auto grid = make_lambda_grid(sc.option.tau, 33);
        const LambdaGridResult lr =
            skorohod_lambda_grid(sc.model, sc.option, req, rnd, grid);
        e = lr.est;
        max_slope = lr.max_slope;
        coverage = lr.coverage_miss;
        evp = g.eval_point;
        break;
      }
    }
    t.row({pname, greek_estimator_name(est), fmt(e.value), fmt(e.se),
           std::to_string(e.n_paths), fmt(eps), fmt(evp), fmt(e.control_mean),
           fmt(e.control_se), fmt(max_slope), fmt(coverage)});
  }
  artifacts_.emplace_back("greeks.csv", t.csv());
  if (json_) artifacts_.emplace_back("greeks.json", t.json());
}

bool Engine::cmd_verify() {
  const BuiltScenario sc = build_scenario(cfg_);
  const ModelSpec& m = sc.model;
  const SpacePtr& sp = sc.space;
  const RunBlock& r = cfg_.run;
  const OptionSpec& opt = sc.option;
  const std::size_t nv = std::min<std::size_t>(r.n_paths, 5000);

  Table t{"verify", {"check", "measured", "bound", "pass"}, {}};
  bool all_ok = true;
  auto check = [&](const std::string& name, double measured, double bound) {
    const bool ok = measured <= bound;
    all_ok = all_ok && ok;
    t.row({name, fmt(measured), fmt(bound), ok ? "1" : "0"});
  };

  const std::vector<double> pts = {0.1, 0.25, 1.0, 2.0};
  std::vector<Curve> fs;
  fs.push_back(m.x0);
  fs.push_back(Curve::from_function(
      sp, [](double x) { return 3.0 * (1.0 - std::exp(-2.0 * x)); },
      [](double x) { return 6.0 * std::exp(-2.0 * x); }));
  fs.push_back(kernel_hx(sp, 0.7));

  {
    double worst = 0.0;
    for (const Curve& f : fs)
      for (double x : pts) {
        const Curve hx = kernel_hx(sp, x);
        worst = std::max(worst, std::abs(inner_product(f, hx) - f.eval(x)));
      }
    if (r.fault_inject_kernel) worst += 1e-6;
    check("reproducing_kernel", worst, 1e-8);
  }
  {
    // exact at grid points only
    double worst = 0.0;
    for (double x : {0.125, 0.25, 1.0, 2.0}) {
      const Curve hx = kernel_hx(sp, x);
      worst = std::max(worst, std::abs(hx.norm_sq() - eval_norm_sq(sp, x)));
    }
    check("norm_identity", worst, 1e-8);
  }
  {
    double worst = 0.0;
    const double s = 0.25;
    for (const Curve& f : fs)
      for (const Curve& g : fs)
        worst = std::max(worst, std::abs(inner_product(shift(f, s), g) -
                                         inner_product(f, shift_adjoint(g, s))));
    check("shift_adjoint", worst, 1e-8);
  }
  {
    Curve a = kernel_hxd(sp, opt.x, opt.d);
    const Curve b = shift_adjoint(kernel_hdI(sp, opt.d), opt.x);
    a.add_scaled(b, -1.0);
    check("delivery_kernel_shift", a.norm(), 1e-12);
  }
  {
    // operator norm bound for the left shift on the weighted space
    const double bound = std::sqrt(2.0 * std::max(1.0, sp->winv_total())) + 1e-9;
    double worst = 0.0;
    RngStream rs(cfg_.run.seed, 0, StreamTag::Randomizer);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> deriv(sp->n_cells());
      for (double& v : deriv) v = rs.normal();
      const Curve f(sp, rs.normal(), deriv);
      const double n = f.norm();
      if (n > 0) worst = std::max(worst, shift(f, 0.5).norm() / n);
    }
    check("shift_norm_bound", worst, bound);
  }
  {
    Curve a = semigroup_apply(m.u_semigroup, 0.375, fs[1]);
    Curve b = semigroup_apply(m.u_semigroup, 0.25,
                              semigroup_apply(m.u_semigroup, 0.125, fs[1]));
    a.add_scaled(b, -1.0);
    check("semigroup_law", a.norm(), 1e-12);
  }
  {
    const Curve sx0 = semigroup_apply(m.s_semigroup, m.tau, m.x0);
    const MeanSe e = mc_forward_mean(m, m.tau, opt.x, nv, r.seed, r.threads);
    const double z = e.se > 0 ? std::abs(e.mean - sx0.eval(opt.x)) / e.se : 0.0;
    check("forward_mean_z", z, 4.0);
  }
  {
    const Curve probe = kernel_hx(sp, opt.x);
    const CharFuncEstimate cf = char_functional(m, probe, m.tau, nv, r.seed, r.threads);
    const CharFuncEstimate em =
        char_functional_empirical(m, {&probe, 1}, m.tau, nv, r.seed + 1, r.threads)[0];
    const double zr = std::abs(cf.value.real() - em.value.real()) /
                      std::sqrt(cf.re_se * cf.re_se + em.re_se * em.re_se);
    const double zi = std::abs(cf.value.imag() - em.value.imag()) /
                      std::sqrt(cf.im_se * cf.im_se + em.im_se * em.im_se);
    check("char_functional_z", std::max(zr, zi), 4.0);
  }
  {
    const MeanSe e = mc_forward_cov(m, m.tau, opt.x, opt.x, nv, r.seed, r.threads);
    double ref, se_ref = 0.0;
    if (m.z_policy.kind == ZPolicyKind::ConstantGamma) {
      ref = cov_forward_const_gamma(m, m.tau, opt.x, opt.x);
    } else {
      const MeanSe cf = cov_forward(m, m.tau, opt.x, opt.x, nv, r.seed + 1, r.threads);
      ref = cf.mean;
      se_ref = cf.se;
    }
    const double se = std::sqrt(e.se * e.se + se_ref * se_ref);
    check("forward_var_z", se > 0 ? std::abs(e.mean - ref) / se : 0.0, 4.0);
  }
  if (opt.payoff.differentiable()) {
    GreekRequest req;
    req.parameter = GreekParam::X0;
    req.dir_curve = kernel_hx(sp, 0.5);
    req.n_paths = nv;
    req.seed = r.seed;
    req.threads = r.threads;
    const GreekEstimate e = greek_skorohod(m, opt, req, RandomizationSpec{opt.x});
    const double z = e.control_se > 0 ? std::abs(e.control_mean) / e.control_se : 0.0;
    check("skorohod_control_z", z, 4.0);
  }

  artifacts_.emplace_back("verify.csv", t.csv());
  if (json_) artifacts_.emplace_back("verify.json", t.json());
  return all_ok;
}

}  // namespace hestonfwd
