#include "hestonfwd/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hestonfwd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& tok, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw std::invalid_argument("bad number '" + tok + "' for " + what);
  return v;
}

std::uint64_t parse_u64(const std::string& tok, const std::string& what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw std::invalid_argument("bad integer '" + tok + "' for " + what);
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CurveExpr parse_curve_expr(const std::string& text) {
  CurveExpr expr;
  for (const std::string& raw : split(trim(text), '+')) {
    const std::string term = trim(raw);
    if (term.empty()) throw std::invalid_argument("empty term in curve expression");
    CurveTerm t;
    std::string body = term;
    const auto star = split(term, '*');
    if (star.size() == 2) {
      t.coef = parse_double(trim(star[0]), "curve term coefficient");
      body = trim(star[1]);
    } else if (star.size() > 2) {
      throw std::invalid_argument("bad curve term '" + term + "'");
    }
    const auto open = body.find('(');
    if (open == std::string::npos || body.back() != ')')
      throw std::invalid_argument("bad curve term '" + term + "'");
    const std::string name = body.substr(0, open);
    const auto args = split(body.substr(open + 1, body.size() - open - 2), ',');
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        throw std::invalid_argument("curve term '" + name + "' takes " +
                                    std::to_string(n) + " argument(s)");
    };
    if (name == "const") {
      need(1);
      t.kind = CurveTerm::Kind::Const;
      t.p1 = t.coef * parse_double(trim(args[0]), "const");
      t.coef = 1.0;
    } else if (name == "sat") {
      need(2);
      t.kind = CurveTerm::Kind::Sat;
      t.p1 = t.coef * parse_double(trim(args[0]), "sat scale");
      t.p2 = parse_double(trim(args[1]), "sat rate");
      t.coef = 1.0;
      if (t.p2 <= 0) throw std::invalid_argument("sat rate must be positive");
    } else if (name == "kernel") {
      need(1);
      t.kind = CurveTerm::Kind::Kernel;
      t.p1 = parse_double(trim(args[0]), "kernel point");
      if (t.p1 < 0) throw std::invalid_argument("kernel point must be >= 0");
    } else if (name == "onb") {
      need(1);
      t.kind = CurveTerm::Kind::Onb;
      t.p1 = parse_double(trim(args[0]), "onb index");
      if (t.p1 < 1 || t.p1 != std::floor(t.p1))
        throw std::invalid_argument("onb index must be a positive integer");
    } else {
      throw std::invalid_argument("unknown curve generator '" + name + "'");
    }
    expr.push_back(t);
  }
  return expr;
}

std::string format_curve_expr(const CurveExpr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += "+";
    const CurveTerm& t = e[i];
    if (t.coef != 1.0) out += fmt(t.coef) + "*";
    switch (t.kind) {
      case CurveTerm::Kind::Const:
        out += "const(" + fmt(t.p1) + ")";
        break;
      case CurveTerm::Kind::Sat:
        out += "sat(" + fmt(t.p1) + "," + fmt(t.p2) + ")";
        break;
      case CurveTerm::Kind::Kernel:
        out += "kernel(" + fmt(t.p1) + ")";
        break;
      case CurveTerm::Kind::Onb:
        out += "onb(" + fmt(t.p1) + ")";
        break;
    }
  }
  return out;
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.model.x0 = parse_curve_expr("const(20)+sat(5,1)");
  c.model.y0 = parse_curve_expr("const(1)");
  c.model.eta_terms = {{0.2, parse_curve_expr("onb(1)"), parse_curve_expr("onb(1)")},
                       {0.1, parse_curve_expr("onb(2)"), parse_curve_expr("onb(2)")},
                       {0.05, parse_curve_expr("onb(3)"), parse_curve_expr("onb(3)")}};
  c.model.gamma = parse_curve_expr("onb(1)");
  c.option.payoff = Payoff::smoothed_call(std::nullopt, 0.1);
  c.greek.direction = parse_curve_expr("kernel(0.5)");
  return c;
}

namespace {

SemigroupKind parse_sg_kind(const std::string& s) {
  if (s == "left_shift") return SemigroupKind::LeftShift;
  if (s == "damped_left_shift") return SemigroupKind::DampedLeftShift;
  if (s == "scalar_decay") return SemigroupKind::ScalarDecay;
  throw std::invalid_argument("unknown semigroup kind '" + s + "'");
}

std::string sg_name(SemigroupKind k) {
  switch (k) {
    case SemigroupKind::LeftShift:
      return "left_shift";
    case SemigroupKind::DampedLeftShift:
      return "damped_left_shift";
    case SemigroupKind::ScalarDecay:
      return "scalar_decay";
  }
  return "?";
}

GreekEstimator parse_estimator(const std::string& s) {
  if (s == "fd") return GreekEstimator::Fd;
  if (s == "pathwise") return GreekEstimator::Pathwise;
  if (s == "skorohod") return GreekEstimator::Skorohod;
  if (s == "lambda_grid") return GreekEstimator::LambdaGrid;
  throw std::invalid_argument("unknown estimator '" + s + "'");
}

std::string estimator_name(GreekEstimator e) {
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

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

void handle_model(ModelBlock& m, const std::vector<std::string>& tok) {
  const std::string& k = tok[0];
  auto one = [&]() -> const std::string& {
    if (tok.size() != 2)
      throw std::invalid_argument("key '" + k + "' takes one value");
    return tok[1];
  };
  if (k == "alpha") m.alpha = parse_double(one(), k);
  else if (k == "dx") m.dx = parse_double(one(), k);
  else if (k == "n_nodes") m.n_nodes = parse_u64(one(), k);
  else if (k == "extension") m.extension = parse_u64(one(), k);
  else if (k == "x0") m.x0 = parse_curve_expr(one());
  else if (k == "y0") m.y0 = parse_curve_expr(one());
  else if (k == "eta_term") {
    if (tok.size() != 4)
      throw std::invalid_argument("eta_term takes: sigma curve_a curve_b");
    m.eta_terms.push_back({parse_double(tok[1], "eta sigma"),
                           parse_curve_expr(tok[2]), parse_curve_expr(tok[3])});
  } else if (k == "qw_modes") m.qw_modes = parse_u64(one(), k);
  else if (k == "qw_scale") m.qw_scale = parse_double(one(), k);
  else if (k == "qb_modes") m.qb_modes = parse_u64(one(), k);
  else if (k == "qb_scale") m.qb_scale = parse_double(one(), k);
  else if (k == "s_semigroup" || k == "u_semigroup") {
    if (tok.size() < 2 || tok.size() > 3)
      throw std::invalid_argument(k + " takes: kind [kappa]");
    const SemigroupKind kind = parse_sg_kind(tok[1]);
    const double kappa = tok.size() == 3 ? parse_double(tok[2], "kappa") : 0.0;
    if (kind != SemigroupKind::LeftShift && tok.size() != 3)
      throw std::invalid_argument(k + ": this kind needs a kappa value");
    if (k == "s_semigroup") {
      m.s_kind = kind;
      m.s_kappa = kappa;
    } else {
      m.u_kind = kind;
      m.u_kappa = kappa;
    }
  } else if (k == "z_policy") {
    if (tok.size() < 2) throw std::invalid_argument("z_policy takes a kind");
    if (tok[1] == "constant_gamma") {
      if (tok.size() != 3)
        throw std::invalid_argument("z_policy constant_gamma takes a curve");
      m.z_kind = ZPolicyKind::ConstantGamma;
      m.gamma = parse_curve_expr(tok[2]);
    } else if (tok[1] == "normalized_y") {
      if (tok.size() != 2)
        throw std::invalid_argument("z_policy normalized_y takes no arguments");
      m.z_kind = ZPolicyKind::NormalizedY;
      m.gamma.clear();
    } else {
      throw std::invalid_argument("unknown z_policy '" + tok[1] + "'");
    }
  } else if (k == "tau") m.tau = parse_double(one(), k);
  else throw std::invalid_argument("unknown key '" + k + "' in block 'model'");
}

void handle_option(OptionBlock& o, const std::vector<std::string>& tok) {
  const std::string& k = tok[0];
  auto one = [&]() -> const std::string& {
    if (tok.size() != 2)
      throw std::invalid_argument("key '" + k + "' takes one value");
    return tok[1];
  };
  if (k == "payoff") {
    if (tok.size() < 2) throw std::invalid_argument("payoff takes a kind");
    auto strike_of = [&](const std::string& s) -> std::optional<double> {
      if (s == "atm") return std::nullopt;
      return parse_double(s, "strike");
    };
    if (tok[1] == "linear") {
      if (tok.size() != 2) throw std::invalid_argument("payoff linear takes no args");
      o.payoff = Payoff::linear();
    } else if (tok[1] == "call") {
      if (tok.size() != 3) throw std::invalid_argument("payoff call takes: K|atm");
      o.payoff = Payoff::call(strike_of(tok[2]));
    } else if (tok[1] == "smoothed_call") {
      if (tok.size() != 4)
        throw std::invalid_argument("payoff smoothed_call takes: K|atm kappa");
      o.payoff = Payoff::smoothed_call(strike_of(tok[2]),
                                       parse_double(tok[3], "smoothing kappa"));
      if (o.payoff.kappa <= 0)
        throw std::invalid_argument("smoothing kappa must be positive");
    } else {
      throw std::invalid_argument("unknown payoff '" + tok[1] + "'");
    }
  } else if (k == "tau") o.tau = parse_double(one(), k);
  else if (k == "x") o.x = parse_double(one(), k);
  else if (k == "d") o.d = parse_double(one(), k);
  else if (k == "r") o.r = parse_double(one(), k);
  else throw std::invalid_argument("unknown key '" + k + "' in block 'option'");
}

void handle_run(RunBlock& r, const std::vector<std::string>& tok) {
  const std::string& k = tok[0];
  auto one = [&]() -> const std::string& {
    if (tok.size() != 2)
      throw std::invalid_argument("key '" + k + "' takes one value");
    return tok[1];
  };
  if (k == "n_paths") r.n_paths = parse_u64(one(), k);
  else if (k == "seed") r.seed = parse_u64(one(), k);
  else if (k == "threads") r.threads = int(parse_u64(one(), k));
  else if (k == "dump_paths") r.dump_paths = parse_u64(one(), k);
  else if (k == "fault_inject_kernel") r.fault_inject_kernel = parse_u64(one(), k) != 0;
  else throw std::invalid_argument("unknown key '" + k + "' in block 'run'");
}

void handle_greek(GreekBlock& g, const std::vector<std::string>& tok) {
  const std::string& k = tok[0];
  auto one = [&]() -> const std::string& {
    if (tok.size() != 2)
      throw std::invalid_argument("key '" + k + "' takes one value");
    return tok[1];
  };
  if (k == "parameter") {
    const std::string& v = one();
    if (v == "x0") g.parameter = GreekParam::X0;
    else if (v == "y0") g.parameter = GreekParam::Y0;
    else if (v == "eta") g.parameter = GreekParam::Eta;
    else throw std::invalid_argument("unknown Greek parameter '" + v + "'");
  } else if (k == "direction") {
    g.direction = parse_curve_expr(one());
  } else if (k == "direction_term") {
    if (tok.size() != 4)
      throw std::invalid_argument("direction_term takes: sigma curve_a curve_b");
    g.direction_terms.push_back({parse_double(tok[1], "direction sigma"),
                                 parse_curve_expr(tok[2]), parse_curve_expr(tok[3])});
  } else if (k == "estimators") {
    g.estimators.clear();
    for (const std::string& e : split(one(), ','))
      g.estimators.push_back(parse_estimator(trim(e)));
    if (g.estimators.empty())
      throw std::invalid_argument("estimators list must not be empty");
  } else if (k == "fd_epsilon") {
    g.fd_epsilon = parse_double(one(), k);
  } else if (k == "eval_point") {
    g.eval_point = parse_double(one(), k);
  } else {
    throw std::invalid_argument("unknown key '" + k + "' in block 'greek'");
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c = default_config();
  // blocks replace list-valued defaults wholesale on first mention
  bool eta_reset = false, dirterm_reset = false;
  std::string block;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.back() == '{') {
        if (!block.empty()) throw std::invalid_argument("blocks do not nest");
        block = trim(line.substr(0, line.size() - 1));
        if (block != "model" && block != "option" && block != "run" &&
            block != "greek")
          throw std::invalid_argument("unknown block '" + block + "'");
        continue;
      }
      if (line == "}") {
        if (block.empty()) throw std::invalid_argument("stray '}'");
        block.clear();
        continue;
      }
      if (block.empty())
        throw std::invalid_argument("key outside of any block");
      const auto tok = tokens_of(line);
      if (block == "model") {
        if (tok[0] == "eta_term" && !eta_reset) {
          c.model.eta_terms.clear();
          eta_reset = true;
        }
        handle_model(c.model, tok);
      } else if (block == "option") {
        handle_option(c.option, tok);
      } else if (block == "run") {
        handle_run(c.run, tok);
      } else {
        if (tok[0] == "direction_term" && !dirterm_reset) {
          c.greek.direction_terms.clear();
          dirterm_reset = true;
        }
        handle_greek(c.greek, tok);
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  if (!block.empty()) throw std::invalid_argument("unterminated block '" + block + "'");
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "model {\n";
  os << "  alpha " << fmt(c.model.alpha) << "\n";
  os << "  dx " << fmt(c.model.dx) << "\n";
  os << "  n_nodes " << c.model.n_nodes << "\n";
  os << "  extension " << c.model.extension << "\n";
  os << "  x0 " << format_curve_expr(c.model.x0) << "\n";
  os << "  y0 " << format_curve_expr(c.model.y0) << "\n";
  for (const auto& t : c.model.eta_terms)
    os << "  eta_term " << fmt(t.sigma) << " " << format_curve_expr(t.a) << " "
       << format_curve_expr(t.b) << "\n";
  os << "  qw_modes " << c.model.qw_modes << "\n";
  os << "  qw_scale " << fmt(c.model.qw_scale) << "\n";
  os << "  qb_modes " << c.model.qb_modes << "\n";
  os << "  qb_scale " << fmt(c.model.qb_scale) << "\n";
  os << "  s_semigroup " << sg_name(c.model.s_kind);
  if (c.model.s_kind != SemigroupKind::LeftShift) os << " " << fmt(c.model.s_kappa);
  os << "\n";
  os << "  u_semigroup " << sg_name(c.model.u_kind);
  if (c.model.u_kind != SemigroupKind::LeftShift) os << " " << fmt(c.model.u_kappa);
  os << "\n";
  if (c.model.z_kind == ZPolicyKind::ConstantGamma)
    os << "  z_policy constant_gamma " << format_curve_expr(c.model.gamma) << "\n";
  else
    os << "  z_policy normalized_y\n";
  os << "  tau " << fmt(c.model.tau) << "\n";
  os << "}\n";

  os << "option {\n  payoff ";
  const Payoff& p = c.option.payoff;
  const std::string ks = p.strike ? fmt(*p.strike) : std::string("atm");
  switch (p.kind) {
    case Payoff::Kind::Linear:
      os << "linear";
      break;
    case Payoff::Kind::Call:
      os << "call " << ks;
      break;
    case Payoff::Kind::SmoothedCall:
      os << "smoothed_call " << ks << " " << fmt(p.kappa);
      break;
  }
  os << "\n";
  os << "  tau " << fmt(c.option.tau) << "\n";
  os << "  x " << fmt(c.option.x) << "\n";
  os << "  d " << fmt(c.option.d) << "\n";
  os << "  r " << fmt(c.option.r) << "\n";
  os << "}\n";

  os << "run {\n";
  os << "  n_paths " << c.run.n_paths << "\n";
  os << "  seed " << c.run.seed << "\n";
  os << "  threads " << c.run.threads << "\n";
  os << "  dump_paths " << c.run.dump_paths << "\n";
  os << "  fault_inject_kernel " << (c.run.fault_inject_kernel ? 1 : 0) << "\n";
  os << "}\n";

  os << "greek {\n";
  os << "  parameter "
     << (c.greek.parameter == GreekParam::X0
             ? "x0"
             : c.greek.parameter == GreekParam::Y0 ? "y0" : "eta")
     << "\n";
  if (!c.greek.direction.empty())
    os << "  direction " << format_curve_expr(c.greek.direction) << "\n";
  for (const auto& t : c.greek.direction_terms)
    os << "  direction_term " << fmt(t.sigma) << " " << format_curve_expr(t.a) << " "
       << format_curve_expr(t.b) << "\n";
  os << "  estimators ";
  for (std::size_t i = 0; i < c.greek.estimators.size(); ++i)
    os << (i ? "," : "") << estimator_name(c.greek.estimators[i]);
  os << "\n";
  os << "  fd_epsilon " << fmt(c.greek.fd_epsilon) << "\n";
  os << "  eval_point " << fmt(c.greek.eval_point) << "\n";
  os << "}\n";
  return os.str();
}

Curve build_curve(const CurveExpr& e, const SpacePtr& space,
                  const std::vector<Curve>& onb) {
  Curve out = Curve::constant(space, 0.0);
  for (const CurveTerm& t : e) {
    switch (t.kind) {
      case CurveTerm::Kind::Const:
        out.add_scaled(Curve::constant(space, 1.0), t.coef * t.p1);
        break;
      case CurveTerm::Kind::Sat: {
        const double a = t.p1, k = t.p2;
        out.add_scaled(
            Curve::from_function(
                space, [a, k](double x) { return a * (1.0 - std::exp(-k * x)); },
                [a, k](double x) { return a * k * std::exp(-k * x); }),
            t.coef);
        break;
      }
      case CurveTerm::Kind::Kernel:
        out.add_scaled(kernel_hx(space, t.p1), t.coef);
        break;
      case CurveTerm::Kind::Onb: {
        const std::size_t i = std::size_t(t.p1);
        if (i > onb.size())
          throw std::invalid_argument("onb index exceeds the basis size");
        out.add_scaled(onb[i - 1], t.coef);
        break;
      }
    }
  }
  return out;
}

FiniteRankOp build_finite_rank(const std::vector<EtaTermSpec>& terms,
                               const SpacePtr& space, const std::vector<Curve>& onb) {
  FiniteRankOp op;
  for (const auto& t : terms)
    op.terms.push_back(
        {t.sigma, build_curve(t.a, space, onb), build_curve(t.b, space, onb)});
  return op;
}

namespace {

std::size_t max_onb_index(const CurveExpr& e) {
  std::size_t m = 0;
  for (const CurveTerm& t : e)
    if (t.kind == CurveTerm::Kind::Onb) m = std::max(m, std::size_t(t.p1));
  return m;
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& c) {
  const SpacePtr space =
      make_space(Weight::exponential(c.model.alpha),
                 Grid(c.model.dx, c.model.n_nodes, c.model.extension));

  std::size_t n_basis = std::max(c.model.qw_modes, c.model.qb_modes);
  n_basis = std::max(n_basis, max_onb_index(c.model.x0));
  n_basis = std::max(n_basis, max_onb_index(c.model.y0));
  n_basis = std::max(n_basis, max_onb_index(c.model.gamma));
  n_basis = std::max(n_basis, max_onb_index(c.greek.direction));
  for (const auto& t : c.model.eta_terms) {
    n_basis = std::max({n_basis, max_onb_index(t.a), max_onb_index(t.b)});
  }
  for (const auto& t : c.greek.direction_terms) {
    n_basis = std::max({n_basis, max_onb_index(t.a), max_onb_index(t.b)});
  }
  std::vector<Curve> seeds;
  seeds.push_back(Curve::constant(space, 1.0));
  for (std::size_t i = 2; i <= n_basis; ++i) {
    const double k = double(i - 1);
    seeds.push_back(Curve::from_function(
        space, [k](double x) { return 1.0 - std::exp(-k * x); },
        [k](double x) { return k * std::exp(-k * x); }));
  }
  std::vector<Curve> onb = build_onb(seeds);

  auto spectrum = [&](std::size_t modes, double scale) {
    CovOp q;
    if (modes > onb.size())
      throw std::invalid_argument("covariance mode count exceeds the basis size");
    for (std::size_t n = 1; n <= modes; ++n) {
      q.eigvals.push_back(scale / (double(n) * double(n) * double(n)));
      q.eigvecs.push_back(onb[n - 1]);
    }
    return q;
  };
  ZPolicy zp;
  zp.kind = c.model.z_kind;
  if (c.model.z_kind == ZPolicyKind::ConstantGamma)
    zp.gamma = build_curve(c.model.gamma, space, onb);

  ModelSpec m{space,
              build_curve(c.model.x0, space, onb),
              build_curve(c.model.y0, space, onb),
              build_finite_rank(c.model.eta_terms, space, onb),
              spectrum(c.model.qw_modes, c.model.qw_scale),
              spectrum(c.model.qb_modes, c.model.qb_scale),
              {c.model.s_kind, c.model.s_kappa},
              {c.model.u_kind, c.model.u_kappa},
              std::move(zp),
              c.model.tau};

  OptionSpec opt{c.option.tau, c.option.x, c.option.d, c.option.r, c.option.payoff};
  m.validate(opt.x + opt.d);
  return {space, std::move(onb), std::move(m), opt};
}

}  // namespace hestonfwd
