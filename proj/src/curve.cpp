#include "hestonfwd/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hestonfwd {

namespace {

void check_finite(double f0, const std::vector<double>& deriv) {
  if (!std::isfinite(f0)) throw std::runtime_error("curve data error: non-finite value at 0");
  for (double v : deriv)
    if (!std::isfinite(v)) throw std::runtime_error("curve data error: non-finite derivative sample");
}

void check_same_space(const Curve& f, const Curve& g) {
  if (f.space() != g.space())
    throw std::invalid_argument("curve grid mismatch: operands live on different spaces");
}

}  // namespace

Curve::Curve(SpacePtr space, double f0, std::vector<double> deriv)
    : Curve(std::move(space), f0, std::move(deriv), SIZE_MAX) {}

Curve::Curve(SpacePtr space, double f0, std::vector<double> deriv, std::size_t valid_len)
    : space_(std::move(space)), f0_(f0), deriv_(std::move(deriv)) {
  if (!space_) throw std::invalid_argument("curve needs a space");
  if (deriv_.size() > space_->n_cells())
    throw std::invalid_argument("derivative sample count exceeds grid");
  valid_len_ = std::min(valid_len, deriv_.size());
  check_finite(f0_, deriv_);
}

Curve Curve::constant(SpacePtr space, double c) {
  const std::size_t n = space->n_cells();
  return Curve(std::move(space), c, std::vector<double>(n, 0.0));
}

Curve Curve::from_function(SpacePtr space, const std::function<double(double)>& f,
                           const std::function<double(double)>& fprime) {
  const std::size_t n = space->n_cells();
  const double dx = space->dx();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = fprime((double(i) + 0.5) * dx);
  return Curve(std::move(space), f(0.0), std::move(d));
}

double Curve::eval(double x) const {
  const double dx = space_->dx();
  const double upper = double(valid_len_) * dx;
  if (x < -1e-12 || x > upper * (1.0 + 1e-12) + 1e-12)
    throw std::domain_error("curve evaluation outside valid domain");
  x = std::clamp(x, 0.0, upper);
  std::size_t m = std::min(std::size_t(x / dx), valid_len_);
  double v = f0_;
  for (std::size_t i = 0; i < m; ++i) v += dx * deriv_[i];
  const double rem = x - double(m) * dx;
  if (rem > 0.0 && m < valid_len_) v += rem * deriv_[m];
  return v;
}

double Curve::integrate(double a, double b) const {
  const double dx = space_->dx();
  const double upper = double(valid_len_) * dx;
  if (a < -1e-12 || b < a || b > upper * (1.0 + 1e-12) + 1e-12)
    throw std::domain_error("integration range outside valid domain");
  a = std::clamp(a, 0.0, upper);
  b = std::clamp(b, a, upper);
  std::size_t i = std::min(std::size_t(a / dx), valid_len_ ? valid_len_ - 1 : 0);
  // curve value at the left node of cell i
  double v_node = f0_;
  for (std::size_t j = 0; j < i; ++j) v_node += dx * deriv_[j];
  double acc = 0.0;
  double y = a;
  while (y < b && i < valid_len_) {
    const double cell_lo = double(i) * dx;
    const double cell_hi = cell_lo + dx;
    const double y1 = std::min(b, cell_hi);
    const double fy0 = v_node + (y - cell_lo) * deriv_[i];
    const double fy1 = v_node + (y1 - cell_lo) * deriv_[i];
    acc += (y1 - y) * 0.5 * (fy0 + fy1);
    y = y1;
    v_node += dx * deriv_[i];
    ++i;
  }
  return acc;
}

double Curve::norm_sq() const { return inner_product(*this, *this); }
double Curve::norm() const { return std::sqrt(norm_sq()); }

void Curve::add_scaled(const Curve& other, double c) {
  check_same_space(*this, other);
  valid_len_ = std::min(valid_len_, other.valid_len_);
  f0_ += c * other.f0_;
  const double* o = other.deriv_.data();
  double* d = deriv_.data();
  for (std::size_t i = 0; i < valid_len_; ++i) d[i] += c * o[i];
}

void Curve::scale(double c) {
  f0_ *= c;
  for (double& v : deriv_) v *= c;
}

void Curve::shift_decay_in_place(double decay) {
  if (valid_len_ == 0) throw std::domain_error("shift exhausts curve headroom");
  const double dx = space_->dx();
  f0_ = decay * (f0_ + dx * deriv_[0]);
  double* d = deriv_.data();
  for (std::size_t i = 0; i + 1 < valid_len_; ++i) d[i] = decay * d[i + 1];
  --valid_len_;
}

Curve Curve::operator+(const Curve& o) const {
  Curve r = *this;
  r.add_scaled(o, 1.0);
  return r;
}

Curve Curve::operator-(const Curve& o) const {
  Curve r = *this;
  r.add_scaled(o, -1.0);
  return r;
}

Curve Curve::operator*(double c) const {
  Curve r = *this;
  r.scale(c);
  return r;
}

double inner_product(const Curve& f, const Curve& g) {
  check_same_space(f, g);
  const std::size_t n = std::min(f.valid_len(), g.valid_len());
  const auto w = f.space()->w_cells();
  const double dx = f.space()->dx();
  const double* a = f.deriv().data();
  const double* b = g.deriv().data();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * b[i];
  return f.f0() * g.f0() + dx * acc;
}

namespace {

// Kernels are built from exact cell integrals of the defining functional
// density phi, scaled by the discrete weight. This keeps the duality
// <f, kernel> = functional(f) exact for every grid-representable curve.
Curve kernel_from_density(const SpacePtr& space,
                          const std::function<double(double)>& phi_integral) {
  const std::size_t n = space->n_cells();
  const double dx = space->dx();
  std::vector<double> d(n);
  double lo_int = phi_integral(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi_int = phi_integral(double(i + 1) * dx);
    d[i] = space->winv_cell(i) * (hi_int - lo_int) / dx;
    lo_int = hi_int;
  }
  return Curve(space, 1.0, std::move(d));
}

}  // namespace

Curve kernel_hx(const SpacePtr& space, double x) {
  if (x < 0.0) throw std::domain_error("kernel point must be nonnegative");
  return kernel_from_density(space, [x](double y) { return std::min(y, x); });
}

double eval_norm_sq(const SpacePtr& space, double x) {
  if (x < 0.0) throw std::domain_error("evaluation point must be nonnegative");
  return 1.0 + space->winv_integral(x);
}

Curve shift(const Curve& f, double s) {
  const std::size_t k = f.space()->cells_for(s);
  if (s < 0.0) throw std::domain_error("left shift needs s >= 0");
  if (k > f.valid_len()) throw std::domain_error("shift exhausts curve headroom");
  const double f0 = f.eval(double(k) * f.space()->dx());
  std::vector<double> d(f.deriv().begin() + std::ptrdiff_t(k), f.deriv().end());
  return Curve(f.space(), f0, std::move(d), f.valid_len() - k);
}

Curve shift_adjoint(const Curve& g, double s) {
  const SpacePtr& sp = g.space();
  const std::size_t k = sp->cells_for(s);
  const std::size_t n = sp->n_cells();
  const std::size_t out_len = std::min(n, k + g.valid_len());
  std::vector<double> d(out_len, 0.0);
  for (std::size_t i = 0; i < std::min(k, out_len); ++i) d[i] = g.f0() * sp->winv_cell(i);
  for (std::size_t i = k; i < out_len; ++i)
    d[i] = (sp->winv_cell(i) / sp->winv_cell(i - k)) * g.deriv()[i - k];
  return Curve(sp, g.f0(), std::move(d), out_len);
}

double integ_Id(const Curve& f, double d) {
  if (d <= 0.0) throw std::invalid_argument("delivery length must be positive");
  return f.integrate(0.0, d) / d;
}

double integ_Jxd(const Curve& f, double x, double d) {
  if (x < 0.0) throw std::domain_error("delivery start must be nonnegative");
  if (d <= 0.0) throw std::invalid_argument("delivery length must be positive");
  return f.integrate(x, x + d) / d;
}

Curve kernel_hdI(const SpacePtr& space, double d) {
  if (d <= 0.0) throw std::invalid_argument("delivery length must be positive");
  // phi(y) = (d - y^d)/d, integral (d*y - y^2/2)/d capped at d/2
  return kernel_from_density(space, [d](double y) {
    const double yc = std::min(y, d);
    return (d * yc - 0.5 * yc * yc) / d;
  });
}

Curve kernel_hxd(const SpacePtr& space, double x, double d) {
  if (x < 0.0) throw std::domain_error("delivery start must be nonnegative");
  if (d <= 0.0) throw std::invalid_argument("delivery length must be positive");
  // phi(y) = 1 on [0,x], (d-(y-x))/d on (x, x+d], 0 beyond
  return kernel_from_density(space, [x, d](double y) {
    if (y <= x) return y;
    const double u = std::min(y - x, d);
    return x + (d * u - 0.5 * u * u) / d;
  });
}

std::string Curve::to_csv() const {
  std::ostringstream os;
  char buf[160];
  const auto& w = space_->weight();
  std::snprintf(buf, sizeof buf, "f0=%.17g,dx=%.17g,alpha=%.17g\n", f0_, space_->dx(),
                w.kind == Weight::Kind::Exponential ? w.alpha : 0.0);
  os << buf;
  os << "node_index,deriv_value\n";
  for (std::size_t i = 0; i < valid_len_; ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, deriv_[i]);
    os << buf;
  }
  return os.str();
}

Curve Curve::from_csv(SpacePtr space, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty curve csv");
  double f0 = 0.0, dx = 0.0, alpha = 0.0;
  if (std::sscanf(line.c_str(), "f0=%lf,dx=%lf,alpha=%lf", &f0, &dx, &alpha) != 3)
    throw std::runtime_error("bad curve csv header");
  if (std::abs(dx - space->dx()) > 1e-12)
    throw std::invalid_argument("curve csv grid spacing mismatch");
  std::getline(is, line);  // column header
  std::vector<double> d;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t idx = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf", &idx, &v) != 2)
      throw std::runtime_error("bad curve csv row");
    if (idx != d.size()) throw std::runtime_error("curve csv rows out of order");
    d.push_back(v);
  }
  d.resize(space->n_cells(), 0.0);
  return Curve(std::move(space), f0, std::move(d));
}

}  // namespace hestonfwd
