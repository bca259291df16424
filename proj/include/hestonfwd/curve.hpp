#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hestonfwd/space.hpp"

namespace hestonfwd {

// Element of the weighted curve space: value at 0 plus one weak-derivative
// value per grid cell (constant on the cell, so the curve itself is
// continuous piecewise-linear). valid_len tracks how many leading cells
// still carry trustworthy data after shifts; reads past it fail loudly.
class Curve {
 public:
  Curve(SpacePtr space, double f0, std::vector<double> deriv);
  Curve(SpacePtr space, double f0, std::vector<double> deriv, std::size_t valid_len);

  static Curve constant(SpacePtr space, double c);
  // Samples f' at cell midpoints; f0 = f(0).
  static Curve from_function(SpacePtr space, const std::function<double(double)>& f,
                             const std::function<double(double)>& fprime);

  const SpacePtr& space() const { return space_; }
  double f0() const { return f0_; }
  std::vector<double>& deriv() { return deriv_; }
  const std::vector<double>& deriv() const { return deriv_; }
  std::size_t valid_len() const { return valid_len_; }
  void set_f0(double v) { f0_ = v; }

  // delta_x: point evaluation of the piecewise-linear curve.
  double eval(double x) const;
  // Exact integral of the curve over [a, b] within the valid domain.
  double integrate(double a, double b) const;

  double norm_sq() const;
  double norm() const;

  // this += c * other (over the shared valid prefix; valid_len shrinks to it)
  void add_scaled(const Curve& other, double c);
  void scale(double c);

  // One-cell left shift composed with a scalar factor, in place; used by
  // the time-stepping loop where every semigroup application is an exact
  // index shift.
  void shift_decay_in_place(double decay);

  Curve operator+(const Curve& o) const;
  Curve operator-(const Curve& o) const;
  Curve operator*(double c) const;

  std::string to_csv() const;
  static Curve from_csv(SpacePtr space, const std::string& text);

 private:
  SpacePtr space_;
  double f0_ = 0.0;
  std::vector<double> deriv_;
  std::size_t valid_len_ = 0;
};

// <f, g>_w = f(0)g(0) + quadrature of w f'g' (shared grid required)
double inner_product(const Curve& f, const Curve& g);

// Reproducing kernel of point evaluation, h_x.
Curve kernel_hx(const SpacePtr& space, double x);
// ||delta_x||_*^2 = h_x(x) = 1 + int_0^x 1/w, in closed form.
double eval_norm_sq(const SpacePtr& space, double x);

// Left-shift semigroup (S_s f)(y) = f(y+s); s must be a grid multiple.
Curve shift(const Curve& f, double s);
// Adjoint of the left shift on the weighted space.
Curve shift_adjoint(const Curve& g, double s);

// I_d: mean of the curve over [0, d].
double integ_Id(const Curve& f, double d);
// J_{x,d} = I_d o S_x; mean over [x, x+d] (x need not be on the grid).
double integ_Jxd(const Curve& f, double x, double d);

// Riesz representers of I_d and J_{x,d}.
Curve kernel_hdI(const SpacePtr& space, double d);
Curve kernel_hxd(const SpacePtr& space, double x, double d);

}  // namespace hestonfwd
