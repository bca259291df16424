#include "hestonfwd/space.hpp"

#include <cmath>

namespace hestonfwd {

Space::Space(Weight weight, Grid grid) : weight_(std::move(weight)), grid_(grid) {
  const std::size_t n = grid_.n_cells;
  winv_cell_.resize(n);
  w_cell_.resize(n);
  if (weight_.kind == Weight::Kind::Exponential) {
    const double a = weight_.alpha;
    const double d = grid_.dx;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = std::exp(-a * d * double(i));
      const double hi = std::exp(-a * d * double(i + 1));
      winv_cell_[i] = (lo - hi) / (a * d);
    }
  } else {
    if (weight_.winv_nodes.size() != n + 1)
      throw std::invalid_argument("tabulated weight needs one sample per node");
    for (std::size_t i = 0; i < n; ++i)
      winv_cell_[i] = 0.5 * (weight_.winv_nodes[i] + weight_.winv_nodes[i + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) w_cell_[i] = 1.0 / winv_cell_[i];
}

double Space::winv_integral(double x) const {
  if (x < 0.0) throw std::domain_error("winv_integral: negative argument");
  if (weight_.kind == Weight::Kind::Exponential)
    return (1.0 - std::exp(-weight_.alpha * x)) / weight_.alpha;
  // piecewise-linear 1/w, truncated at the grid end
  const double d = grid_.dx;
  const double xc = std::min(x, grid_.length());
  double acc = 0.0;
  std::size_t i = 0;
  for (; double(i + 1) * d <= xc && i < grid_.n_cells; ++i) acc += winv_cell_[i] * d;
  if (i < grid_.n_cells) {
    const double frac = xc - double(i) * d;
    if (frac > 0.0) {
      const double w0 = weight_.winv_nodes[i];
      const double w1 = weight_.winv_nodes[i + 1];
      const double t = frac / d;
      acc += frac * (w0 + 0.5 * t * (w1 - w0));
    }
  }
  return acc;
}

double Space::winv_total() const {
  if (weight_.kind == Weight::Kind::Exponential) return 1.0 / weight_.alpha;
  return winv_integral(grid_.length());
}

std::size_t Space::cells_for(double s) const {
  if (s < 0.0) throw std::domain_error("negative shift");
  const double r = s / grid_.dx;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9)
    throw std::invalid_argument("offset is not a whole number of grid cells");
  return std::size_t(k);
}

}  // namespace hestonfwd
