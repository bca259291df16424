#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace hestonfwd {

// Weight function w: R+ -> [1, inf), nondecreasing, w(0) = 1, with
// integrable reciprocal. The exponential family w(x) = exp(alpha*x) is the
// default; a tabulated variant takes samples of 1/w at the grid nodes.
struct Weight {
  enum class Kind { Exponential, Tabulated };

  Kind kind = Kind::Exponential;
  double alpha = 1.0;                 // rate of the exponential weight
  std::vector<double> winv_nodes;     // tabulated: 1/w at nodes 0..n_cells

  static Weight exponential(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("weight rate must be positive");
    Weight w;
    w.kind = Kind::Exponential;
    w.alpha = alpha;
    return w;
  }

  static Weight tabulated(std::vector<double> winv_at_nodes) {
    if (winv_at_nodes.size() < 2) throw std::invalid_argument("need at least two weight samples");
    if (winv_at_nodes.front() != 1.0) throw std::invalid_argument("w(0) must be 1");
    for (std::size_t i = 1; i < winv_at_nodes.size(); ++i) {
      if (winv_at_nodes[i] <= 0.0 || winv_at_nodes[i] > winv_at_nodes[i - 1] + 1e-15)
        throw std::invalid_argument("1/w must be positive and nonincreasing");
    }
    Weight w;
    w.kind = Kind::Tabulated;
    w.winv_nodes = std::move(winv_at_nodes);
    return w;
  }
};

struct Grid {
  double dx = 1.0 / 64.0;
  std::size_t n_cells = 1920;
  std::size_t extension = 64;  // cells beyond the query window, shift headroom

  Grid() = default;
  Grid(double dx_, std::size_t n_cells_, std::size_t extension_)
      : dx(dx_), n_cells(n_cells_), extension(extension_) {
    if (dx <= 0.0) throw std::invalid_argument("grid spacing must be positive");
    if (n_cells == 0) throw std::invalid_argument("grid needs at least one cell");
    if (extension > n_cells) throw std::invalid_argument("extension exceeds grid");
  }

  double length() const { return dx * double(n_cells); }
};

// Discretization of the weighted curve space on a uniform grid.
//
// A curve is stored as (value at 0, one derivative value per cell), the
// derivative being constant on each cell. The discrete weight of cell i is
// the reciprocal of the cell average of 1/w, which makes the pairing
// <f, h_x>_w collapse to the exact integral of the piecewise-linear curve:
// the reproducing property, the shift adjoint relation and the norm lemma
// all hold at floating-point precision on the grid.
class Space {
 public:
  Space(Weight weight, Grid grid);

  const Weight& weight() const { return weight_; }
  const Grid& grid() const { return grid_; }
  double dx() const { return grid_.dx; }
  std::size_t n_cells() const { return grid_.n_cells; }
  double node(std::size_t i) const { return grid_.dx * double(i); }

  std::span<const double> winv_cells() const { return winv_cell_; }
  std::span<const double> w_cells() const { return w_cell_; }
  double winv_cell(std::size_t i) const { return winv_cell_[i]; }
  double w_cell(std::size_t i) const { return w_cell_[i]; }

  // integral of 1/w over [0, x]
  double winv_integral(double x) const;
  // integral of 1/w over [0, inf)
  double winv_total() const;

  // Maps a time offset to a whole number of cells; throws if off-grid.
  std::size_t cells_for(double s) const;

 private:
  Weight weight_;
  Grid grid_;
  std::vector<double> winv_cell_;  // cell averages of 1/w
  std::vector<double> w_cell_;     // 1 / winv_cell_
};

using SpacePtr = std::shared_ptr<const Space>;

inline SpacePtr make_space(Weight w, Grid g) {
  return std::make_shared<const Space>(std::move(w), std::move(g));
}

}  // namespace hestonfwd
