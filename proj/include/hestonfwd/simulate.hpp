#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hestonfwd/model.hpp"
#include "hestonfwd/rng.hpp"

namespace hestonfwd {

// Karhunen-Loeve coefficients of the Q-Wiener increments for one path:
// dW_k = sum_n coef[k][n] v_n with coef ~ N(0, lambda_n dt), i.i.d. over k.
struct NoiseIncrements {
  std::size_t n_steps = 0;
  std::size_t m_w = 0;
  std::size_t m_b = 0;
  std::vector<double> w_coef;  // n_steps x m_w, row-major
  std::vector<double> b_coef;  // n_steps x m_b, row-major

  std::span<const double> w_row(std::size_t k) const {
    return {w_coef.data() + k * m_w, m_w};
  }
  std::span<const double> b_row(std::size_t k) const {
    return {b_coef.data() + k * m_b, m_b};
  }
};

// Coefficient vectors for one process, in eigvec order, step-major.
std::vector<double> gen_coefficients(const CovOp& q, double dt, std::size_t n_steps,
                                     RngStream& stream);

// Both processes for one path, streams keyed by (seed, path, tag).
NoiseIncrements gen_increments(const ModelSpec& m, std::uint64_t seed,
                               std::uint64_t path_index);

// What the stepping loop hands to an observer at each left point k:
// the state Y_k before the update, the rank-one noise scalar
// sigma_k = <Z_k, dB_k>, and ||Q_B^{1/2} Z_k||^2.
struct StepInfo {
  std::size_t k;
  const Curve& y;
  double sigma;
  double qbz_sq;
  std::span<const double> w_row;
  std::span<const double> b_row;
};

// Shared per-model preparation for path generation. The exponential-Euler
// scheme applies semigroups exactly by index shift; observers own any
// auxiliary state (X accumulation, tangent flows) and may advance their
// own Y-type flows through step_flow with the same increments.
class PathEngine {
 public:
  explicit PathEngine(const ModelSpec& m);

  const ModelSpec& model() const { return *model_; }

  // Gram data of a finite-rank operator against the Q_W eigenbasis, so the
  // per-step application costs O(rank * grid) instead of inner products.
  struct PreparedOp {
    const FiniteRankOp* op = nullptr;
    std::vector<double> gram;  // terms x m_w: <a_j, v_n>_w
  };
  PreparedOp prepare(const FiniteRankOp& op) const;
  const PreparedOp& prepared_eta() const { return eta_; }

  using OpCombo = std::span<const std::pair<double, const PreparedOp*>>;

  // y := U_dt(y + sum coef * op(dW_k))
  void step_flow(Curve& y, std::span<const double> w_row, OpCombo ops) const;

  // Runs the Y flow from y_start, visiting each left point.
  template <class Obs>
  void run(const NoiseIncrements& nz, const Curve& y_start, OpCombo eta_combo,
           Obs&& obs) const {
    Curve y = y_start;
    const std::size_t n = model_->n_steps();
    for (std::size_t k = 0; k < n; ++k) {
      double sigma = 0.0, qbz = 0.0;
      if (nz.m_b > 0) compute_z_terms(y, nz.b_row(k), sigma, qbz);
      obs(StepInfo{k, y, sigma, qbz, nz.m_w ? nz.w_row(k) : std::span<const double>{},
                   nz.m_b ? nz.b_row(k) : std::span<const double>{}});
      step_flow(y, nz.m_w ? nz.w_row(k) : std::span<const double>{}, eta_combo);
    }
  }

  template <class Obs>
  void run(const NoiseIncrements& nz, Obs&& obs) const {
    const std::pair<double, const PreparedOp*> base{1.0, &eta_};
    run(nz, model_->y0, OpCombo{&base, 1}, std::forward<Obs>(obs));
  }

  double u_decay() const { return u_decay_; }
  double s_decay() const { return s_decay_; }

  // (sigma_k, ||Q_B^{1/2} Z_k||^2) for the current Y state.
  std::pair<double, double> z_terms(const Curve& y, std::span<const double> b_row) const;

 private:
  void compute_z_terms(const Curve& y, std::span<const double> b_row, double& sigma,
                       double& qbz_sq) const;

 const ModelSpec* model_;
  PreparedOp eta_;
  double u_decay_ = 1.0;
  double s_decay_ = 1.0;
  // constant-gamma policy: <gamma, v_n^B> and ||Q_B^{1/2} gamma||^2
  std::vector<double> gamma_proj_;
  double qbz_const_ = 0.0;
};

// One explicit step of the coupled system, exposed for tests and dumps.
void step_system(const PathEngine& eng, Curve& y, Curve& x, std::span<const double> w_row,
                 std::span<const double> b_row);

// One simulated scenario with full curve trajectories.
struct TangentDirections {
  std::optional<Curve> x0_dir;
  std::optional<Curve> y0_dir;
  std::optional<FiniteRankOp> eta_dir;
};

struct PathBundle {
  std::vector<Curve> y;  // n_steps + 1 states
  std::vector<Curve> x;
  NoiseIncrements noise;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::optional<Curve> tangent_x_x0;        // closed form S_tau(h)
  std::vector<Curve> tangent_x_y0;          // tangent X path, direction in y0
  std::vector<Curve> tangent_x_eta;         // tangent X path, direction in eta
};

PathBundle simulate_path(const ModelSpec& m, std::uint64_t seed, std::uint64_t path_index,
                         const TangentDirections* dirs = nullptr);

// Working-length clipping for constant-gamma Monte Carlo: when the noise
// scalar does not depend on Y and observers only read curve data left of
// max_point, the flow can run on a short valid prefix with bit-identical
// results. Returns the full cell count for policies that need whole-curve
// norms.
std::size_t working_cells(const ModelSpec& m, double max_point);
Curve clip_curve(const Curve& c, std::size_t cells);

}  // namespace hestonfwd
