#pragma once

#include <cstdint>
#include <optional>

#include "hestonfwd/pricing.hpp"

namespace hestonfwd {

enum class GreekParam { X0, Y0, Eta };
enum class GreekEstimator { Fd, Pathwise, Skorohod, LambdaGrid };

struct GreekRequest {
  GreekParam parameter = GreekParam::X0;
  std::optional<Curve> dir_curve;          // direction for x0 / y0
  std::optional<FiniteRankOp> dir_op;      // direction for eta
  double fd_epsilon = 1e-3;                // in the direction's natural norm
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Evaluation point of the randomizing kernel; the estimator's value must not
// depend on it (only its variance does).
struct RandomizationSpec {
  double eval_point = 0.25;
};

struct GreekEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n_paths = 0;
  GreekEstimator estimator = GreekEstimator::Fd;
  // Skorohod diagnostics: the control term Psi(X_tau) G_x must have mean 0.
  double control_mean = 0.0;
  double control_se = 0.0;
};

// Central difference with common random numbers across both legs.
GreekEstimate greek_fd(const ModelSpec& m, const OptionSpec& opt,
                       const GreekRequest& req);

// Derivative of the payoff along each path times the tangent-flow delivery
// average; zero variance for linear payoffs in the x0 case.
GreekEstimate greek_pathwise(const ModelSpec& m, const OptionSpec& opt,
                             const GreekRequest& req);

// Randomized integration-by-parts estimator: per path P - Psi(g) G_x with
// G_x ~ N(0, h_x(x)) drawn from a stream independent of the model noise.
GreekEstimate greek_skorohod(const ModelSpec& m, const OptionSpec& opt,
                             const GreekRequest& req, const RandomizationSpec& rand);

struct LambdaGridResult {
  GreekEstimate est;
  double max_slope = 0.0;         // largest per-path finite-difference slope in lambda
  double coverage_miss = 0.0;     // fraction of paths with 1/xi outside the grid hull
};

// Literal re-simulation at the randomized parameter theta - dir + lambda xi dir
// over a lambda grid, interpolated per path at lambda = 1/xi. Cross-checks
// greek_skorohod and measures the continuity constant empirically.
LambdaGridResult skorohod_lambda_grid(const ModelSpec& m, const OptionSpec& opt,
                                      const GreekRequest& req,
                                      const RandomizationSpec& rand,
                                      std::span<const double> lambda_grid);

// Log-spaced grid covering e^{+-width sqrt(tau)}, the bulk of 1/xi's law.
std::vector<double> make_lambda_grid(double tau, std::size_t n_points,
                                     double width = 5.0);

}  // namespace hestonfwd
