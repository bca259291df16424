#pragma once

#include <complex>
#include <cstdint>
#include <span>

#include "hestonfwd/simulate.hpp"
#include "hestonfwd/util.hpp"

namespace hestonfwd {

// Closed-form / semi-closed-form oracles. Every Monte Carlo quantity here
// uses the same left-point time rule and the same per-path noise streams
// as the simulator, so cross-checks against simulation contain only Monte
// Carlo error, not discretization mismatch.

struct CharFuncEstimate {
  std::complex<double> value;
  double re_se = 0.0;
  double im_se = 0.0;
  std::size_t n_paths = 0;
};

// Conditional-Gaussian formula: phase from the deterministic drift, and an
// expectation over volatility paths only of the quadratic-form damping.
std::vector<CharFuncEstimate> char_functional(const ModelSpec& m,
                                              std::span<const Curve> probes, double t,
                                              std::size_t n_paths, std::uint64_t seed,
                                              int threads = 1);
CharFuncEstimate char_functional(const ModelSpec& m, const Curve& h, double t,
                                 std::size_t n_paths, std::uint64_t seed,
                                 int threads = 1);

// Empirical E[exp(i<X_t, h>)] from full system simulation.
std::vector<CharFuncEstimate> char_functional_empirical(const ModelSpec& m,
                                                        std::span<const Curve> probes,
                                                        double t, std::size_t n_paths,
                                                        std::uint64_t seed,
                                                        int threads = 1);

// Sample moments of forward prices from full simulation.
MeanSe mc_forward_mean(const ModelSpec& m, double t, double x, std::size_t n_paths,
                       std::uint64_t seed, int threads = 1);
MeanSe mc_forward_cov(const ModelSpec& m, double t, double x, double y,
                      std::size_t n_paths, std::uint64_t seed, int threads = 1);
MeanSe mc_delivery_cov(const ModelSpec& m, double t, double x, double d1, double y,
                       double d2, std::size_t n_paths, std::uint64_t seed,
                       int threads = 1);

// Cov(f(t,x), f(t,y)) as an expectation over volatility paths of the
// conditional covariance integral.
MeanSe cov_forward(const ModelSpec& m, double t, double x, double y, std::size_t n_paths,
                   std::uint64_t seed, int threads = 1);

// Fully deterministic version for the constant-gamma policy; mirrors the
// discrete scheme's second moments exactly.
double cov_forward_const_gamma(const ModelSpec& m, double t, double x, double y);

// Cov(g(t,x,d1), g(t,y,d2)), expectation over volatility paths.
MeanSe cov_delivery(const ModelSpec& m, double t, double x, double d1, double y,
                    double d2, std::size_t n_paths, std::uint64_t seed, int threads = 1);

// Covariance operator of X_t applied to h, Monte Carlo over volatility
// paths. Single-threaded accumulation: with the same (seed, n_paths),
// <Q h_x, h_y> reproduces cov_forward's path set exactly.
Curve cov_operator_apply(const ModelSpec& m, double t, const Curve& h,
                         std::size_t n_paths, std::uint64_t seed);

}  // namespace hestonfwd
