#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace hestonfwd {

// Fixed-order pairwise summation. Result is independent of how work was
// distributed across threads, which is what the determinism contract needs.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSe mean_se(std::span<const double> xs) {
  MeanSe r;
  r.n = xs.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(xs) / double(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - r.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / double(r.n - 1);
  r.se = std::sqrt(var / double(r.n));
  return r;
}

// Static block partition over path indices. Per-path work writes into
// preallocated slots; any reduction happens afterwards in index order, so
// the thread count never changes the result.
inline void for_each_path(std::size_t n_paths, int threads,
                          const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n_paths < 2) {
    for (std::size_t i = 0; i < n_paths; ++i) body(i);
    return;
  }
  const std::size_t t = std::min<std::size_t>(std::size_t(threads), n_paths);
  std::vector<std::thread> workers;
  workers.reserve(t);
  for (std::size_t b = 0; b < t; ++b) {
    const std::size_t lo = n_paths * b / t;
    const std::size_t hi = n_paths * (b + 1) / t;
    workers.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace hestonfwd
