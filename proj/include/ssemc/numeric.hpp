#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace ssemc {

/// log(sum(exp(x))) with the max shift. Empty input and all -inf both give
/// -inf. Summation runs left to right over the coefficients so results are
/// reproducible run to run.
template <typename Derived>
double log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return -std::numeric_limits<double>::infinity();
  double max_val = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i) > max_val) max_val = x(i);
  }
  if (!std::isfinite(max_val)) return max_val;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += std::exp(x(i) - max_val);
  return max_val + std::log(sum);
}

}  // namespace ssemc
