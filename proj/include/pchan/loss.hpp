#pragma once

#include <limits>

namespace pchan {

class DiscretePrior;

/// Non-negative extended real. +infinity is an ordinary value here and
/// propagates through sums; NaN never appears in a valid result.
using ExtReal = double;

inline constexpr ExtReal kInf = std::numeric_limits<double>::infinity();

/// x log x with 0 log 0 = 0.
double xlogx(double x);

/// Poisson-channel loss  x log(x/xhat) - x + xhat.
/// loss(0, xhat) = xhat, loss(x > 0, 0) = +inf. Throws DomainError on negative input.
ExtReal loss(double x, double xhat);

/// Normalized loss  x log x - x + 1, so that loss(x, xhat) = xhat * loss0(x / xhat).
ExtReal loss0(double x);

/// E[X log X] - E[X] log E[X]: the smallest mean loss achievable by a constant.
ExtReal min_mean_loss(const DiscretePrior& p);

}  // namespace pchan
