#pragma once

#include <cstdint>
#include <functional>
#include <optional>

namespace pchan {

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::int64_t evaluations = 0;
};

using Integrand = std::function<double(double)>;

struct QuadOptions {
    /// Maximum bisection depth of any panel.
    int max_depth = 40;
    /// Cap on the number of panels held at once.
    std::int64_t max_panels = 4096;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Panels are
/// bisected in order of decreasing error estimate until the summed estimate
/// is below tol. Throws ConvergenceError (carrying the best estimate) when the
/// depth or panel limit is hit first, DomainError on a non-finite sample.
QuadResult integrate(const Integrand& f, double a, double b, double tol = 1e-8, const QuadOptions& options = {});

struct SemiInfiniteOptions {
    /// Characteristic decay length of f supplied by the caller; the first
    /// cutoff is max(8, scale_hint) past a.
    double scale_hint = 0.0;
    /// Optional analytic bound on the integral of f over [G, inf).
    std::optional<std::function<double(double)>> tail_bound;
    /// Give up once the cutoff exceeds this.
    double max_cutoff = 1e7;
    QuadOptions panel = {};
};

/// Integral of a non-negative, eventually decaying f over [a, inf). The cutoff
/// G is doubled until the estimated remaining mass (geometric extrapolation of
/// the last two doubling blocks, or the caller's tail bound) drops below tol/2;
/// that tail estimate is folded into abs_error_estimate. Throws DivergenceError
/// when the block integrals stop shrinking.
QuadResult integrate_semi_infinite(const Integrand& f, double a, double tol = 1e-4,
                                   const SemiInfiniteOptions& options = {});

}  // namespace pchan
