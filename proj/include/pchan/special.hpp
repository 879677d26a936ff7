#pragma once

namespace pchan {

/// gd(x) = 2 arctan(e^x) - pi/2.
double gudermannian(double x);

/// Dilogarithm Li2(x) = sum_{k>=1} x^k / k^2 for real x <= 1, extended to
/// x < -1 through the inversion identity. Throws DomainError for x > 1.
double dilog(double x);

}  // namespace pchan
