#include "pchan/special.hpp"

#include <cmath>
#include <numbers>

#include "pchan/errors.hpp"

namespace pchan {

double gudermannian(double x) { return 2.0 * std::atan(std::exp(x)) - 0.5 * std::numbers::pi; }

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

// Power series, |x| <= 1/2: 2^-k / k^2 falls below 1e-17 well before 60 terms.
double dilog_series(double x) {
    double term = x, sum = 0.0;
    for (int k = 1; k <= 80; ++k) {
        const double c = term / (static_cast<double>(k) * k);
        sum += c;
        if (std::abs(c) < 1e-18 * std::abs(sum)) break;
        term *= x;
    }
    return sum;
}

}  // namespace

double dilog(double x) {
    if (std::isnan(x)) return x;
    if (x > 1.0) throw DomainError("dilog: argument above 1 is outside the real branch");
    if (x == 1.0) return kPi2Over6;
    if (x == 0.0) return 0.0;
    if (x < -1.0) {
        // Li2(-z) + Li2(-1/z) = -pi^2/6 - log^2(z)/2,  z = -x > 1.
        const double lz = std::log(-x);
        return -kPi2Over6 - 0.5 * lz * lz - dilog(1.0 / x);
    }
    if (x < -0.5) {
        // Landen: Li2(x) = -Li2(x/(x-1)) - log^2(1-x)/2, maps [-1, -1/2) into (1/3, 1/2].
        const double l = std::log1p(-x);
        return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
    }
    if (x <= 0.5) return dilog_series(x);
    // Reflection: Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x).
    return kPi2Over6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
}

}  // namespace pchan
