#include "pchan/loss.hpp"

#include <cmath>

#include "pchan/errors.hpp"
#include "pchan/priors.hpp"

namespace pchan {

double xlogx(double x) {
    if (x == 0.0) return 0.0;
    return x * std::log(x);
}

ExtReal loss(double x, double xhat) {
    if (!(x >= 0.0) || !(xhat >= 0.0)) throw DomainError("loss: arguments must be non-negative");
    if (x == 0.0) return xhat;
    if (xhat == 0.0 || std::isinf(x) || std::isinf(xhat)) return kInf;
    // Near x == xhat the direct form cancels. With v = (x - xhat)/(x + xhat),
    // loss = (x - xhat) v + 2x (v^3/3 + v^5/5 + ...), every term positive.
    const double d = x - xhat;
    double v;
    if (std::abs(d) < 0.1 * (x + xhat)) {
        const double u = d / (x + xhat), u2 = u * u;
        double s = d * u, term = 2.0 * x * u;
        for (int j = 1; j < 1000; ++j) {
            term *= u2;
            const double next = s + term / (2 * j + 1);
            if (next == s) break;
            s = next;
        }
        v = s;
    } else {
        v = x * std::log(x / xhat) - d;
    }
    return v < 0.0 ? 0.0 : v;
}

ExtReal loss0(double x) {
    if (!(x >= 0.0)) throw DomainError("loss0: argument must be non-negative");
    return loss(x, 1.0);
}

ExtReal min_mean_loss(const DiscretePrior& p) {
    const auto m = moments(p);
    const double v = m.mean_xlogx - xlogx(m.mean);
    return v < 0.0 ? 0.0 : v;
}

}  // namespace pchan
