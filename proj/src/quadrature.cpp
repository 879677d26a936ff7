#include "pchan/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pchan/errors.hpp"

namespace pchan {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; the odd-indexed
// nodes are the 7-point Gauss rule.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value, error;
    int depth;
};

Panel gauss_kronrod(const Integrand& f, double a, double b, int depth, std::int64_t& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double v = f(x);
        ++evals;
        if (!std::isfinite(v)) throw DomainError("integrate: integrand is not finite at " + std::to_string(x));
        return v;
    };
    const double fc = eval(c);
    double k = kWk[7] * fc;
    double g = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXk[j];
        const double s = eval(c - dx) + eval(c + dx);
        k += kWk[j] * s;
        if (j % 2 == 1) g += kWg[j / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h), depth};
}

double ordered_sum(std::vector<Panel>& panels, double Panel::*field) {
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double s = 0.0, comp = 0.0;
    for (const auto& p : panels) {
        const double v = p.*field;
        const double t = s + v;
        comp += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    return s + comp;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, double tol, const QuadOptions& options) {
    if (!(a <= b)) throw DomainError("integrate: require a <= b");
    if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
    QuadResult out;
    if (a == b) return out;

    std::vector<Panel> panels{gauss_kronrod(f, a, b, 0, out.evaluations)};
    double total_err = panels.front().error;
    while (total_err > tol) {
        // Refine the worst panel that can still be split; ties go to the leftmost.
        std::size_t worst = panels.size();
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (panels[i].depth >= options.max_depth) continue;
            if (worst == panels.size() || panels[i].error > panels[worst].error ||
                (panels[i].error == panels[worst].error && panels[i].a < panels[worst].a))
                worst = i;
        }
        if (worst == panels.size() || static_cast<std::int64_t>(panels.size()) >= options.max_panels) {
            out.value = ordered_sum(panels, &Panel::value);
            out.abs_error_estimate = total_err;
            throw ConvergenceError("integrate: subdivision limit reached with error estimate " +
                                       std::to_string(total_err) + " > " + std::to_string(tol),
                                   out.value);
        }
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        panels[worst] = gauss_kronrod(f, p.a, mid, p.depth + 1, out.evaluations);
        panels.push_back(gauss_kronrod(f, mid, p.b, p.depth + 1, out.evaluations));
        total_err = 0.0;
        for (const auto& q : panels) total_err += q.error;
    }
    out.value = ordered_sum(panels, &Panel::value);
    out.abs_error_estimate = total_err;
    return out;
}

QuadResult integrate_semi_infinite(const Integrand& f, double a, double tol, const SemiInfiniteOptions& options) {
    if (!(tol > 0.0)) throw DomainError("integrate_semi_infinite: tol must be positive");
    double cutoff = a + std::max(8.0, options.scale_hint);
    QuadResult out = integrate(f, a, cutoff, 0.25 * tol, options.panel);

    double prev_block = -1.0;
    int stalled = 0;
    while (true) {
        if (options.tail_bound) {
            const double tail = (*options.tail_bound)(cutoff);
            if (tail < 0.5 * tol) {
                out.abs_error_estimate += tail;
                return out;
            }
        }
        if (cutoff > options.max_cutoff)
            throw ConvergenceError("integrate_semi_infinite: cutoff exceeded " + std::to_string(options.max_cutoff),
                                   out.value);
        const double next = a + 2.0 * (cutoff - a);
        const auto block = integrate(f, cutoff, next, 0.0625 * tol, options.panel);
        out.value += block.value;
        out.abs_error_estimate += block.abs_error_estimate;
        out.evaluations += block.evaluations;
        cutoff = next;

        if (prev_block >= 0.0 && !options.tail_bound) {
            const double r = prev_block > 0.0 ? block.value / prev_block : 0.0;
            if (block.value <= 0.0 || r <= 0.0) {
                return out;
            }
            if (r < 1.0) {
                stalled = 0;
                // Blocks of an exponentially or polynomially decaying integrand
                // over doubling ranges shrink at least geometrically.
                const double tail = block.value * r / (1.0 - r);
                if (tail < 0.5 * tol) {
                    out.abs_error_estimate += tail;
                    return out;
                }
            } else if (++stalled >= 3) {
                throw DivergenceError("integrate_semi_infinite: integrand does not decay (block ratio " +
                                          std::to_string(r) + ")",
                                      out.value);
            }
        }
        prev_block = block.value;
    }
}

}  // namespace pchan
