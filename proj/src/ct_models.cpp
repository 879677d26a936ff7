#include "pchan/ct_models.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "pchan/errors.hpp"
#include "pchan/quadrature.hpp"
#include "pchan/special.hpp"
#include "series_detail.hpp"

namespace pchan {

namespace {

void check_horizons(const DcModel& p, const DcModel& q) {
    if (!(p.horizon > 0.0) || p.horizon != q.horizon) throw DomainError("DC model: horizons must match and be positive");
}

const double kHalfLoss = 0.5 - 0.5 * std::numbers::ln2;  // l(1/2, 1)

double unit_mean(const Integrand& f) { return integrate(f, 0.0, 1.0, 1e-13).value; }

}  // namespace

ExtReal ct_mle(const DcModel& p, const DcModel& q, double gamma, const SeriesPolicy& policy) {
    check_horizons(p, q);
    return p.horizon * mle(p.prior, q.prior, gamma * p.horizon, policy);
}

ExtReal ct_cmle(const DcModel& p, const DcModel& q, double gamma, double tol, const SeriesPolicy& policy) {
    check_horizons(p, q);
    const double T = p.horizon;
    if (gamma == 0.0) return T * mle(p.prior, q.prior, 0.0, policy);
    if (std::isinf(mle(p.prior, q.prior, 0.5 * gamma * T, policy))) return kInf;
    return integrate([&](double t) { return mle(p.prior, q.prior, gamma * t, policy); }, 0.0, T, tol).value;
}

ExtReal binary_dc_g(double p, double q, double gamma) {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw DomainError("binary_dc_g: p, q must lie in [0, 1]");
    if (!(gamma >= 0.0)) throw DomainError("binary_dc_g: gamma must be >= 0");
    if (q == 0.0) return p > 0.0 ? kInf : 0.0;
    const double e = std::exp(-gamma);
    const double d = 1.0 - q + q * e;  // Q-probability of no arrivals
    const double first = q * e * (1.0 - p) / d;
    const double bracket = std::log(d) - std::log(q) + gamma - (1.0 - q) / d;
    return first + bracket * p * e;
}

namespace {

double binary_closed_formula(double p, double q, double gamma) {
    if (gamma < 1e-7) return binary_dc_g(p, q, 0.5 * gamma);
    const double c = 1.0 / q - 1.0;
    // e^{-g} log(1 + e^g c) without overflow
    double a = 0.0;
    if (c > 0.0) {
        const double s = gamma + std::log(c);
        a = s > 0.0 ? std::exp(-gamma) * (s + std::log1p(std::exp(-s))) : std::exp(-gamma) * std::log1p(std::exp(s));
    }
    const double b = q == 1.0 ? -gamma : std::log1p(q * std::expm1(-gamma));
    return (-p * a + p * std::log(1.0 / q) + (p - 1.0) * b) / gamma;
}

std::mutex g_memo_mutex;
std::map<std::pair<double, double>, bool> g_binary_checked;
bool g_halfdc_checked = false;

}  // namespace

double binary_dc_cmle_closed(double p, double q, double gamma) {
    if (!(q > 0.0)) throw DomainError("binary_dc_cmle_closed: q must be positive");
    if (!(gamma >= 0.0)) throw DomainError("binary_dc_cmle_closed: gamma must be >= 0");
    {
        std::lock_guard lock(g_memo_mutex);
        auto [it, inserted] = g_binary_checked.try_emplace({p, q}, false);
        if (!it->second) {
            for (double g : {0.5, 2.0, 8.0}) {
                const double closed = binary_closed_formula(p, q, g);
                const double quad = unit_mean([&](double t) { return binary_dc_g(p, q, g * t); });
                if (std::abs(closed - quad) > 1e-8)
                    throw TranscriptionError("binary_dc_cmle_closed: closed form " + std::to_string(closed) +
                                             " vs quadrature " + std::to_string(quad) + " at gamma " +
                                             std::to_string(g) + "; use ct_cmle instead");
            }
            it->second = true;
        }
    }
    if (gamma == 0.0) return binary_dc_g(p, q, 0.0);
    return binary_closed_formula(p, q, gamma);
}

double halfdc_f(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("halfdc_f: gamma must be >= 0");
    const double arrive = -std::expm1(-0.5 * gamma);
    // Q-posterior mean after zero arrivals, e^{-g} / (1 + e^{-g}), in log form.
    const double log_m = -gamma - std::log1p(std::exp(-gamma));
    return kHalfLoss * arrive + detail::loss_from_log(0.5, log_m) * std::exp(-0.5 * gamma);
}

namespace {

double halfdc_closed_formula(double gamma) {
    if (gamma < 1e-7) return halfdc_f(0.5 * gamma);
    const double log1pexp = gamma + std::log1p(std::exp(-gamma));
    return kHalfLoss + (std::numbers::ln2 - std::exp(-0.5 * gamma) * log1pexp) / gamma;
}

double halfdc_quadrature(double gamma) {
    return unit_mean([&](double t) { return halfdc_f(gamma * t); });
}

}  // namespace

double halfdc_cmle_closed(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("halfdc_cmle_closed: gamma must be >= 0");
    {
        std::lock_guard lock(g_memo_mutex);
        if (!g_halfdc_checked) {
            for (double g : {1.0, 5.0, 20.0}) {
                const double closed = halfdc_closed_formula(g);
                const double quad = halfdc_quadrature(g);
                if (std::abs(closed - quad) > 1e-6)
                    throw TranscriptionError("halfdc_cmle_closed: closed form disagrees with quadrature at gamma " +
                                             std::to_string(g) + "; use ct_cmle instead");
            }
            g_halfdc_checked = true;
        }
    }
    if (gamma == 0.0) return 0.0;
    return halfdc_closed_formula(gamma);
}

double halfdc_cmle_reference_form(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("halfdc_cmle_reference_form: gamma must be positive");
    using std::numbers::ln2;
    using std::numbers::pi;
    const double g = gamma;
    const double bracket = -24.0 + 24.0 * std::exp(-g / 2) + 3.0 * g * g + pi * pi - 24.0 * gudermannian(-g / 2) +
                           12.0 * g * ln2 - 24.0 * ln2 + std::exp(-g / 2) * 24.0 * ln2 +
                           12.0 * g * std::log1p(std::exp(g)) - 12.0 * g * std::log(std::exp(g) * std::cosh(g / 2)) +
                           12.0 * dilog(-std::exp(g));
    return -bracket / (24.0 * g);
}

double halfdc_reference_form_gap(double gamma) {
    return std::abs(halfdc_cmle_reference_form(gamma) - halfdc_quadrature(gamma));
}

}  // namespace pchan
