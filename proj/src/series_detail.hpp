#pragma once

// Shared machinery for the output-alphabet sums. Not installed.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pchan/errors.hpp"
#include "pchan/loss.hpp"
#include "pchan/priors.hpp"
#include "pchan/scalar_channel.hpp"

namespace pchan::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// log(y^y e^-y / y!): the part of log Poisson(y; lambda) that does not
/// depend on lambda once y log(y/lambda) - y + lambda is split off. Kept
/// separate because its magnitude stays O(log y) where log y! itself is huge.
inline double log_poisson_base(std::int64_t y) {
    if (y == 0) return 0.0;
    const double n = static_cast<double>(y);
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    double stirlerr;
    if (y <= 15) {
        stirlerr = std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kHalfLog2Pi;
    } else {
        const double n2 = n * n;
        constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680, s4 = 1.0 / 1188;
        stirlerr = (s0 - (s1 - (s2 - (s3 - s4 / n2) / n2) / n2) / n2) / n;
    }
    return -kHalfLog2Pi - 0.5 * std::log(n) - stirlerr;
}

/// log Poisson(y; lambda) from the base term.
inline double log_poisson_from_base(std::int64_t y, double lambda, double base) {
    if (lambda == 0.0) return y == 0 ? 0.0 : kNegInf;
    if (y == 0) return -lambda;
    return base - loss(static_cast<double>(y), lambda);
}

/// Per-atom constants for evaluating log w + log Poisson(y; gamma x) at successive y.
class AtomTable {
public:
    AtomTable(std::span<const double> xs, std::span<const double> ws, double gamma) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double lam = gamma * xs[i];
            log_w_.push_back(std::log(ws[i]));
            lam_.push_back(lam);
        }
    }
    explicit AtomTable(const DiscretePrior& p, double gamma) {
        for (const auto& a : p.atoms()) {
            const double lam = gamma * a.x;
            log_w_.push_back(std::log(a.w));
            lam_.push_back(lam);
        }
    }

    std::size_t size() const { return lam_.size(); }

    /// log P(Y=y | atom i) given log_poisson_base(y).
    double log_lik(std::size_t i, std::int64_t y, double base) const {
        return log_poisson_from_base(y, lam_[i], base);
    }

    /// Fills out[i] = log w_i + log P(Y=y | atom i).
    void log_joint(std::int64_t y, double base, std::vector<double>& out) const {
        out.resize(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = log_w_[i] + log_lik(i, y, base);
    }

private:
    std::vector<double> log_w_;
    std::vector<double> lam_;
};

/// log of the posterior mean sum_i exp(lj_i) x_i / sum_i exp(lj_i); -inf if the mean is 0,
/// NaN if all weights vanish.
inline double log_posterior_mean(std::span<const double> lj, std::span<const double> xs) {
    double m = kNegInf;
    for (double v : lj) m = std::max(m, v);
    if (m == kNegInf) return std::numeric_limits<double>::quiet_NaN();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lj.size(); ++i) {
        const double e = std::exp(lj[i] - m);
        den += e;
        num += e * xs[i];
    }
    if (num == 0.0) return kNegInf;
    return std::log(num) - std::log(den);
}

/// l(x, exp(log_m)), stable when the estimate underflows.
inline ExtReal loss_from_log(double x, double log_m) {
    if (log_m == kNegInf) return x > 0.0 ? kInf : 0.0;
    const double m = std::exp(log_m);
    if (m > 1e-280) return loss(x, m);
    if (x == 0.0) return m;
    return x * (std::log(x) - log_m) - x + m;
}

/// First y >= 0 at which the truncation rule is satisfied for a governing law
/// whose largest intensity is lam_max, called repeatedly with the running mass.
struct Stopper {
    Stopper(double lam_max, const SeriesPolicy& policy)
        : floor_y(lam_max + 10.0 * std::sqrt(lam_max)), policy(policy) {}

    /// Returns true when summation should stop after index y.
    bool done(std::int64_t y, double mass) {
        if (stop_at < 0) {
            if (mass >= 1.0 - policy.tail_epsilon && static_cast<double>(y) >= floor_y)
                stop_at = y + policy.safety_terms;
        }
        return stop_at >= 0 && y >= stop_at;
    }

    double floor_y;
    const SeriesPolicy& policy;
    std::int64_t stop_at = -1;
};

/// Drives term(y, log_poisson_base(y)) -> {contribution, governing mass} until the stopper fires.
/// An infinite contribution short-circuits (every sum here is bounded below).
template <class Term>
ExtReal sum_outputs(double lam_max, const SeriesPolicy& policy, const char* what, Term&& term) {
    policy.validate();
    Stopper stop(lam_max, policy);
    CompensatedSum total, mass;
    for (std::int64_t y = 0; y < policy.max_terms; ++y) {
        const auto [value, pmass] = term(y, log_poisson_base(y));
        if (std::isinf(value) && value > 0) return kInf;
        total.add(value);
        mass.add(pmass);
        if (stop.done(y, mass.value())) return total.value();
    }
    throw ConvergenceError(std::string(what) + ": series cap of " + std::to_string(policy.max_terms) +
                               " terms reached before the tail bound",
                           total.value());
}

}  // namespace pchan::detail
