#include "pchan/scalar_channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pchan/errors.hpp"
#include "series_detail.hpp"

namespace pchan {

using detail::AtomTable;
using detail::CompensatedSum;
using detail::kNegInf;
using detail::log_posterior_mean;
using detail::log_poisson_base;
using detail::log_poisson_from_base;
using detail::log_sum_exp;
using detail::loss_from_log;
using detail::sum_outputs;

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and >= 0");
}

std::vector<double> locations(const DiscretePrior& p) {
    std::vector<double> xs;
    for (const auto& a : p.atoms()) xs.push_back(a.x);
    return xs;
}

double prior_mean(const DiscretePrior& p) { return moments(p).mean; }

}  // namespace

void SeriesPolicy::validate() const {
    if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) throw DomainError("SeriesPolicy: tail_epsilon must lie in (0, 1)");
    if (max_terms < 1) throw DomainError("SeriesPolicy: max_terms must be >= 1");
    if (safety_terms < 0) throw DomainError("SeriesPolicy: safety_terms must be >= 0");
}

double log_poisson_pmf(std::int64_t y, double lambda) {
    if (y < 0) return kNegInf;
    if (lambda == 0.0) return y == 0 ? 0.0 : kNegInf;
    return log_poisson_from_base(y, lambda, log_poisson_base(y));
}

std::int64_t truncation_length(const DiscretePrior& governing, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    const AtomTable tab(governing, gamma);
    std::vector<double> lj;
    std::int64_t count = 0;
    sum_outputs(gamma * governing.max_location(), policy, "truncation_length", [&](std::int64_t y, double lf) {
        ++count;
        tab.log_joint(y, lf, lj);
        return std::pair{0.0, std::exp(log_sum_exp(lj))};
    });
    return count;
}

double output_pmf(const DiscretePrior& p, double gamma, std::int64_t y) {
    check_gamma(gamma);
    if (y < 0) return 0.0;
    std::vector<double> lj;
    for (const auto& a : p.atoms()) lj.push_back(std::log(a.w) + log_poisson_pmf(y, gamma * a.x));
    return std::exp(log_sum_exp(lj));
}

double posterior_mean(const DiscretePrior& p, double gamma, std::int64_t y) {
    check_gamma(gamma);
    if (gamma == 0.0) {
        if (y != 0) throw DomainError("posterior_mean: P(Y = y) = 0 at zero SNR for y > 0");
        return prior_mean(p);
    }
    std::vector<double> lj;
    for (const auto& a : p.atoms()) lj.push_back(std::log(a.w) + log_poisson_pmf(y, gamma * a.x));
    const auto xs = locations(p);
    const double lm = log_posterior_mean(lj, xs);
    if (std::isnan(lm)) throw DomainError("posterior_mean: conditioning on an output of probability zero");
    const double m = std::exp(lm);
    return std::clamp(m, p.min_location(), p.max_location());
}

ExtReal mle(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    if (gamma == 0.0) {
        const double m = prior_mean(q);
        double s = 0.0;
        for (const auto& a : p.atoms()) s += a.w * loss(a.x, m);
        return s;
    }
    const AtomTable tp(p, gamma), tq(q, gamma);
    const auto xp = locations(p), xq = locations(q);
    std::vector<double> lp, lq;
    return sum_outputs(gamma * p.max_location(), policy, "mle", [&](std::int64_t y, double lf) {
        tp.log_joint(y, lf, lp);
        tq.log_joint(y, lf, lq);
        double log_m = log_posterior_mean(lq, xq);
        // Q assigns this output probability zero; its estimator is the only value Q allows, 0.
        if (std::isnan(log_m)) log_m = kNegInf;
        double s = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < lp.size(); ++i) {
            const double pw = std::exp(lp[i]);
            if (pw == 0.0) continue;
            mass += pw;
            s += pw * loss_from_log(xp[i], log_m);
        }
        return std::pair{s, mass};
    });
}

namespace {

// E[X log X] - E[m(Y) log m(Y)], the second closed form of the minimum mean loss.
double mmle_entropy_form(const DiscretePrior& p, double gamma, const SeriesPolicy& policy, double& scale) {
    const auto mom = moments(p);
    const AtomTable tp(p, gamma);
    const auto xp = locations(p);
    std::vector<double> lp;
    CompensatedSum mag;
    const double e_mlogm = sum_outputs(gamma * p.max_location(), policy, "mmle", [&](std::int64_t y, double lf) {
        tp.log_joint(y, lf, lp);
        const double lpy = log_sum_exp(lp);
        const double py = std::exp(lpy);
        if (py == 0.0) return std::pair{0.0, 0.0};
        const double m = std::exp(log_posterior_mean(lp, xp));
        const double v = py * xlogx(m);
        mag.add(std::abs(v));
        return std::pair{v, py};
    });
    scale = std::abs(mom.mean_xlogx) + mag.value();
    return mom.mean_xlogx - e_mlogm;
}

}  // namespace

ExtReal mmle(const DiscretePrior& p, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    const double direct = mle(p, p, gamma, policy);
    if (gamma == 0.0) return direct;
    double scale = 0.0;
    const double alt = mmle_entropy_form(p, gamma, policy, scale);
    const double tol = 1e-9 * std::max({std::abs(direct), scale, 1e-6});
    if (std::abs(direct - alt) > tol)
        throw ConsistencyError("mmle: loss form " + std::to_string(direct) + " and entropy form " +
                               std::to_string(alt) + " disagree");
    return direct;
}

ExtReal output_kl(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    if (gamma == 0.0) return 0.0;
    const AtomTable tp(p, gamma), tq(q, gamma);
    std::vector<double> lp, lq;
    const double d = sum_outputs(gamma * p.max_location(), policy, "output_kl", [&](std::int64_t y, double lf) {
        tp.log_joint(y, lf, lp);
        const double lpy = log_sum_exp(lp);
        const double py = std::exp(lpy);
        if (lpy == kNegInf) return std::pair{0.0, 0.0};
        tq.log_joint(y, lf, lq);
        const double lqy = log_sum_exp(lq);
        if (lqy == kNegInf) return std::pair{kInf, py};
        return std::pair{py * (lpy - lqy), py};
    });
    return d < 0.0 ? 0.0 : d;
}

double mutual_information(const DiscretePrior& p, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    if (gamma == 0.0 || p.size() == 1) return 0.0;
    double s = 0.0;
    for (const auto& a : p.atoms()) s += a.w * output_kl(DiscretePrior::point(a.x), p, gamma, policy);
    return s;
}

double cond_output_entropy(const DiscretePrior& p, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    double h = 0.0;
    for (const auto& a : p.atoms()) {
        const double lam = gamma * a.x;
        if (lam == 0.0) continue;
        const double tail = sum_outputs(lam, policy, "cond_output_entropy", [&](std::int64_t k, double base) {
            const double kd = static_cast<double>(k);
            const double log_fact = k > 1 ? kd * std::log(kd) - kd - base : 0.0;
            const double pk = std::exp(log_poisson_from_base(k, lam, base));
            return std::pair{pk * log_fact, pk};
        });
        h += a.w * (lam * (1.0 - std::log(lam)) + tail);
    }
    return h;
}

double output_entropy(const DiscretePrior& p, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    if (gamma == 0.0) return 0.0;
    const AtomTable tp(p, gamma);
    std::vector<double> lp;
    return sum_outputs(gamma * p.max_location(), policy, "output_entropy", [&](std::int64_t y, double lf) {
        tp.log_joint(y, lf, lp);
        const double lpy = log_sum_exp(lp);
        if (lpy == kNegInf) return std::pair{0.0, 0.0};
        const double py = std::exp(lpy);
        return std::pair{-py * lpy, py};
    });
}

// ---------------------------------------------------------------------------
// Vector channel

namespace {

// Per-axis output range and per-atom log-likelihood tables for the product grid.
struct VectorGrid {
    std::size_t dim = 0;
    std::vector<std::int64_t> extent;  // number of y values per axis

    // Axis truncation taken from the P-marginal on that axis.
    VectorGrid(const JointPrior& p, double gamma, const SeriesPolicy& policy) : dim(p.dimension()) {
        if (dim > kMaxVectorDimension)
            throw CapabilityError("vector channel: dimension " + std::to_string(dim) + " exceeds " +
                                  std::to_string(kMaxVectorDimension));
        for (std::size_t i = 0; i < dim; ++i) extent.push_back(truncation_length(p.marginal(i), gamma, policy));
    }

    std::int64_t cells() const {
        std::int64_t c = 1;
        for (auto e : extent) c *= e;
        return c;
    }

    void decode(std::int64_t cell, std::vector<std::int64_t>& y) const {
        y.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            y[i] = cell % extent[i];
            cell /= extent[i];
        }
    }
};

// log w_a + sum_i log Poisson(y_i; gamma a_i) for every atom.
class JointTable {
public:
    JointTable(const JointPrior& p, double gamma, const VectorGrid& grid) : dim_(p.dimension()) {
        std::int64_t ymax = 0;
        for (auto e : grid.extent) ymax = std::max(ymax, e);
        for (const auto& a : p.atoms()) {
            log_w_.push_back(std::log(a.w));
            std::vector<std::vector<double>> per_axis(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                per_axis[i].resize(static_cast<std::size_t>(grid.extent[i]));
                for (std::int64_t y = 0; y < grid.extent[i]; ++y)
                    per_axis[i][static_cast<std::size_t>(y)] = log_poisson_pmf(y, gamma * a.x[i]);
            }
            lik_.push_back(std::move(per_axis));
        }
    }

    void log_joint(const std::vector<std::int64_t>& y, std::vector<double>& out) const {
        out.resize(log_w_.size());
        for (std::size_t a = 0; a < log_w_.size(); ++a) {
            double v = log_w_[a];
            for (std::size_t i = 0; i < dim_; ++i) v += lik_[a][i][static_cast<std::size_t>(y[i])];
            out[a] = v;
        }
    }

private:
    std::size_t dim_;
    std::vector<double> log_w_;
    std::vector<std::vector<std::vector<double>>> lik_;
};

void check_same_dimension(const JointPrior& p, const JointPrior& q) {
    if (p.dimension() != q.dimension()) throw DomainError("vector channel: priors differ in dimension");
}

}  // namespace

ExtReal vec_output_kl(const JointPrior& p, const JointPrior& q, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    check_same_dimension(p, q);
    const VectorGrid grid(p, gamma, policy);
    if (gamma == 0.0) return 0.0;
    const JointTable tp(p, gamma, grid), tq(q, gamma, grid);
    std::vector<std::int64_t> y;
    std::vector<double> lp, lq;
    CompensatedSum total;
    for (std::int64_t c = 0; c < grid.cells(); ++c) {
        grid.decode(c, y);
        tp.log_joint(y, lp);
        const double lpy = log_sum_exp(lp);
        if (lpy == kNegInf) continue;
        tq.log_joint(y, lq);
        const double lqy = log_sum_exp(lq);
        if (lqy == kNegInf) return kInf;
        total.add(std::exp(lpy) * (lpy - lqy));
    }
    return std::max(0.0, total.value());
}

ExtReal vec_mle(const JointPrior& p, const JointPrior& q, double gamma, const SeriesPolicy& policy) {
    check_gamma(gamma);
    check_same_dimension(p, q);
    const std::size_t n = p.dimension();
    const VectorGrid grid(p, gamma, policy);
    if (gamma == 0.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (const auto& b : q.atoms()) m += b.w * b.x[i];
            for (const auto& a : p.atoms()) s += a.w * loss(a.x[i], m);
        }
        return s;
    }
    const JointTable tp(p, gamma, grid), tq(q, gamma, grid);
    std::vector<std::vector<double>> xq(n);
    for (const auto& b : q.atoms())
        for (std::size_t i = 0; i < n; ++i) xq[i].push_back(b.x[i]);
    std::vector<std::int64_t> y;
    std::vector<double> lp, lq, log_m(n);
    CompensatedSum total;
    for (std::int64_t c = 0; c < grid.cells(); ++c) {
        grid.decode(c, y);
        tp.log_joint(y, lp);
        tq.log_joint(y, lq);
        for (std::size_t i = 0; i < n; ++i) {
            log_m[i] = log_posterior_mean(lq, xq[i]);
            if (std::isnan(log_m[i])) log_m[i] = kNegInf;
        }
        for (std::size_t a = 0; a < lp.size(); ++a) {
            const double pw = std::exp(lp[a]);
            if (pw == 0.0) continue;
            double l = 0.0;
            for (std::size_t i = 0; i < n; ++i) l += loss_from_log(p[a].x[i], log_m[i]);
            if (std::isinf(l)) return kInf;
            total.add(pw * l);
        }
    }
    return total.value();
}

PairMerge pair_merge_kl(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy) {
    const auto p2 = JointPrior::diagonal(p, 2);
    const auto q2 = JointPrior::diagonal(q, 2);
    return {vec_output_kl(p2, q2, gamma, policy), output_kl(p, q, 2.0 * gamma, policy)};
}

}  // namespace pchan
