#include "pchan/pp_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <thread>

#include "pchan/errors.hpp"

namespace pchan {

PiecewiseSignalModel::PiecewiseSignalModel(std::vector<double> breakpoints, JointPrior prior)
    : breakpoints_(std::move(breakpoints)), prior_(std::move(prior)) {
    if (breakpoints_.size() < 2) throw DomainError("signal model: need at least two breakpoints");
    if (breakpoints_.front() != 0.0) throw DomainError("signal model: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i]))
            throw DomainError("signal model: breakpoints must be strictly increasing");
    if (prior_.dimension() != intervals())
        throw DomainError("signal model: prior dimension " + std::to_string(prior_.dimension()) + " != " +
                          std::to_string(intervals()) + " intervals");
}

PiecewiseSignalModel PiecewiseSignalModel::dc(const DiscretePrior& p, double horizon) {
    return PiecewiseSignalModel({0.0, horizon}, JointPrior::from_scalar(p));
}

std::size_t PiecewiseSignalModel::interval_at(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
    if (idx == 0) return 0;
    return std::min(idx - 1, intervals() - 1);
}

std::size_t PointProcessPath::count(double lo, double hi) const {
    if (!(hi > lo)) return 0;
    auto a = std::upper_bound(events.begin(), events.end(), lo);
    auto b = std::upper_bound(events.begin(), events.end(), hi);
    return static_cast<std::size_t>(std::distance(a, b));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(replicate + 0x632BE59BD9B4E019ULL)));
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and >= 0");
}

}  // namespace

SampledPath sample_path(const PiecewiseSignalModel& model, double gamma, std::uint64_t seed, std::uint64_t replicate) {
    check_gamma(gamma);
    auto rng = replicate_stream(seed, replicate);
    const auto atoms = model.prior().atoms();
    std::vector<double> ws;
    for (const auto& a : atoms) ws.push_back(a.w);
    std::discrete_distribution<std::size_t> pick(ws.begin(), ws.end());

    SampledPath out;
    out.atom = atoms.size() == 1 ? 0 : pick(rng);
    out.path.horizon = model.horizon();
    const auto& value = atoms[out.atom].x;
    const auto& bp = model.breakpoints();
    for (std::size_t i = 0; i < model.intervals(); ++i) {
        const double mean = gamma * value[i] * model.length(i);
        if (mean <= 0.0) continue;
        std::poisson_distribution<long long> count(mean);
        std::uniform_real_distribution<double> where(bp[i], bp[i + 1]);
        const long long n = count(rng);
        for (long long k = 0; k < n; ++k) {
            double t = where(rng);
            // Events live in (0, T]; the uniform draw is on [a, b).
            if (t <= 0.0) t = std::nextafter(0.0, 1.0);
            out.path.events.push_back(t);
        }
    }
    std::sort(out.path.events.begin(), out.path.events.end());
    return out;
}

namespace {

// Observation window (lo, hi] for each mode.
std::pair<double, double> window(FilterMode mode, double t, double T) {
    switch (mode) {
        case FilterMode::causal:
            return {0.0, t};
        case FilterMode::noncausal:
            return {0.0, T};
        case FilterMode::anticausal:
            return {t, T};
    }
    return {0.0, T};
}

// NaN when the observations exclude every belief atom.
double posterior_mean_or_nan(const PiecewiseSignalModel& model, const PointProcessPath& path, double gamma, double t,
                             FilterMode mode, const JointPrior& belief) {
    const double T = model.horizon();
    if (!(t >= 0.0 && t <= T)) throw DomainError("posterior_mean_at: t outside [0, T]");
    if (belief.dimension() != model.intervals()) throw DomainError("posterior_mean_at: belief dimension mismatch");

    const auto [lo, hi] = window(mode, t, T);
    const auto& bp = model.breakpoints();
    const std::size_t n = model.intervals();
    // Per-interval exposure and count inside the window.
    std::array<double, 16> small_dt{}, small_cnt{};
    std::vector<double> big_dt, big_cnt;
    std::span<double> dt, cnt;
    if (n <= small_dt.size()) {
        dt = std::span<double>(small_dt.data(), n);
        cnt = std::span<double>(small_cnt.data(), n);
    } else {
        big_dt.resize(n);
        big_cnt.resize(n);
        dt = big_dt;
        cnt = big_cnt;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::max(lo, bp[i]), b = std::min(hi, bp[i + 1]);
        dt[i] = b > a ? b - a : 0.0;
        cnt[i] = b > a ? static_cast<double>(path.count(a, b)) : 0.0;
    }

    const std::size_t active = model.interval_at(t);
    double max_lw = -std::numeric_limits<double>::infinity();
    std::vector<double> lw(belief.size());
    for (std::size_t k = 0; k < belief.size(); ++k) {
        const auto& a = belief[k];
        double v = std::log(a.w);
        for (std::size_t i = 0; i < n; ++i) {
            if (dt[i] == 0.0) continue;
            if (a.x[i] == 0.0) {
                if (cnt[i] > 0.0) {
                    v = -std::numeric_limits<double>::infinity();
                    break;
                }
                continue;
            }
            v += cnt[i] * std::log(a.x[i]) - gamma * a.x[i] * dt[i];
        }
        lw[k] = v;
        max_lw = std::max(max_lw, v);
    }
    if (max_lw == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::quiet_NaN();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < belief.size(); ++k) {
        const double e = std::exp(lw[k] - max_lw);
        den += e;
        num += e * belief[k].x[active];
    }
    return num / den;
}

}  // namespace

double posterior_mean_at(const PiecewiseSignalModel& model, const PointProcessPath& path, double gamma, double t,
                         FilterMode mode, const JointPrior& belief) {
    check_gamma(gamma);
    const double m = posterior_mean_or_nan(model, path, gamma, t, mode, belief);
    if (std::isnan(m)) throw DomainError("posterior_mean_at: the observations have probability zero under the belief");
    return m;
}

FilterMode filter_mode(Target target) {
    switch (target) {
        case Target::cmle:
            return FilterMode::causal;
        case Target::mle:
            return FilterMode::noncausal;
        case Target::acmle:
            return FilterMode::anticausal;
    }
    return FilterMode::causal;
}

Target parse_target(std::string_view name) {
    if (name == "cmle") return Target::cmle;
    if (name == "mle") return Target::mle;
    if (name == "acmle") return Target::acmle;
    throw DomainError("unknown target '" + std::string(name) + "' (expected cmle, mle or acmle)");
}

std::string_view to_string(Target target) {
    switch (target) {
        case Target::cmle:
            return "cmle";
        case Target::mle:
            return "mle";
        case Target::acmle:
            return "acmle";
    }
    return "?";
}

namespace {

constexpr std::array<double, 4> kGlX = {0.183434642495649804939476142360184, 0.525532409916328985817739049189246,
                                        0.796666477413626739591553936475830, 0.960289856497536231683560868569473};
constexpr std::array<double, 4> kGlW = {0.362683783378361982965150449277195, 0.313706645877887287337962201986601,
                                        0.222381034453374470544355994426241, 0.101228536290376259152531354309963};

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

}  // namespace

ExtReal path_loss(const PiecewiseSignalModel& true_model, const SampledPath& sample, const JointPrior& belief,
                  double gamma, Target target) {
    const auto mode = filter_mode(target);
    const auto& truth = true_model.prior()[sample.atom].x;
    std::vector<double> knots = true_model.breakpoints();
    knots.insert(knots.end(), sample.path.events.begin(), sample.path.events.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    double total = 0.0;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double a = knots[s], b = knots[s + 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double seg = 0.0;
        for (std::size_t j = 0; j < kGlX.size(); ++j) {
            for (double sign : {-1.0, 1.0}) {
                const double t = c + sign * h * kGlX[j];
                double m = posterior_mean_or_nan(true_model, sample.path, gamma, t, mode, belief);
                // As in the scalar engine: a belief that rules the data out estimates 0.
                if (std::isnan(m)) m = 0.0;
                const double l = loss(truth[true_model.interval_at(t)], m);
                if (std::isinf(l)) return kInf;
                seg += kGlW[j] * l;
            }
        }
        total += seg * h;
    }
    return total;
}

McEstimate mc_estimate(const PiecewiseSignalModel& true_model, const JointPrior& belief, double gamma, Target target,
                       std::int64_t replicates, std::uint64_t seed, const McOptions& options) {
    check_gamma(gamma);
    if (replicates < 1) throw DomainError("mc_estimate: replicates must be >= 1");
    if (belief.dimension() != true_model.intervals()) throw DomainError("mc_estimate: belief dimension mismatch");

    std::vector<double> losses(static_cast<std::size_t>(replicates));
    auto work = [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            const auto sample = sample_path(true_model, gamma, seed, static_cast<std::uint64_t>(r));
            losses[static_cast<std::size_t>(r)] = path_loss(true_model, sample, belief, gamma, target);
        }
    };
    const auto threads = static_cast<std::int64_t>(std::max(1u, options.threads));
    if (threads == 1) {
        work(0, replicates);
    } else {
        std::vector<std::jthread> pool;
        const std::int64_t chunk = (replicates + threads - 1) / threads;
        for (std::int64_t b = 0; b < replicates; b += chunk) pool.emplace_back(work, b, std::min(replicates, b + chunk));
    }

    McEstimate est;
    est.replicates = replicates;
    est.seed = seed;
    est.infinite_replicates = std::count_if(losses.begin(), losses.end(), [](double v) { return std::isinf(v); });
    if (est.infinite_replicates > 0) {
        est.value = kInf;
        est.std_error = kInf;
        return est;
    }
    const double n = static_cast<double>(replicates);
    est.value = pairwise_sum(losses) / n;
    if (replicates > 1) {
        std::vector<double> sq(losses.size());
        for (std::size_t i = 0; i < losses.size(); ++i) sq[i] = (losses[i] - est.value) * (losses[i] - est.value);
        est.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    return est;
}

PiecewiseSignalModel coarsen(const PiecewiseSignalModel& model, std::size_t factor) {
    const std::size_t n = model.intervals();
    if (factor == 0 || n % factor != 0) throw DomainError("coarsen: factor must divide the number of intervals");
    if (factor == 1) return model;
    const std::size_t m = n / factor;
    std::vector<double> bps;
    for (std::size_t j = 0; j <= m; ++j) bps.push_back(model.breakpoints()[j * factor]);
    std::vector<JointAtom> atoms;
    for (const auto& a : model.prior().atoms()) {
        std::vector<double> v(m);
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = j * factor; i < (j + 1) * factor; ++i) s += a.x[i] * model.length(i);
            v[j] = s / (bps[j + 1] - bps[j]);
        }
        auto it = std::find_if(atoms.begin(), atoms.end(), [&](const JointAtom& b) { return b.x == v; });
        if (it == atoms.end())
            atoms.push_back({std::move(v), a.w});
        else
            it->w += a.w;
    }
    return PiecewiseSignalModel(std::move(bps), JointPrior(std::move(atoms), true));
}

}  // namespace pchan
