#include "pchan/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pchan/errors.hpp"

namespace pchan {

namespace {

constexpr double kWeightSumTol = 1e-12;

double checked_total(double total, bool normalize) {
    if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("prior: weights do not sum to a positive number");
    if (!normalize && std::abs(total - 1.0) > kWeightSumTol)
        throw DomainError("prior: weights sum to " + std::to_string(total) + ", expected 1");
    return total;
}

}  // namespace

DiscretePrior::DiscretePrior(std::vector<Atom> atoms, bool normalize, std::size_t max_atoms)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("prior: no atoms");
    if (atoms_.size() > max_atoms)
        throw CapabilityError("prior: " + std::to_string(atoms_.size()) + " atoms exceeds limit " +
                              std::to_string(max_atoms));
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.x >= 0.0) || !std::isfinite(a.x)) throw DomainError("prior: atom locations must be finite and >= 0");
        if (!(a.w > 0.0) || !std::isfinite(a.w)) throw DomainError("prior: weights must be strictly positive");
        total += a.w;
    }
    total = checked_total(total, normalize);
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (std::size_t i = 1; i < atoms_.size(); ++i)
        if (atoms_[i].x == atoms_[i - 1].x) throw DomainError("prior: duplicate atom location");
    if (normalize)
        for (auto& a : atoms_) a.w /= total;
}

DiscretePrior DiscretePrior::uniform(std::span<const double> xs) {
    std::vector<Atom> atoms;
    atoms.reserve(xs.size());
    for (double x : xs) atoms.push_back({x, 1.0 / static_cast<double>(xs.size())});
    return DiscretePrior(std::move(atoms), true);
}

DiscretePrior DiscretePrior::binary(double lo, double hi, double p_hi) {
    if (p_hi <= 0.0) return point(lo);
    if (p_hi >= 1.0) return point(hi);
    return DiscretePrior({{lo, 1.0 - p_hi}, {hi, p_hi}});
}

double DiscretePrior::min_gap() const noexcept {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < atoms_.size(); ++i) gap = std::min(gap, atoms_[i].x - atoms_[i - 1].x);
    return gap;
}

JointPrior::JointPrior(std::vector<JointAtom> atoms, bool normalize, std::size_t max_atoms)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("joint prior: no atoms");
    if (atoms_.size() > max_atoms) throw CapabilityError("joint prior: too many atoms");
    dim_ = atoms_.front().x.size();
    if (dim_ == 0) throw DomainError("joint prior: zero dimension");
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (a.x.size() != dim_) throw DomainError("joint prior: inconsistent atom dimensions");
        for (double v : a.x)
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("joint prior: components must be finite and >= 0");
        if (!(a.w > 0.0) || !std::isfinite(a.w)) throw DomainError("joint prior: weights must be strictly positive");
        total += a.w;
    }
    total = checked_total(total, normalize);
    std::sort(atoms_.begin(), atoms_.end(), [](const JointAtom& a, const JointAtom& b) { return a.x < b.x; });
    for (std::size_t i = 1; i < atoms_.size(); ++i)
        if (atoms_[i].x == atoms_[i - 1].x) throw DomainError("joint prior: duplicate atom vector");
    if (normalize)
        for (auto& a : atoms_) a.w /= total;
}

JointPrior JointPrior::diagonal(const DiscretePrior& p, std::size_t n) {
    std::vector<JointAtom> atoms;
    for (const auto& a : p.atoms()) atoms.push_back({std::vector<double>(n, a.x), a.w});
    return JointPrior(std::move(atoms), true);
}

DiscretePrior JointPrior::marginal(std::size_t i) const {
    if (i >= dim_) throw DomainError("joint prior: marginal index out of range");
    std::vector<Atom> merged;
    for (const auto& a : atoms_) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Atom& m) { return m.x == a.x[i]; });
        if (it == merged.end())
            merged.push_back({a.x[i], a.w});
        else
            it->w += a.w;
    }
    return DiscretePrior(std::move(merged), true, std::max(merged.size(), DiscretePrior::kDefaultMaxAtoms));
}

double JointPrior::max_location() const noexcept {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, *std::max_element(a.x.begin(), a.x.end()));
    return m;
}

bool JointPrior::strictly_positive() const noexcept {
    for (const auto& a : atoms_)
        for (double v : a.x)
            if (v <= 0.0) return false;
    return true;
}

Moments moments(const DiscretePrior& p) {
    Moments m{0.0, 0.0};
    for (const auto& a : p.atoms()) {
        m.mean += a.w * a.x;
        m.mean_xlogx += a.w * xlogx(a.x);
    }
    return m;
}

ExtReal kl_divergence(const DiscretePrior& p, const DiscretePrior& q) {
    double d = 0.0;
    auto qa = q.atoms();
    std::size_t j = 0;
    for (const auto& a : p.atoms()) {
        while (j < qa.size() && qa[j].x < a.x) ++j;
        if (j == qa.size() || qa[j].x != a.x) return kInf;
        d += a.w * std::log(a.w / qa[j].w);
    }
    return d < 0.0 ? 0.0 : d;
}

double entropy(const DiscretePrior& p) {
    // Summed in weight order so the value depends only on the multiset of weights.
    std::vector<double> ws;
    ws.reserve(p.size());
    for (const auto& a : p.atoms()) ws.push_back(a.w);
    std::sort(ws.begin(), ws.end());
    double h = 0.0;
    for (double w : ws) h -= w * std::log(w);
    return h;
}

DiscretePrior transform(const DiscretePrior& p, const std::function<double(double)>& g) {
    std::vector<Atom> out;
    out.reserve(p.size());
    for (const auto& a : p.atoms()) {
        const double y = g(a.x);
        if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("transform: image must be finite and >= 0");
        out.push_back({y, a.w});
    }
    std::vector<double> xs;
    for (const auto& a : out) xs.push_back(a.x);
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
        throw DomainError("transform: map is not one-to-one on the support");
    // Weights already sum to 1; avoid renormalizing so entropy is preserved bit-for-bit.
    return DiscretePrior(std::move(out), false, std::max(p.size(), DiscretePrior::kDefaultMaxAtoms));
}

}  // namespace pchan
