#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pchan/loss.hpp"

namespace pchan {

struct Atom {
    double x;
    double w;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite atomic law on [0, inf). Atoms are kept sorted by location and are
/// pairwise distinct; weights are strictly positive and sum to one.
class DiscretePrior {
public:
    static constexpr std::size_t kDefaultMaxAtoms = 64;

    /// Builds and validates. Weights must already sum to 1 within 1e-12 unless
    /// `normalize` is set, in which case they are rescaled.
    explicit DiscretePrior(std::vector<Atom> atoms, bool normalize = false,
                           std::size_t max_atoms = kDefaultMaxAtoms);

    static DiscretePrior point(double x) { return DiscretePrior({{x, 1.0}}); }
    static DiscretePrior uniform(std::span<const double> xs);
    /// Two atoms {lo, hi} with P(hi) = p_hi.
    static DiscretePrior binary(double lo, double hi, double p_hi);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }
    double min_location() const noexcept { return atoms_.front().x; }
    double max_location() const noexcept { return atoms_.back().x; }
    /// Whether every atom lies in (0, inf), i.e. support inside some [a, b] with a > 0.
    bool strictly_positive() const noexcept { return atoms_.front().x > 0.0; }
    /// Smallest gap between consecutive atom locations (inf for a point mass).
    double min_gap() const noexcept;

    friend bool operator==(const DiscretePrior&, const DiscretePrior&) = default;

private:
    std::vector<Atom> atoms_;
};

struct JointAtom {
    std::vector<double> x;
    double w;
    friend bool operator==(const JointAtom&, const JointAtom&) = default;
};

/// Finite atomic law on [0, inf)^n.
class JointPrior {
public:
    explicit JointPrior(std::vector<JointAtom> atoms, bool normalize = false,
                        std::size_t max_atoms = DiscretePrior::kDefaultMaxAtoms);

    /// Embeds a scalar prior on the diagonal {(x, ..., x)} of dimension n.
    static JointPrior diagonal(const DiscretePrior& p, std::size_t n);
    static JointPrior from_scalar(const DiscretePrior& p) { return diagonal(p, 1); }

    std::size_t dimension() const noexcept { return dim_; }
    std::span<const JointAtom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    const JointAtom& operator[](std::size_t i) const { return atoms_[i]; }
    /// Law of coordinate i.
    DiscretePrior marginal(std::size_t i) const;
    double max_location() const noexcept;
    bool strictly_positive() const noexcept;

    friend bool operator==(const JointPrior&, const JointPrior&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<JointAtom> atoms_;
};

struct Moments {
    double mean;
    double mean_xlogx;
};

Moments moments(const DiscretePrior& p);

/// D(P||Q) in nats, matching atoms by exact location. +inf unless P << Q.
ExtReal kl_divergence(const DiscretePrior& p, const DiscretePrior& q);

/// Shannon entropy of the weights, in nats.
double entropy(const DiscretePrior& p);

/// Relocates every atom through g, keeping weights. Throws DomainError if g
/// maps two atoms to the same place or produces a negative location.
DiscretePrior transform(const DiscretePrior& p, const std::function<double(double)>& g);

}  // namespace pchan
