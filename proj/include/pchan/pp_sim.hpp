#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pchan/loss.hpp"
#include "pchan/priors.hpp"

// Monte Carlo for doubly stochastic Poisson observations of piecewise-constant
// signals, with exact Bayes filters over finite atomic beliefs.
namespace pchan {

/// X_t = A_i on [t_{i-1}, t_i), with A ~ prior over R_+^n.
class PiecewiseSignalModel {
public:
    PiecewiseSignalModel(std::vector<double> breakpoints, JointPrior prior);

    /// Constant signal on [0, horizon] with amplitude law p.
    static PiecewiseSignalModel dc(const DiscretePrior& p, double horizon = 1.0);

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const JointPrior& prior() const noexcept { return prior_; }
    std::size_t intervals() const noexcept { return breakpoints_.size() - 1; }
    double horizon() const noexcept { return breakpoints_.back(); }
    /// Index of the interval containing t; t = T maps to the last interval.
    std::size_t interval_at(double t) const;
    double length(std::size_t i) const { return breakpoints_[i + 1] - breakpoints_[i]; }

private:
    std::vector<double> breakpoints_;
    JointPrior prior_;
};

/// Arrival times of a simple point process on (0, T], strictly increasing.
struct PointProcessPath {
    std::vector<double> events;
    double horizon = 1.0;

    /// Number of events in (lo, hi].
    std::size_t count(double lo, double hi) const;
};

struct SampledPath {
    std::size_t atom = 0;  ///< index into model.prior().atoms()
    PointProcessPath path;
};

/// Draws a signal atom and, interval by interval, a Poisson count that is
/// scattered uniformly. Replicate r of a given seed is the same stream no
/// matter how replicates are scheduled.
SampledPath sample_path(const PiecewiseSignalModel& model, double gamma, std::uint64_t seed,
                        std::uint64_t replicate = 0);

enum class FilterMode { causal, noncausal, anticausal };

/// E[X_t | observations] under `belief` (same interval layout as `model`).
/// causal conditions on (0, t], noncausal on (0, T], anticausal on the
/// increments over (t, T]. Only per-interval counts in the window enter.
double posterior_mean_at(const PiecewiseSignalModel& model, const PointProcessPath& path, double gamma, double t,
                         FilterMode mode, const JointPrior& belief);

enum class Target { cmle, mle, acmle };

FilterMode filter_mode(Target target);
Target parse_target(std::string_view name);
std::string_view to_string(Target target);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    /// Replicates whose time-integrated loss was +inf; any such makes value +inf.
    std::int64_t infinite_replicates = 0;
};

struct McOptions {
    unsigned threads = 1;
};

/// Average over replicates of the time-integrated loss l(X_t, filter mean)
/// on [0, T]. Each path's integral is split at breakpoints and event times and
/// each piece uses 8-point Gauss-Legendre.
McEstimate mc_estimate(const PiecewiseSignalModel& true_model, const JointPrior& belief, double gamma,
                       Target target, std::int64_t replicates, std::uint64_t seed, const McOptions& options = {});

/// Time-integrated loss of one sampled path.
ExtReal path_loss(const PiecewiseSignalModel& true_model, const SampledPath& sample, const JointPrior& belief,
                  double gamma, Target target);

/// Merges every `factor` consecutive intervals; each merged value is the
/// duration-weighted mean. Atoms that coincide after merging pool their weight.
PiecewiseSignalModel coarsen(const PiecewiseSignalModel& model, std::size_t factor);

}  // namespace pchan
