#pragma once

#include <cstdint>

#include "pchan/loss.hpp"
#include "pchan/priors.hpp"

// Exact series engine for the channel Y | X ~ Poisson(gamma * X) with a finite
// atomic input law, plus the small-n vector channel built from independent
// coordinates.
namespace pchan {

/// Truncation rule for sums over the output alphabet y = 0, 1, 2, ...
/// Summation runs to the first y at which the governing output law has
/// accumulated 1 - tail_epsilon of its mass and y >= gamma*x_max + 10*sqrt(gamma*x_max),
/// then safety_terms further terms.
struct SeriesPolicy {
    double tail_epsilon = 1e-12;
    std::int64_t max_terms = 1'000'000;
    std::int64_t safety_terms = 20;

    void validate() const;
};

/// log P(Poisson(lambda) = y), with Poisson(0) = delta_0.
double log_poisson_pmf(std::int64_t y, double lambda);

/// Number of output values summed for a law with largest atom x_max. Exposed
/// so that tests can confirm truncation covers the stated tail.
std::int64_t truncation_length(const DiscretePrior& governing, double gamma, const SeriesPolicy& policy = {});

/// P(Y = y).
double output_pmf(const DiscretePrior& p, double gamma, std::int64_t y);

/// E_P[X | Y = y]. Throws DomainError when P(Y = y) = 0.
double posterior_mean(const DiscretePrior& p, double gamma, std::int64_t y);

/// Mean loss of the estimator E_Q[X | Y] when X ~ P.
ExtReal mle(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy = {});

/// Minimum mean loss E[l(X, E[X|Y])]. Evaluated both as mle(p, p) and as
/// E[X log X] - E[E[X|Y] log E[X|Y]]; throws ConsistencyError if they disagree.
ExtReal mmle(const DiscretePrior& p, double gamma, const SeriesPolicy& policy = {});

/// D(P_Y || Q_Y).
ExtReal output_kl(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy = {});

/// I(X; Y) as the average of D(P_{Y|X=x} || P_Y).
double mutual_information(const DiscretePrior& p, double gamma, const SeriesPolicy& policy = {});

/// H(Y | X), through the closed expression for the entropy of a Poisson law.
double cond_output_entropy(const DiscretePrior& p, double gamma, const SeriesPolicy& policy = {});

/// H(Y) from the output pmf.
double output_entropy(const DiscretePrior& p, double gamma, const SeriesPolicy& policy = {});

inline constexpr std::size_t kMaxVectorDimension = 3;

/// D(P_{Y^n} || Q_{Y^n}) by enumerating the product output grid. n <= 3.
ExtReal vec_output_kl(const JointPrior& p, const JointPrior& q, double gamma, const SeriesPolicy& policy = {});

/// E_P[sum_i l(X_i, E_Q[X_i | Y^n])]. n <= 3.
ExtReal vec_mle(const JointPrior& p, const JointPrior& q, double gamma, const SeriesPolicy& policy = {});

struct PairMerge {
    ExtReal pair_kl;  ///< KL between laws of two conditionally independent draws (Y1, Y2)
    ExtReal sum_kl;   ///< KL between laws of Y1 + Y2, i.e. the channel at 2*gamma
};

PairMerge pair_merge_kl(const DiscretePrior& p, const DiscretePrior& q, double gamma, const SeriesPolicy& policy = {});

}  // namespace pchan
