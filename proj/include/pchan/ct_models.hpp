#pragma once

#include "pchan/loss.hpp"
#include "pchan/priors.hpp"
#include "pchan/scalar_channel.hpp"

// Continuous-time losses for constant-in-time ("DC") signals X_t = X on [0, T].
// The total count N(T) ~ Poisson(gamma T X) is sufficient for the whole path,
// so every quantity reduces to the scalar channel.
namespace pchan {

struct DcModel {
    DiscretePrior prior;
    double horizon = 1.0;
};

/// Non-causal mismatched loss: T * mle(P, Q, gamma T).
ExtReal ct_mle(const DcModel& p, const DcModel& q, double gamma, const SeriesPolicy& policy = {});

/// Causal mismatched loss: integral over t in [0, T] of mle(P, Q, gamma t).
ExtReal ct_cmle(const DcModel& p, const DcModel& q, double gamma, double tol = 1e-11,
                const SeriesPolicy& policy = {});

// Binary DC signal: X in {0, 1} with P(X = 1) = p, filter believes q.

/// Expected loss at SNR gamma of the q-filter for the p-signal (zero-count posterior
/// p e^{-g} / (1 - p + p e^{-g}), one otherwise).
ExtReal binary_dc_g(double p, double q, double gamma);

/// Closed form of the integral of binary_dc_g(p, q, gamma t) over t in [0, 1].
/// The first call for each (p, q) compares it with quadrature and throws
/// TranscriptionError on a gap above 1e-8.
double binary_dc_cmle_closed(double p, double q, double gamma);

// Deterministic signal X = 1/2 observed by a filter that believes X in {0, 1}
// with equal probability.

/// l(1/2, 1)(1 - e^{-g/2}) + l(1/2, e^{-g}/(1 + e^{-g})) e^{-g/2}.
double halfdc_f(double gamma);

/// Causal loss (1/gamma) * integral_0^gamma halfdc_f, in the closed form
///   l(1/2, 1) + (log 2 - e^{-g/2} log(1 + e^g)) / g.
/// Checked once against quadrature to 1e-6; throws TranscriptionError otherwise.
double halfdc_cmle_closed(double gamma);

/// An alternative Gudermannian/dilogarithm expression for the same loss,
/// evaluated literally. It does not agree with halfdc_cmle_closed (it grows
/// linearly in gamma); kept so the discrepancy stays reproducible.
double halfdc_cmle_reference_form(double gamma);

/// |reference form - quadrature| at gamma.
double halfdc_reference_form_gap(double gamma);

}  // namespace pchan
