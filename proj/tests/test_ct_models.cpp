#include <cmath>
#include <thread>

#include "doctest.h"
#include "oracles.hpp"
#include "pchan/ct_models.hpp"
#include "pchan/errors.hpp"
#include "pchan/scalar_channel.hpp"

using namespace pchan;
using doctest::Approx;

namespace {

// Zero count: the q-filter's estimate; any count: X = 1 is certain and the loss is 0.
double g_oracle(double p, double q, double gamma) {
    const double e = std::exp(-gamma);
    const double m = q * e / (1.0 - q + q * e);
    return (1.0 - p) * m + p * e * static_cast<double>(oracle::loss(1.0L, m));
}

double f_oracle(double gamma) {
    const double m = std::exp(-gamma) / (1.0 + std::exp(-gamma));
    const double hit = static_cast<double>(oracle::loss(0.5L, 1.0L));
    const double miss = static_cast<double>(oracle::loss(0.5L, m));
    return hit * (1.0 - std::exp(-gamma / 2)) + miss * std::exp(-gamma / 2);
}

// (1/gamma) * integral_0^gamma h by composite Simpson.
template <class H>
double running_mean(H h, double gamma, int n = 20000) {
    const double step = gamma / n;
    double s = h(0.0) + h(gamma);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * h(i * step);
    return s * step / 3.0 / gamma;
}

const std::vector<double> k01{0.0, 1.0};

}  // namespace

TEST_CASE("ct_mle reduces to the scalar channel") {
    const DcModel p{DiscretePrior::binary(0.0, 1.0, 0.5), 2.0}, q{DiscretePrior::binary(0.0, 1.0, 0.2), 2.0};
    CHECK(ct_mle(p, q, 1.5) == Approx(2.0 * mle(p.prior, q.prior, 3.0)).epsilon(1e-14));
    const DcModel d{DiscretePrior::point(2.0), 1.0};
    for (double g : {0.0, 1.0, 10.0}) CHECK(ct_mle(d, d, g) == Approx(0.0).epsilon(1e-14));
    const DcModel other{DiscretePrior::point(1.0), 3.0};
    CHECK_THROWS_AS(ct_mle(p, other, 1.0), DomainError);
}

TEST_CASE("ct_cmle") {
    const DcModel p{DiscretePrior::binary(0.0, 1.0, 0.5), 1.0}, q{DiscretePrior::binary(0.0, 1.0, 0.2), 1.0};
    CHECK(ct_cmle(p, q, 0.0) == Approx(mle(p.prior, q.prior, 0.0)).epsilon(1e-14));
    for (double g : {0.5, 2.0, 7.0})
        CHECK(ct_cmle(p, q, g) == Approx(running_mean([&](double a) { return g_oracle(0.5, 0.2, a); }, g)).epsilon(1e-9));
    const DcModel p2{DiscretePrior::binary(0.0, 1.0, 0.5), 2.0}, q2{DiscretePrior::binary(0.0, 1.0, 0.2), 2.0};
    // Horizon T: integral over [0, T] of mle(gamma t), i.e. T * cmle(gamma T) at unit horizon.
    CHECK(ct_cmle(p2, q2, 1.0) == Approx(2.0 * ct_cmle(p, q, 2.0)).epsilon(1e-9));
    const DcModel zero{DiscretePrior::point(0.0), 1.0};
    CHECK(ct_cmle(p, zero, 1.0) == kInf);
}

TEST_CASE("binary_dc_g") {
    CHECK(binary_dc_g(0.5, 0.2, 0.0) == Approx(0.5 * std::log(5.0) + 0.2 - 0.5).epsilon(1e-14));
    CHECK(binary_dc_g(0.5, 0.2, 0.0) == Approx(0.5047190).epsilon(1e-6));
    CHECK(binary_dc_g(0.5, 0.5, 0.0) == Approx(0.3465736).epsilon(1e-6));
    CHECK(binary_dc_g(0.3, 0.6, 60.0) < 1e-20);
    CHECK(binary_dc_g(0.5, 0.0, 1.0) == kInf);
    CHECK(binary_dc_g(0.0, 0.0, 1.0) == 0.0);
    for (double g : {0.01, 0.7, 3.0, 15.0})
        for (auto [p, q] : {std::pair{0.5, 0.2}, std::pair{0.1, 0.9}, std::pair{0.7, 0.7}}) {
            CHECK(binary_dc_g(p, q, g) == Approx(g_oracle(p, q, g)).epsilon(1e-12));
            CHECK(binary_dc_g(p, q, g) ==
                  Approx(mle(DiscretePrior::binary(0.0, 1.0, p), DiscretePrior::binary(0.0, 1.0, q), g)).epsilon(1e-11));
        }
    CHECK_THROWS_AS(binary_dc_g(1.5, 0.2, 1.0), DomainError);
}

TEST_CASE("binary_dc_cmle_closed against quadrature over (0, 20]") {
    for (auto [p, q] : {std::pair{0.5, 0.2}, std::pair{0.5, 0.5}, std::pair{0.2, 0.8}}) {
        for (double g = 0.25; g <= 20.0; g += 0.25) {
            const double ref = running_mean([&](double a) { return g_oracle(p, q, a); }, g);
            CHECK(std::abs(binary_dc_cmle_closed(p, q, g) - ref) <= 1e-6);
        }
    }
    CHECK(binary_dc_cmle_closed(0.5, 0.2, 1e-9) == Approx(0.5047190).epsilon(1e-6));
    CHECK(binary_dc_cmle_closed(0.5, 0.2, 0.0) == Approx(binary_dc_g(0.5, 0.2, 0.0)).epsilon(1e-14));
}

TEST_CASE("matched causal loss integrates to mutual information") {
    const auto P = DiscretePrior::binary(0.0, 1.0, 0.5);
    for (double g : {0.5, 2.0, 8.0})
        CHECK(g * binary_dc_cmle_closed(0.5, 0.5, g) == Approx(mutual_information(P, g)).epsilon(1e-9));
}

TEST_CASE("self-check is safe under concurrent first use") {
    std::vector<std::jthread> workers;
    std::vector<double> out(8);
    for (int i = 0; i < 8; ++i)
        workers.emplace_back([&out, i] { out[static_cast<std::size_t>(i)] = binary_dc_cmle_closed(0.37, 0.61, 3.0); });
    workers.clear();
    for (double v : out) CHECK(v == out[0]);
}

TEST_CASE("halfdc_f") {
    CHECK(halfdc_f(0.0) == Approx(0.0).epsilon(1e-15));
    CHECK(halfdc_f(80.0) == Approx(0.5 - 0.5 * std::log(2.0)).epsilon(1e-12));
    for (double g : {0.3, 1.0, 4.0, 12.0, 30.0}) {
        CHECK(halfdc_f(g) == Approx(f_oracle(g)).epsilon(1e-12));
        CHECK(halfdc_f(g) == Approx(mle(DiscretePrior::point(0.5), DiscretePrior::uniform(k01), g)).epsilon(1e-11));
    }
}

TEST_CASE("halfdc_cmle_closed against quadrature over (0, 20]") {
    for (double g = 0.25; g <= 20.0; g += 0.25)
        CHECK(std::abs(halfdc_cmle_closed(g) - running_mean(f_oracle, g)) <= 1e-6);
    CHECK(halfdc_cmle_closed(1e-9) == Approx(0.0).epsilon(1e-8));
    CHECK(halfdc_cmle_closed(0.0) == 0.0);
}

TEST_CASE("the reference closed form disagrees with quadrature") {
    // It grows linearly while the causal loss stays below l(1/2, 1).
    CHECK(halfdc_reference_form_gap(1.0) > 1e-3);
    CHECK(std::abs(halfdc_cmle_reference_form(40.0)) > 1.0);
    CHECK(halfdc_cmle_closed(40.0) < 0.5 - 0.5 * std::log(2.0) + 0.02);
}
