#include <cmath>

#include "doctest.h"
#include "pchan/ct_models.hpp"
#include "pchan/errors.hpp"
#include "pchan/pp_sim.hpp"
#include "pchan/scalar_channel.hpp"

using namespace pchan;
using doctest::Approx;

namespace {

const std::vector<double> k01{0.0, 1.0};
const std::vector<double> k12{1.0, 2.0};

PiecewiseSignalModel swap_model() {
    return PiecewiseSignalModel({0.0, 0.5, 1.0}, JointPrior({{{1.0, 2.0}, 0.5}, {{2.0, 1.0}, 0.5}}));
}
JointPrior swap_belief() { return JointPrior({{{1.0, 1.0}, 0.5}, {{2.0, 2.0}, 0.5}}); }

bool within(const McEstimate& e, double ref, double sigmas = 3.0) {
    return std::abs(e.value - ref) <= sigmas * e.std_error;
}

}  // namespace

TEST_CASE("model construction") {
    CHECK_THROWS_AS(PiecewiseSignalModel({0.0}, JointPrior::from_scalar(DiscretePrior::point(1.0))), DomainError);
    CHECK_THROWS_AS(PiecewiseSignalModel({0.5, 1.0}, JointPrior::from_scalar(DiscretePrior::point(1.0))), DomainError);
    CHECK_THROWS_AS(PiecewiseSignalModel({0.0, 1.0, 1.0}, JointPrior::diagonal(DiscretePrior::point(1.0), 2)),
                    DomainError);
    CHECK_THROWS_AS(PiecewiseSignalModel({0.0, 1.0}, JointPrior::diagonal(DiscretePrior::point(1.0), 2)),
                    DomainError);
    const auto m = swap_model();
    CHECK(m.intervals() == 2);
    CHECK(m.horizon() == 1.0);
    CHECK(m.interval_at(0.0) == 0);
    CHECK(m.interval_at(0.5) == 1);
    CHECK(m.interval_at(1.0) == 1);
    CHECK(m.length(0) == 0.5);
}

TEST_CASE("path counting") {
    const PointProcessPath p{{0.1, 0.4, 0.4000001, 0.9}, 1.0};
    CHECK(p.count(0.0, 1.0) == 4);
    CHECK(p.count(0.1, 0.4) == 1);
    CHECK(p.count(0.0, 0.1) == 1);
    CHECK(p.count(0.9, 1.0) == 0);
}

TEST_CASE("sampling") {
    const auto m = PiecewiseSignalModel::dc(DiscretePrior::uniform(k12), 2.0);
    for (std::uint64_t r = 0; r < 50; ++r) CHECK(sample_path(m, 0.0, 3, r).path.events.empty());
    const auto a = sample_path(m, 5.0, 9, 17), b = sample_path(m, 5.0, 9, 17);
    CHECK(a.atom == b.atom);
    CHECK(a.path.events == b.path.events);
    CHECK(std::is_sorted(a.path.events.begin(), a.path.events.end()));
    for (double t : a.path.events) CHECK((t > 0.0 && t <= 2.0));
    // Mean count gamma * E[X] * T = 5 * 1.5 * 2.
    double total = 0.0;
    const int n = 4000;
    for (int r = 0; r < n; ++r) total += static_cast<double>(sample_path(m, 5.0, 1, static_cast<std::uint64_t>(r)).path.events.size());
    CHECK(total / n == Approx(15.0).epsilon(0.02));
}

TEST_CASE("binary DC causal filter") {
    const double p = 0.3, g = 2.0;
    const auto P = DiscretePrior::binary(0.0, 1.0, p);
    const auto m = PiecewiseSignalModel::dc(P, 1.0);
    const auto belief = JointPrior::from_scalar(P);
    const PointProcessPath empty{{}, 1.0}, hit{{0.6}, 1.0};
    for (double t : {0.0, 0.25, 0.8}) {
        const double e = std::exp(-g * t);
        CHECK(posterior_mean_at(m, empty, g, t, FilterMode::causal, belief) == Approx(p * e / (1 - p + p * e)));
    }
    CHECK(posterior_mean_at(m, hit, g, 0.7, FilterMode::causal, belief) == 1.0);
    CHECK(posterior_mean_at(m, hit, g, 0.5, FilterMode::causal, belief) < 1.0);
    CHECK_THROWS_AS(posterior_mean_at(m, hit, g, 1.5, FilterMode::causal, belief), DomainError);
    CHECK_THROWS_AS(posterior_mean_at(m, hit, g, 0.5, FilterMode::causal, swap_belief()), DomainError);
    const auto zero = JointPrior::from_scalar(DiscretePrior::point(0.0));
    CHECK_THROWS_AS(posterior_mean_at(m, hit, g, 0.9, FilterMode::causal, zero), DomainError);
}

TEST_CASE("non-causal DC filter depends only on the total count") {
    const auto P = DiscretePrior::uniform(k12);
    const auto m = PiecewiseSignalModel::dc(P, 2.0);
    const auto b = JointPrior::from_scalar(P);
    const PointProcessPath x{{0.1, 0.2, 1.9}, 2.0}, y{{1.0, 1.5, 1.7}, 2.0};
    for (double t : {0.0, 0.3, 1.99}) {
        const double a = posterior_mean_at(m, x, 0.8, t, FilterMode::noncausal, b);
        CHECK(a == posterior_mean_at(m, y, 0.8, t, FilterMode::noncausal, b));
        CHECK(a == Approx(posterior_mean(P, 1.6, 3)).epsilon(1e-13));
    }
}

TEST_CASE("filter consistency at the window edges") {
    const auto m = swap_model();
    const auto b = swap_belief();
    const PointProcessPath path{{0.05, 0.3, 0.55, 0.7, 0.99}, 1.0};
    for (double t : {0.5, 0.75, 1.0})
        CHECK(posterior_mean_at(m, path, 2.0, 1.0, FilterMode::causal, b) ==
              Approx(posterior_mean_at(m, path, 2.0, t, FilterMode::noncausal, b)).epsilon(1e-14));
    CHECK(posterior_mean_at(m, path, 2.0, 0.0, FilterMode::anticausal, b) ==
          Approx(posterior_mean_at(m, path, 2.0, 0.0, FilterMode::noncausal, b)).epsilon(1e-14));
    const auto dc = PiecewiseSignalModel::dc(DiscretePrior::uniform(k12), 1.0);
    const auto db = JointPrior::from_scalar(DiscretePrior::uniform(k12));
    for (double t : {0.0, 0.4, 1.0})
        CHECK(posterior_mean_at(dc, path, 1.0, 1.0, FilterMode::causal, db) ==
              Approx(posterior_mean_at(dc, path, 1.0, t, FilterMode::noncausal, db)).epsilon(1e-14));
}

TEST_CASE("targets") {
    CHECK(parse_target("cmle") == Target::cmle);
    CHECK(parse_target("acmle") == Target::acmle);
    CHECK(to_string(Target::mle) == "mle");
    CHECK(filter_mode(Target::acmle) == FilterMode::anticausal);
    CHECK_THROWS_AS(parse_target("mmse"), DomainError);
}

TEST_CASE("path loss integrates exactly between knots") {
    // Matched binary DC, no events: loss is (1-p)... evaluated analytically for X = 0.
    const double p = 0.5, g = 2.0;
    const auto P = DiscretePrior::binary(0.0, 1.0, p);
    const auto m = PiecewiseSignalModel::dc(P, 1.0);
    const SampledPath s{0, {{}, 1.0}};
    // integral_0^1 p e^{-gt} / (1 - p + p e^{-gt}) dt = (1/g) log((1 - p + p) / (1 - p + p e^{-g}))
    const double ref = std::log(1.0 / (1.0 - p + p * std::exp(-g))) / g;
    CHECK(path_loss(m, s, JointPrior::from_scalar(P), g, Target::cmle) == Approx(ref).epsilon(1e-10));
    const SampledPath hit{1, {{0.5}, 1.0}};
    CHECK(path_loss(m, hit, JointPrior::from_scalar(DiscretePrior::point(0.0)), g, Target::cmle) == kInf);
}

TEST_CASE("mc_estimate determinism and threading") {
    const auto m = PiecewiseSignalModel::dc(DiscretePrior::binary(0.0, 1.0, 0.5), 1.0);
    const auto b = JointPrior::from_scalar(DiscretePrior::binary(0.0, 1.0, 0.2));
    const auto a = mc_estimate(m, b, 2.0, Target::cmle, 3000, 42);
    McOptions four;
    four.threads = 4;
    const auto c = mc_estimate(m, b, 2.0, Target::cmle, 3000, 42, four);
    CHECK(a.value == c.value);
    CHECK(a.std_error == c.std_error);
    CHECK(a.replicates == 3000);
    CHECK(a.seed == 42);
    CHECK(mc_estimate(m, b, 2.0, Target::cmle, 3000, 43).value != a.value);
    CHECK(mc_estimate(m, b, 2.0, Target::cmle, 1, 42).std_error == 0.0);
    CHECK_THROWS_AS(mc_estimate(m, b, 2.0, Target::cmle, 0, 42), DomainError);
    const auto inf = mc_estimate(m, JointPrior::from_scalar(DiscretePrior::point(0.0)), 2.0, Target::cmle, 200, 1);
    CHECK(inf.value == kInf);
    CHECK(inf.infinite_replicates > 0);
}

TEST_CASE("Monte Carlo matches the closed forms") {
    const auto P = DiscretePrior::binary(0.0, 1.0, 0.5), Q = DiscretePrior::binary(0.0, 1.0, 0.2);
    const auto bin = PiecewiseSignalModel::dc(P, 1.0);
    const auto binq = JointPrior::from_scalar(Q);
    const auto half = PiecewiseSignalModel::dc(DiscretePrior::point(0.5), 1.0);
    const auto fair = JointPrior::from_scalar(DiscretePrior::uniform(k01));
    std::uint64_t seed = 100;
    for (double g : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(within(mc_estimate(bin, binq, g, Target::cmle, 20000, ++seed), binary_dc_cmle_closed(0.5, 0.2, g)));
        CHECK(within(mc_estimate(bin, binq, g, Target::mle, 20000, ++seed), binary_dc_g(0.5, 0.2, g)));
        CHECK(within(mc_estimate(half, fair, g, Target::cmle, 20000, ++seed), halfdc_cmle_closed(g)));
        CHECK(within(mc_estimate(half, fair, g, Target::mle, 20000, ++seed), halfdc_f(g)));
    }
}

TEST_CASE("matched causal loss is mutual information over gamma") {
    const auto P = DiscretePrior::uniform(k12);
    const auto m = PiecewiseSignalModel::dc(P, 1.0);
    const auto e = mc_estimate(m, JointPrior::from_scalar(P), 1.0, Target::cmle, 20000, 7);
    CHECK(within(e, mutual_information(P, 1.0)));
}

TEST_CASE("matched filter is no worse than a mismatched one") {
    const auto m = swap_model();
    std::uint64_t seed = 500;
    for (double g : {0.5, 2.0}) {
        for (auto target : {Target::cmle, Target::mle}) {
            const auto matched = mc_estimate(m, m.prior(), g, target, 10000, ++seed);
            const auto mism = mc_estimate(m, swap_belief(), g, target, 10000, ++seed);
            CHECK(matched.value <= mism.value + 3.0 * std::hypot(matched.std_error, mism.std_error));
        }
    }
}

TEST_CASE("time reversal on the swap model") {
    const auto m = swap_model();
    const auto c = mc_estimate(m, swap_belief(), 2.0, Target::cmle, 20000, 1);
    const auto a = mc_estimate(m, swap_belief(), 2.0, Target::acmle, 20000, 2);
    CHECK(std::abs(c.value - a.value) <= 3.0 * std::hypot(c.std_error, a.std_error));
}

TEST_CASE("coarsen") {
    const auto m = swap_model();
    CHECK(coarsen(m, 1).prior() == m.prior());
    const auto c = coarsen(m, 2);
    REQUIRE(c.intervals() == 1);
    REQUIRE(c.prior().size() == 1);
    CHECK(c.prior()[0].x[0] == 1.5);
    CHECK(c.prior()[0].w == Approx(1.0));
    const PiecewiseSignalModel halves({0.0, 0.5, 1.0}, JointPrior({{{1.0, 3.0}, 1.0}}));
    CHECK(coarsen(halves, 2).prior()[0].x[0] == 2.0);
    const PiecewiseSignalModel flat({0.0, 0.2, 1.0}, JointPrior::diagonal(DiscretePrior::uniform(k12), 2));
    CHECK(coarsen(flat, 2).prior() == JointPrior::from_scalar(DiscretePrior::uniform(k12)));
    const PiecewiseSignalModel uneven({0.0, 0.25, 1.0}, JointPrior({{{1.0, 5.0}, 1.0}}));
    CHECK(coarsen(uneven, 2).prior()[0].x[0] == Approx(4.0));
    CHECK_THROWS_AS(coarsen(m, 3), DomainError);
    CHECK_THROWS_AS(coarsen(m, 0), DomainError);
}
