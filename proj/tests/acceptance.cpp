// Acceptance criteria, one line each. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "pchan/ct_models.hpp"
#include "pchan/pp_sim.hpp"
#include "pchan/quadrature.hpp"
#include "pchan/verify.hpp"
#include "property_suites.hpp"

using namespace pchan;
using nlohmann::json;

namespace {

struct Verdict {
    bool passed;
    std::string detail;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double detail_side(const verify::CheckReport& r, std::size_t comparison, std::size_t side) {
    const auto& v = r.details.at(comparison).at("sides").at(side);
    return v.is_string() ? kInf : v.get<double>();
}

Verdict c1_t42() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = verify::run_check("T42", {{"gammas", {0.5, 1, 2, 4, 8}}, {"tol", 1e-6}});
    const double dt = seconds_since(t0);
    return {r.passed && dt <= 10.0, "max |output_kl - integral| = " + num(r.abs_gap) + " (tol 1e-6), " + num(dt) + " s"};
}

Verdict c2_t41() {
    const auto r = verify::run_check("T41", {{"tol", 0.01}});
    const double integral = detail_side(r, 0, 0), kl = detail_side(r, 0, 1);
    const bool kl_ok = std::abs(kl - 0.1438410) <= 5e-8;
    const bool disjoint = std::isinf(detail_side(r, 1, 0)) && std::isinf(detail_side(r, 1, 1));
    return {r.passed && kl_ok && disjoint, "integral " + num(integral) + " vs kl " + num(kl) +
                                               "; disjoint pair sides " + (disjoint ? "inf = inf" : "not both inf")};
}

Verdict c3_immle() {
    const auto r = verify::run_check("IMMLE", {{"integral_gammas", {1, 4}},
                                               {"integral_tol", 1e-6},
                                               {"derivative_gammas", {0.5, 2}},
                                               {"derivative_tol", 1e-3}});
    double int_gap = 0, der_gap = 0;
    for (const auto& d : r.details) {
        const auto label = d["label"].get<std::string>();
        if (label.rfind("integral", 0) == 0) int_gap = std::max(int_gap, d["abs_gap"].get<double>());
        else der_gap = std::max(der_gap, d["rel_gap"].get<double>());
    }
    return {r.passed, "integral form abs gap " + num(int_gap) + " (tol 1e-6), derivative rel gap " + num(der_gap) +
                          " (tol 1e-3)"};
}

Verdict c4_hent() {
    const auto r = verify::run_check("HENT", {{"maps", {"identity", "square"}}, {"tol", 0.01}});
    const double a = detail_side(r, 0, 0), b = detail_side(r, 1, 0);
    const double ln2 = std::log(2.0);
    const bool ok = r.passed && std::abs(a - ln2) <= 0.01 * ln2 && std::abs(b - ln2) <= 0.01 * ln2;
    return {ok, "g = identity: " + num(a) + ", g = x^2: " + num(b) + " vs ln 2 = 0.6931472"};
}

Verdict c5_t55() {
    const auto r = verify::run_check("T55", {{"p", 0.5}, {"q", 0.2}, {"gammas", {1, 2, 5}}, {"tol", 1e-5},
                                             {"matched_tol", 1e-6}});
    double three = 0, matched = 0;
    for (const auto& d : r.details) {
        double& slot = d["label"].get<std::string>().rfind("matched", 0) == 0 ? matched : three;
        slot = std::max(slot, d["abs_gap"].get<double>());
    }
    return {r.passed, "three-way max gap " + num(three) + " (tol 1e-5), gamma*cmle_PP vs I gap " + num(matched) +
                          " (tol 1e-6)"};
}

Verdict c6_closed_forms() {
    double worst_bin = 0, worst_half = 0;
    for (double g = 0.1; g <= 20.0 + 1e-12; g += 0.1) {
        const double qb = integrate([](double a) { return binary_dc_g(0.5, 0.2, a); }, 0.0, g, 1e-12).value / g;
        const double qh = integrate([](double a) { return halfdc_f(a); }, 0.0, g, 1e-12).value / g;
        worst_bin = std::max(worst_bin, std::abs(binary_dc_cmle_closed(0.5, 0.2, g) - qb));
        worst_half = std::max(worst_half, std::abs(halfdc_cmle_closed(g) - qh));
    }
    const auto f2 = verify::run_check("FIG2");
    const auto f3 = verify::run_check("FIG3");
    const bool ok = worst_bin <= 1e-6 && worst_half <= 1e-6 && f2.passed && f3.passed;
    return {ok, "closed vs quadrature: binary " + num(worst_bin) + ", half " + num(worst_half) +
                    " (tol 1e-6); figure 2 orderings " + (f2.passed ? "hold" : "violated") +
                    "; figure 3 non-causal above causal up to the causal peak " + (f3.passed ? "holds" : "violated")};
}

Verdict c7_monte_carlo() {
    const auto model = PiecewiseSignalModel::dc(DiscretePrior::binary(0.0, 1.0, 0.5), 1.0);
    const auto belief = JointPrior::from_scalar(DiscretePrior::binary(0.0, 1.0, 0.2));
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = mc_estimate(model, belief, 2.0, Target::cmle, 100000, 20240601);
    const double dt = seconds_since(t0);
    const double closed = binary_dc_cmle_closed(0.5, 0.2, 2.0);
    const bool within = std::abs(e.value - closed) <= 3.0 * e.std_error;
    const bool se_ok = e.std_error <= 1e-3;
    return {within && se_ok && dt <= 60.0,
            "estimate " + num(e.value) + " vs closed " + num(closed) + " (" + (within ? "within" : "outside") +
                " 3 SE); std_error " + num(e.std_error) + (se_ok ? " <= 1e-3" : " > 1e-3") + "; " + num(dt) + " s"};
}

Verdict c8_rev() {
    const auto r = verify::run_check("REV", {{"gamma", 2}, {"replicates", 100000}});
    return {r.passed, "acmle " + num(r.sides.at(0)) + ", cmle " + num(r.sides.at(1)) + ", |gap| " + num(r.abs_gap) +
                          " vs 3 SE " + num(r.tolerance)};
}

Verdict c9_merge() {
    const auto r = verify::run_check("MERGE", {{"tol", 1e-9}});
    const double delta = detail_side(r, 0, 0);
    const bool exact = std::abs(delta - (2.0 - 2.0 * std::log(2.0))) <= 1e-12;
    return {r.passed && exact && r.details.size() == 3,
            "3 pairs, max rel gap " + num(r.rel_gap) + " (tol 1e-9); delta pair " + num(delta) + " vs 0.6137056"};
}

Verdict c10_vec() {
    const auto r = verify::run_check("VEC", {{"gamma", 2}, {"tol", 1e-5}});
    const bool correlated = r.inputs["p"]["atoms"].size() == 2;
    return {r.passed && correlated, "vec_output_kl " + num(r.sides.at(0)) + " vs integral " + num(r.sides.at(1)) +
                                        ", gap " + num(r.abs_gap) + " (tol 1e-5)"};
}

Verdict c11_properties() {
    bool ok = true;
    std::string detail;
    for (const auto& o : props::all(2024)) {
        ok = ok && o.instances >= 200 && o.violations == 0;
        detail += (detail.empty() ? "" : "; ") + o.name + " " + std::to_string(o.violations) + "/" +
                  std::to_string(o.instances);
    }
    return {ok, "violations: " + detail};
}

Verdict c12_f2() {
    const auto r = verify::run_check("F2", {{"p", 0.5}, {"q", 0.2}, {"gammas", {0.2, 0.1, 0.05, 0.025}}, {"tol", 0.05}});
    return {r.passed, "ratio at gamma=0.025: mismatched " + num(detail_side(r, 1, 0)) + ", matched " +
                          num(detail_side(r, 3, 0)) + " (within 5% of 2)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"relative entropy vs integrated excess loss (T42)", c1_t42},
        {"semi-infinite limit equals input relative entropy (T41)", c2_t41},
        {"I-MMLE integral and derivative forms (IMMLE)", c3_immle},
        {"entropy as integrated mmle, two relabelings (HENT)", c4_hent},
        {"causal / non-causal / I + D for the binary DC signal (T55)", c5_t55},
        {"closed forms vs quadrature and figure curves", c6_closed_forms},
        {"Monte Carlo causal loss vs closed form", c7_monte_carlo},
        {"time reversal of the causal loss (REV)", c8_rev},
        {"pair merge of independent observations (MERGE)", c9_merge},
        {"vector channel identity, n = 2 (VEC)", c10_vec},
        {"randomized property suites", c11_properties},
        {"factor of two at low SNR (F2)", c12_f2},
    };
    int failed = 0, index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.passed) ++failed;
        std::printf("%s  %2d  %s: %s\n", v.passed ? "PASS" : "FAIL", index, name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
