#include "pchan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>

#include "pchan/ct_models.hpp"
#include "pchan/errors.hpp"
#include "pchan/io.hpp"
#include "pchan/pp_sim.hpp"
#include "pchan/priors.hpp"
#include "pchan/quadrature.hpp"
#include "pchan/scalar_channel.hpp"

namespace pchan::verify {

using nlohmann::json;

std::string_view to_string(GapRule rule) {
    switch (rule) {
        case GapRule::automatic:
            return "auto";
        case GapRule::absolute:
            return "abs";
        case GapRule::relative:
            return "rel";
    }
    return "?";
}

Gap gap_between(const std::vector<ExtReal>& sides, GapRule rule) {
    Gap g{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < sides.size(); ++i) {
        for (std::size_t j = i + 1; j < sides.size(); ++j) {
            const double a = sides[i], b = sides[j];
            double abs_gap, rel_gap;
            if (std::isnan(a) || std::isnan(b)) {
                abs_gap = rel_gap = std::numeric_limits<double>::quiet_NaN();
            } else if (std::isinf(a) || std::isinf(b)) {
                abs_gap = rel_gap = (a == b) ? 0.0 : kInf;
            } else {
                abs_gap = std::abs(a - b);
                const double scale = std::max(std::abs(a), std::abs(b));
                rel_gap = scale > 0.0 ? abs_gap / scale : 0.0;
            }
            double decisive = abs_gap;
            if (rule == GapRule::relative || (rule == GapRule::automatic && a > 0.1 && b > 0.1)) decisive = rel_gap;
            if (std::isnan(decisive)) return {abs_gap, rel_gap, decisive};
            g.abs_gap = std::max(g.abs_gap, abs_gap);
            g.rel_gap = std::max(g.rel_gap, rel_gap);
            g.decisive = std::max(g.decisive, decisive);
        }
    }
    return g;
}

json to_json(const CheckReport& r) {
    json sides = json::array();
    for (double s : r.sides) sides.push_back(io::ext_to_json(s));
    json j = {{"check_id", r.check_id},
              {"anchor", r.anchor},
              {"inputs", r.inputs},
              {"lhs", io::ext_to_json(r.lhs())},
              {"rhs", io::ext_to_json(r.rhs())},
              {"sides", sides},
              {"side_labels", r.side_labels},
              {"abs_gap", io::ext_to_json(r.abs_gap)},
              {"rel_gap", io::ext_to_json(r.rel_gap)},
              {"tolerance", r.tolerance},
              {"gap_rule", to_string(r.gap_rule)},
              {"passed", r.passed},
              {"details", r.details}};
    j["hypothesis_note"] = r.hypothesis_note ? json(*r.hypothesis_note) : json(nullptr);
    if (r.error) j["error"] = *r.error;
    return j;
}

namespace {

// ---------------------------------------------------------------------------
// Report assembly

class ReportBuilder {
public:
    ReportBuilder(std::string_view id, json inputs) {
        report_.check_id = std::string(id);
        report_.anchor = std::string(anchor_of(id));
        report_.inputs = std::move(inputs);
    }

    /// Records one comparison; returns whether it passed.
    bool compare(const std::string& label, std::vector<ExtReal> sides, std::vector<std::string> side_labels,
                 double tol, GapRule rule = GapRule::automatic) {
        const Gap g = gap_between(sides, rule);
        const bool ok = g.decisive <= tol;  // false for NaN
        json sj = json::array();
        for (double s : sides) sj.push_back(io::ext_to_json(s));
        report_.details.push_back({{"label", label},
                                   {"sides", sj},
                                   {"side_labels", side_labels},
                                   {"abs_gap", io::ext_to_json(g.abs_gap)},
                                   {"rel_gap", io::ext_to_json(g.rel_gap)},
                                   {"tolerance", tol},
                                   {"gap_rule", to_string(rule)},
                                   {"passed", ok}});
        // The reported sides are those of the worst comparison relative to its tolerance.
        const double ratio = std::isnan(g.decisive) ? kInf : (tol > 0.0 ? g.decisive / tol : (g.decisive > 0 ? kInf : 0));
        const bool worse = !have_ || (worst_ok_ && !ok) || (worst_ok_ == ok && ratio > worst_ratio_);
        if (worse) {
            have_ = true;
            worst_ratio_ = ratio;
            worst_ok_ = ok;
            report_.sides = std::move(sides);
            report_.side_labels = std::move(side_labels);
            report_.abs_gap = g.abs_gap;
            report_.rel_gap = g.rel_gap;
            report_.tolerance = tol;
            report_.gap_rule = rule;
        }
        all_ok_ = all_ok_ && ok;
        return ok;
    }

    /// One-sided check value <= tol, reported as sides {violation, 0}.
    bool at_most(const std::string& label, double violation, double tol, const std::string& what) {
        return compare(label, {std::max(0.0, violation), 0.0}, {what, "zero"}, tol, GapRule::absolute);
    }

    void note(const std::string& text) {
        if (report_.hypothesis_note) {
            if (report_.hypothesis_note->find(text) == std::string::npos) *report_.hypothesis_note += "; " + text;
        } else {
            report_.hypothesis_note = text;
        }
    }

    void detail(json extra) { report_.details.push_back(std::move(extra)); }

    CheckReport finish() {
        report_.passed = all_ok_;
        return std::move(report_);
    }

private:
    CheckReport report_;
    bool have_ = false;
    bool all_ok_ = true;
    bool worst_ok_ = true;
    double worst_ratio_ = 0.0;
};

// ---------------------------------------------------------------------------
// Parameter access

DiscretePrior prior_param(const json& params, const char* key) {
    if (!params.contains(key)) throw io::ConfigError(std::string("missing parameter '") + key + "'");
    return io::prior_from_json(params.at(key));
}

double num_param(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_number())
        throw io::ConfigError(std::string("parameter '") + key + "' must be a number");
    return params.at(key).get<double>();
}

std::vector<double> grid_param(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_array())
        throw io::ConfigError(std::string("parameter '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : params.at(key)) {
        if (!v.is_number()) throw io::ConfigError(std::string("parameter '") + key + "' must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::pair<DiscretePrior, DiscretePrior>> pairs_param(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_array())
        throw io::ConfigError(std::string("parameter '") + key + "' must be an array of [p, q] pairs");
    std::vector<std::pair<DiscretePrior, DiscretePrior>> out;
    for (const auto& pr : params.at(key)) {
        if (!pr.is_array() || pr.size() != 2) throw io::ConfigError("each pair must be [p, q]");
        out.emplace_back(io::prior_from_json(pr[0]), io::prior_from_json(pr[1]));
    }
    return out;
}

std::vector<DiscretePrior> priors_param(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_array())
        throw io::ConfigError(std::string("parameter '") + key + "' must be an array of priors");
    std::vector<DiscretePrior> out;
    for (const auto& p : params.at(key)) out.push_back(io::prior_from_json(p));
    return out;
}

constexpr const char* kZeroAtomNote = "zero atoms: outside the strictly-positive-support hypothesis";

void note_support(ReportBuilder& b, const DiscretePrior& p) {
    if (!p.strictly_positive()) b.note(kZeroAtomNote);
}

std::string fmt(double v) { return io::format_double(v); }

json prior_json(std::initializer_list<std::pair<double, double>> atoms) {
    json arr = json::array();
    for (auto [x, w] : atoms) arr.push_back({{"x", x}, {"w", w}});
    return {{"atoms", arr}};
}

const json kUniform12 = prior_json({{1, 0.5}, {2, 0.5}});
const json kSkew12 = prior_json({{1, 0.25}, {2, 0.75}});
const json kBinaryHalf = prior_json({{0, 0.5}, {1, 0.5}});
const json kBinaryFifth = prior_json({{0, 0.8}, {1, 0.2}});
const json kDeltaHalf = prior_json({{0.5, 1.0}});
const json kDelta1 = prior_json({{1, 1.0}});
const json kDelta2 = prior_json({{2, 1.0}});

json swap_true_prior() {
    return {{"atoms", json::array({{{"values", {1, 2}}, {"w", 0.5}}, {{"values", {2, 1}}, {"w", 0.5}}})}};
}
json swap_belief_prior() {
    return {{"atoms", json::array({{{"values", {1, 1}}, {"w", 0.5}}, {{"values", {2, 2}}, {"w", 0.5}}})}};
}

double excess_mle(const DiscretePrior& p, const DiscretePrior& q, double a) { return mle(p, q, a) - mle(p, p, a); }

// Decay length of the matched/mismatched excess loss: the posterior separates
// atoms once gamma * (sqrt(x_i) - sqrt(x_j))^2 is of order one.
double decay_scale(const DiscretePrior& p) {
    double s = 8.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double d = std::sqrt(p[i].x) - std::sqrt(p[i - 1].x);
        s = std::max(s, 1.0 / (d * d));
    }
    return s;
}

std::function<double(double)> named_map(const std::string& name) {
    if (name == "identity") return [](double x) { return x; };
    if (name == "square") return [](double x) { return x * x; };
    if (name == "shift") return [](double x) { return x + 1.0; };
    if (name == "double") return [](double x) { return 2.0 * x; };
    if (name == "sqrt") return [](double x) { return std::sqrt(x); };
    throw io::ConfigError("unknown map '" + name + "' (identity, square, shift, double, sqrt)");
}

// ---------------------------------------------------------------------------
// Checks

// Series output_kl vs quadrature of series mle excess.
CheckReport check_t42(const json& prm) {
    ReportBuilder b("T42", prm);
    const auto p = prior_param(prm, "p"), q = prior_param(prm, "q");
    note_support(b, p);
    note_support(b, q);
    const double tol = num_param(prm, "tol"), qtol = num_param(prm, "quad_tol");
    for (double g : grid_param(prm, "gammas")) {
        const double lhs = output_kl(p, q, g);
        const double rhs = integrate([&](double a) { return excess_mle(p, q, a); }, 0.0, g, qtol).value;
        b.compare("gamma=" + fmt(g), {lhs, rhs}, {"output_kl", "integral of excess mle"}, tol, GapRule::absolute);
    }
    return b.finish();
}

// Semi-infinite quadrature of series mle excess vs prior-level KL.
CheckReport check_t41(const json& prm) {
    ReportBuilder b("T41", prm);
    const double tol = num_param(prm, "tol"), itol = num_param(prm, "integral_tol");
    auto run = [&](const std::string& label, const DiscretePrior& p, const DiscretePrior& q) {
        note_support(b, p);
        double integral;
        try {
            SemiInfiniteOptions opt;
            opt.scale_hint = decay_scale(q.size() > p.size() ? q : p);
            integral = integrate_semi_infinite([&](double a) { return excess_mle(p, q, a); }, 0.0, itol, opt).value;
        } catch (const DivergenceError&) {
            // Non-negative integrand that stops decaying: the integral is infinite.
            integral = kInf;
        }
        b.compare(label, {integral, kl_divergence(p, q)}, {"integral of excess mle", "kl_divergence"}, tol,
                  GapRule::relative);
    };
    run("support-matched pair", prior_param(prm, "p"), prior_param(prm, "q"));
    run("disjoint-support pair", prior_param(prm, "disjoint_p"), prior_param(prm, "disjoint_q"));
    return b.finish();
}

// Output-level KL (series) never exceeds the input-level KL (atom sum).
CheckReport check_bound(const json& prm) {
    ReportBuilder b("BOUND", prm);
    const double tol = num_param(prm, "tol");
    const auto gammas = grid_param(prm, "gammas");
    int k = 0;
    for (const auto& [p, q] : pairs_param(prm, "pairs")) {
        note_support(b, p);
        const double d = kl_divergence(p, q);
        double worst = 0.0;
        for (double g : gammas) worst = std::max(worst, output_kl(p, q, g) - d);
        b.at_most("pair " + std::to_string(k++) + " max(output_kl - kl)", worst, tol, "bound violation");
    }
    return b.finish();
}

// Mutual information (average of per-atom series KL) vs quadrature / finite
// differences of the minimum mean loss.
CheckReport check_immle(const json& prm) {
    ReportBuilder b("IMMLE", prm);
    const auto p = prior_param(prm, "p");
    note_support(b, p);
    for (double g : grid_param(prm, "integral_gammas")) {
        const double lhs = mutual_information(p, g);
        const double rhs = integrate([&](double a) { return mmle(p, a); }, 0.0, g, 1e-10).value;
        b.compare("integral gamma=" + fmt(g), {lhs, rhs}, {"mutual_information", "integral of mmle"},
                  num_param(prm, "integral_tol"), GapRule::absolute);
    }
    for (double g : grid_param(prm, "derivative_gammas")) {
        const double h = std::max(1e-4, 1e-3 * g);
        const double lhs = (mutual_information(p, g + h) - mutual_information(p, g - h)) / (2.0 * h);
        b.compare("derivative gamma=" + fmt(g), {lhs, mmle(p, g)}, {"central difference of I", "mmle"},
                  num_param(prm, "derivative_tol"), GapRule::relative);
    }
    return b.finish();
}

CheckReport check_conc(const json& prm) {
    ReportBuilder b("CONC", prm);
    const double gmax = num_param(prm, "gmax"), h = num_param(prm, "step"), tol = num_param(prm, "tol");
    int k = 0;
    for (const auto& p : priors_param(prm, "priors")) {
        note_support(b, p);
        std::vector<double> I;
        for (double g = 0.0; g <= gmax + 1e-12; g += h) I.push_back(mutual_information(p, g));
        double worst = -kInf;
        for (std::size_t i = 1; i + 1 < I.size(); ++i) worst = std::max(worst, (I[i + 1] - 2 * I[i] + I[i - 1]) / (h * h));
        b.at_most("prior " + std::to_string(k++) + " max second difference", worst, tol, "max second difference");
    }
    return b.finish();
}

// Semi-infinite quadrature of mmle of the relabelled prior vs the entropy of the weights.
CheckReport check_hent(const json& prm) {
    ReportBuilder b("HENT", prm);
    const auto p = prior_param(prm, "p");
    const double tol = num_param(prm, "tol"), itol = num_param(prm, "integral_tol");
    const double h = entropy(p);
    for (const auto& name : prm.at("maps")) {
        const auto pg = transform(p, named_map(name.get<std::string>()));
        note_support(b, pg);
        SemiInfiniteOptions opt;
        opt.scale_hint = decay_scale(pg);
        const double integral = integrate_semi_infinite([&](double a) { return mmle(pg, a); }, 0.0, itol, opt).value;
        b.compare("map " + name.get<std::string>(), {integral, h}, {"integral of mmle(g(X))", "entropy"}, tol,
                  GapRule::relative);
    }
    // Pointwise: integral of the loss conditioned on one atom is its self-information.
    const std::size_t idx = static_cast<std::size_t>(num_param(prm, "pointwise_atom"));
    if (idx >= p.size()) throw io::ConfigError("HENT: pointwise_atom out of range");
    const double x = p[idx].x;
    SemiInfiniteOptions opt;
    opt.scale_hint = decay_scale(p);
    const double integral =
        integrate_semi_infinite([&](double a) { return mle(DiscretePrior::point(x), p, a); }, 0.0, itol, opt).value;
    b.compare("pointwise atom x=" + fmt(x), {integral, -std::log(p[idx].w)},
              {"integral of conditional loss", "log 1/P(X=x)"}, tol, GapRule::relative);
    return b.finish();
}

// I from per-atom KL vs H(Y) - H(Y|X) from the output pmf and the Poisson-entropy series.
CheckReport check_condh(const json& prm) {
    ReportBuilder b("CONDH", prm);
    const double tol = num_param(prm, "tol");
    int k = 0;
    for (const auto& p : priors_param(prm, "priors")) {
        note_support(b, p);
        for (double g : grid_param(prm, "gammas")) {
            const double rhs = output_entropy(p, g) - cond_output_entropy(p, g);
            b.compare("prior " + std::to_string(k) + " gamma=" + fmt(g), {mutual_information(p, g), rhs},
                      {"mutual_information", "H(Y) - H(Y|X)"}, tol, GapRule::absolute);
        }
        ++k;
    }
    return b.finish();
}

// Binary DC signal: gamma * closed-form causal loss, quadrature of the series
// non-causal loss, and series I + D.
CheckReport check_t55(const json& prm) {
    ReportBuilder b("T55", prm);
    const double p = num_param(prm, "p"), q = num_param(prm, "q");
    const auto P = DiscretePrior::binary(0.0, 1.0, p), Q = DiscretePrior::binary(0.0, 1.0, q);
    const DcModel mp{P, 1.0}, mq{Q, 1.0};
    note_support(b, P);
    for (double g : grid_param(prm, "gammas")) {
        const double causal = g * binary_dc_cmle_closed(p, q, g);
        const double noncausal =
            integrate([&](double a) { return ct_mle(mp, mq, a); }, 0.0, g, 1e-11).value;
        const double info = mutual_information(P, g);
        const double div = output_kl(P, Q, g);
        b.compare("gamma=" + fmt(g), {causal, noncausal, info + div},
                  {"gamma*cmle_PQ", "integral of mle_PQ", "I + D"}, num_param(prm, "tol"));
        b.compare("matched gamma=" + fmt(g), {g * binary_dc_cmle_closed(p, p, g), info},
                  {"gamma*cmle_PP", "I"}, num_param(prm, "matched_tol"), GapRule::absolute);
    }
    return b.finish();
}

// Small-SNR ratio of non-causal to causal loss gaps, both from series/quadrature.
CheckReport check_f2(const json& prm) {
    ReportBuilder b("F2", prm);
    const double p = num_param(prm, "p"), q = num_param(prm, "q"), tol = num_param(prm, "tol");
    const auto gammas = grid_param(prm, "gammas");
    for (const auto& [label, belief] : {std::pair{"mismatched", q}, std::pair{"matched", p}}) {
        const DcModel mp{DiscretePrior::binary(0.0, 1.0, p), 1.0}, mq{DiscretePrior::binary(0.0, 1.0, belief), 1.0};
        const double base = ct_mle(mp, mq, 0.0);
        std::vector<double> ratios;
        for (double g : gammas) ratios.push_back((base - ct_mle(mp, mq, g)) / (base - ct_cmle(mp, mq, g)));
        // Richardson with halving steps removes the O(gamma) term.
        std::vector<double> rich;
        for (std::size_t i = 1; i < ratios.size(); ++i) rich.push_back(2.0 * ratios[i] - ratios[i - 1]);
        b.detail({{"label", std::string(label) + " ratios"}, {"gammas", gammas}, {"ratios", ratios}, {"richardson", rich}});
        b.compare(std::string(label) + " ratio at gamma=" + fmt(gammas.back()), {ratios.back(), 2.0},
                  {"loss-gap ratio", "two"}, tol, GapRule::relative);
    }
    note_support(b, DiscretePrior::binary(0.0, 1.0, p));
    return b.finish();
}

// Deterministic 1/2 vs fair binary belief: sign of mle - cmle against the slope of cmle.
CheckReport check_sign(const json& prm) {
    ReportBuilder b("SIGN", prm);
    const DcModel mp{io::prior_from_json(kDeltaHalf), 1.0}, mq{io::prior_from_json(kBinaryHalf), 1.0};
    b.note(kZeroAtomNote);
    const double gmax = num_param(prm, "gmax"), step = num_param(prm, "step"), h = num_param(prm, "h");
    int mismatches = 0, compared = 0;
    json points = json::array();
    for (double g = step; g <= gmax + 1e-12; g += step) {
        const double c = ct_cmle(mp, mq, g);
        const double diff = halfdc_f(g) - c;
        const double slope = (ct_cmle(mp, mq, g + h) - ct_cmle(mp, mq, g - h)) / (2.0 * h);
        if (std::abs(diff) < 1e-7 || std::abs(slope) < 1e-7) continue;  // at the crossing
        ++compared;
        if ((diff > 0) != (slope > 0)) ++mismatches;
        points.push_back({{"gamma", g}, {"mle_minus_cmle", diff}, {"cmle_slope", slope}});
    }
    b.detail({{"label", "grid"}, {"compared", compared}, {"points", points}});
    b.at_most("sign mismatches", mismatches, 0.0, "sign mismatches");
    return b.finish();
}

PiecewiseSignalModel swap_model(const json& prm) {
    return PiecewiseSignalModel(grid_param(prm, "breakpoints"), io::joint_prior_from_json(prm.at("p")));
}

// Two independent Monte Carlo runs: anti-causal vs causal mismatched filters.
CheckReport check_rev(const json& prm) {
    ReportBuilder b("REV", prm);
    const auto model = swap_model(prm);
    const auto belief = io::joint_prior_from_json(prm.at("q"));
    const double g = num_param(prm, "gamma");
    const auto reps = static_cast<std::int64_t>(num_param(prm, "replicates"));
    McOptions opt;
    opt.threads = static_cast<unsigned>(num_param(prm, "threads"));
    const auto causal =
        mc_estimate(model, belief, g, Target::cmle, reps, static_cast<std::uint64_t>(num_param(prm, "seed_causal")), opt);
    const auto anti = mc_estimate(model, belief, g, Target::acmle, reps,
                                  static_cast<std::uint64_t>(num_param(prm, "seed_anticausal")), opt);
    const double se = std::hypot(causal.std_error, anti.std_error);
    b.detail({{"label", "estimates"},
              {"cmle", causal.value},
              {"cmle_se", causal.std_error},
              {"acmle", anti.value},
              {"acmle_se", anti.std_error}});
    b.compare("acmle vs cmle", {anti.value, causal.value}, {"acmle (MC)", "cmle (MC)"}, num_param(prm, "sigmas") * se,
              GapRule::absolute);
    return b.finish();
}

// Two-dimensional enumeration over (Y1, Y2) vs the scalar channel at 2 gamma.
CheckReport check_merge(const json& prm) {
    ReportBuilder b("MERGE", prm);
    const double g = num_param(prm, "gamma"), tol = num_param(prm, "tol");
    int k = 0;
    for (const auto& [p, q] : pairs_param(prm, "pairs")) {
        note_support(b, p);
        const auto r = pair_merge_kl(p, q, g);
        b.compare("pair " + std::to_string(k++), {r.pair_kl, r.sum_kl}, {"pair enumeration", "merged channel"}, tol,
                  GapRule::relative);
    }
    return b.finish();
}

CheckReport check_vec(const json& prm) {
    ReportBuilder b("VEC", prm);
    const auto p = io::joint_prior_from_json(prm.at("p")), q = io::joint_prior_from_json(prm.at("q"));
    if (!p.strictly_positive() || !q.strictly_positive()) b.note(kZeroAtomNote);
    const double g = num_param(prm, "gamma");
    const double lhs = vec_output_kl(p, q, g);
    const double rhs =
        integrate([&](double a) { return vec_mle(p, q, a) - vec_mle(p, p, a); }, 0.0, g, 1e-9).value;
    b.compare("gamma=" + fmt(g), {lhs, rhs}, {"vec_output_kl", "integral of excess vec_mle"}, num_param(prm, "tol"),
              GapRule::absolute);
    return b.finish();
}

// Deterministic signal: I vanishes; D (series) = gamma * closed-form cmle =
// quadrature of the series mle.
CheckReport check_semi(const json& prm) {
    ReportBuilder b("SEMI", prm);
    const auto P = io::prior_from_json(kDeltaHalf), Q = io::prior_from_json(kBinaryHalf);
    const DcModel mp{P, 1.0}, mq{Q, 1.0};
    b.note(kZeroAtomNote + std::string(" (belief)"));
    const double tol = num_param(prm, "tol");
    for (double g : grid_param(prm, "gammas")) {
        b.compare("I at gamma=" + fmt(g), {mutual_information(P, g), 0.0}, {"I", "zero"}, tol, GapRule::absolute);
        const double d = output_kl(P, Q, g);
        const double causal = g * halfdc_cmle_closed(g);
        const double noncausal = integrate([&](double a) { return ct_mle(mp, mq, a); }, 0.0, g, 1e-11).value;
        b.compare("gamma=" + fmt(g), {d, causal, noncausal}, {"D", "gamma*cmle", "integral of mle"}, tol);
    }
    b.detail({{"label", "reference closed form"},
              {"gap_vs_quadrature_at_gamma_1", halfdc_reference_form_gap(1.0)},
              {"mle_limit", 0.5 - 0.5 * std::log(2.0)},
              {"remark",
               "the Gudermannian/dilogarithm expression disagrees with quadrature of the loss curve; the "
               "non-causal loss saturates at l(1/2,1) while D grows linearly in gamma"}});
    return b.finish();
}

CheckReport check_mono(const json& prm) {
    ReportBuilder b("MONO", prm);
    const double tol = num_param(prm, "tol");
    const auto gammas = grid_param(prm, "gammas");
    int k = 0;
    for (const auto& p : priors_param(prm, "priors")) {
        note_support(b, p);
        double worst = 0.0, prev = kInf;
        for (double g : gammas) {
            const double v = mmle(p, g);
            worst = std::max(worst, v - prev);
            prev = v;
        }
        b.at_most("mmle prior " + std::to_string(k++) + " max increase", worst, tol, "max increase");
    }
    k = 0;
    for (const auto& [p, q] : pairs_param(prm, "pairs")) {
        double worst = 0.0, prev = -kInf;
        for (double g : gammas) {
            const double v = output_kl(p, q, g);
            worst = std::max(worst, prev - v);
            prev = v;
        }
        b.at_most("output_kl pair " + std::to_string(k++) + " max decrease", worst, tol, "max decrease");
    }
    return b.finish();
}

void maybe_write_curve(const json& prm, const Curve& c) {
    if (prm.contains("output") && prm.at("output").is_string()) {
        std::ofstream out(prm.at("output").get<std::string>());
        if (!out) throw io::ConfigError("cannot write " + prm.at("output").get<std::string>());
        out << to_csv(c);
    }
}

// Binary DC curves: causal above non-causal, mismatched above matched.
CheckReport check_fig2(const json& prm) {
    ReportBuilder b("FIG2", prm);
    const auto c = figure2(num_param(prm, "p"), num_param(prm, "q"), num_param(prm, "gmax"),
                           static_cast<std::size_t>(num_param(prm, "points")));
    maybe_write_curve(prm, c);
    note_support(b, DiscretePrior::binary(0.0, 1.0, num_param(prm, "p")));
    const double tol = num_param(prm, "tol");
    // columns: gamma, A = mle_PP, B = cmle_PP, C = mle_PQ, D = cmle_PQ
    double ba = 0, dc = 0, ca = 0, db = 0;
    for (const auto& r : c.rows) {
        if (r[0] == 0.0) continue;
        ba = std::max(ba, r[1] - r[2]);
        dc = std::max(dc, r[3] - r[4]);
        ca = std::max(ca, r[1] - r[3]);
        db = std::max(db, r[2] - r[4]);
    }
    b.at_most("B >= A (causal above non-causal, matched)", ba, tol, "max(A - B)");
    b.at_most("D >= C (causal above non-causal, mismatched)", dc, tol, "max(C - D)");
    b.at_most("C >= A (mismatch costs, non-causal)", ca, tol, "max(A - C)");
    b.at_most("D >= B (mismatch costs, causal)", db, tol, "max(B - D)");
    return b.finish();
}

// Deterministic 1/2 curves: non-causal above causal while the causal curve
// rises, below it after the causal peak.
CheckReport check_fig3(const json& prm) {
    ReportBuilder b("FIG3", prm);
    const auto c =
        figure3(num_param(prm, "gmax"), static_cast<std::size_t>(num_param(prm, "points")));
    maybe_write_curve(prm, c);
    b.note(kZeroAtomNote + std::string(" (belief)"));
    const double tol = num_param(prm, "tol");
    std::size_t peak = 0;
    for (std::size_t i = 1; i < c.rows.size(); ++i)
        if (c.rows[i][2] > c.rows[peak][2]) peak = i;
    double before = 0.0, after = 0.0;
    for (std::size_t i = 1; i < c.rows.size(); ++i) {
        if (i + 1 <= peak) before = std::max(before, c.rows[i][2] - c.rows[i][1]);
        if (i >= peak + 1) after = std::max(after, c.rows[i][1] - c.rows[i][2]);
    }
    b.detail({{"label", "causal peak"}, {"gamma", c.rows[peak][0]}, {"cmle", c.rows[peak][2]}});
    b.at_most("A >= B before the causal peak", before, tol, "max(B - A)");
    b.at_most("B >= A after the causal peak", after, tol, "max(A - B)");
    return b.finish();
}

struct CatalogEntry {
    std::string id;
    std::string anchor;
    std::function<json()> defaults;
    std::function<CheckReport(const json&)> run;
};

const std::vector<CatalogEntry>& entries() {
    static const std::vector<CatalogEntry> table = {
        {"T42", "D(P_Y||Q_Y) = int_0^gamma [mle_PQ - mle_PP]",
         [] {
             return json{{"p", kUniform12}, {"q", kSkew12}, {"gammas", {0.5, 1, 2, 4, 8}}, {"tol", 1e-6},
                         {"quad_tol", 1e-10}};
         },
         check_t42},
        {"T41", "D(P||Q) = int_0^inf [mle_PQ - mle_PP]",
         [] {
             return json{{"p", kUniform12},       {"q", kSkew12},           {"tol", 0.01},
                         {"integral_tol", 1e-5},  {"disjoint_p", kDeltaHalf}, {"disjoint_q", kBinaryHalf}};
         },
         check_t41},
        {"BOUND", "D(P_Y||Q_Y) <= D(P||Q)",
         [] {
             return json{{"pairs", {{kUniform12, kSkew12}, {kBinaryHalf, kBinaryFifth}}},
                         {"gammas", {0.1, 0.5, 1, 2, 4, 8, 16, 32, 64}},
                         {"tol", 1e-12}};
         },
         check_bound},
        {"IMMLE", "dI/dgamma = mmle and I = int_0^gamma mmle",
         [] {
             return json{{"p", kUniform12},           {"integral_gammas", {1, 4}}, {"integral_tol", 1e-6},
                         {"derivative_gammas", {0.5, 2}}, {"derivative_tol", 1e-3}};
         },
         check_immle},
        {"CONC", "I(X;Y_gamma) concave in gamma",
         [] { return json{{"priors", {kUniform12, kBinaryHalf}}, {"gmax", 10}, {"step", 0.25}, {"tol", 1e-8}}; },
         check_conc},
        {"HENT", "H(X) = int_0^inf mmle of g(X), any one-to-one g",
         [] {
             return json{{"p", kUniform12}, {"maps", {"identity", "square"}}, {"tol", 0.01},
                         {"integral_tol", 1e-5}, {"pointwise_atom", 0}};
         },
         check_hent},
        {"CONDH", "I = H(Y) - H(Y|X), H(Y|X) via the Poisson entropy series",
         [] { return json{{"priors", {kUniform12, kBinaryHalf}}, {"gammas", {0.5, 2, 8}}, {"tol", 1e-9}}; },
         check_condh},
        {"T55", "gamma*cmle_PQ = int_0^gamma mle_PQ = I + D",
         [] { return json{{"p", 0.5}, {"q", 0.2}, {"gammas", {1, 2, 5}}, {"tol", 1e-5}, {"matched_tol", 1e-6}}; },
         check_t55},
        {"F2", "low-SNR loss gap ratio (non-causal / causal) -> 2",
         [] { return json{{"p", 0.5}, {"q", 0.2}, {"gammas", {0.2, 0.1, 0.05, 0.025}}, {"tol", 0.05}}; },
         check_f2},
        {"SIGN", "mle_PQ > cmle_PQ iff d/dgamma cmle_PQ > 0",
         [] { return json{{"gmax", 20}, {"step", 0.25}, {"h", 1e-3}}; }, check_sign},
        {"REV", "acmle_PQ = cmle_PQ",
         [] {
             return json{{"breakpoints", {0.0, 0.5, 1.0}}, {"p", swap_true_prior()}, {"q", swap_belief_prior()},
                         {"gamma", 2},  {"replicates", 100000}, {"seed_causal", 1}, {"seed_anticausal", 2},
                         {"threads", 1}, {"sigmas", 3}};
         },
         check_rev},
        {"MERGE", "D(P_{Y1,Y2}||Q_{Y1,Y2}) = D(P_{Y1+Y2}||Q_{Y1+Y2})",
         [] {
             return json{{"pairs", {{kDelta1, kDelta2}, {kUniform12, kSkew12}, {kBinaryHalf, kBinaryFifth}}},
                         {"gamma", 1},
                         {"tol", 1e-9}};
         },
         check_merge},
        {"VEC", "D(P_{Y^n}||Q_{Y^n}) = int_0^gamma [mle^vec_PQ - mle^vec_PP]",
         [] { return json{{"p", swap_true_prior()}, {"q", swap_belief_prior()}, {"gamma", 2}, {"tol", 1e-5}}; },
         check_vec},
        {"SEMI", "deterministic signal: gamma*cmle_PQ = int_0^gamma mle_PQ = D, I = 0",
         [] { return json{{"gammas", {1, 2, 5, 10}}, {"tol", 1e-6}}; }, check_semi},
        {"MONO", "mmle non-increasing, D(P_Y||Q_Y) non-decreasing in gamma",
         [] {
             json grid = json::array();
             for (int i = 0; i <= 40; ++i) grid.push_back(0.5 * i);
             return json{{"priors", {kUniform12, kBinaryHalf}},
                         {"pairs", {{kUniform12, kSkew12}, {kBinaryHalf, kBinaryFifth}}},
                         {"gammas", grid},
                         {"tol", 1e-12}};
         },
         check_mono},
        {"FIG2", "binary DC curves A-D (mle_PP, cmle_PP, mle_PQ, cmle_PQ)",
         [] { return json{{"p", 0.5}, {"q", 0.2}, {"gmax", 12}, {"points", 200}, {"tol", 1e-12}}; }, check_fig2},
        {"FIG3", "deterministic-1/2 curves A-B (mle_PQ, cmle_PQ)",
         [] { return json{{"gmax", 20}, {"points", 200}, {"tol", 1e-12}}; }, check_fig3},
    };
    return table;
}

const CatalogEntry& find_entry(std::string_view id) {
    for (const auto& e : entries())
        if (e.id == id) return e;
    throw DomainError("unknown check id '" + std::string(id) + "'");
}

}  // namespace

const std::vector<std::string>& catalog() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& e : entries()) v.push_back(e.id);
        return v;
    }();
    return ids;
}

std::string_view anchor_of(std::string_view check_id) { return find_entry(check_id).anchor; }

json default_params(std::string_view check_id) { return find_entry(check_id).defaults(); }

CheckReport run_check(std::string_view check_id, const json& params) {
    const auto& e = find_entry(check_id);
    if (!params.is_object()) throw io::ConfigError("check parameters must be a JSON object");
    json merged = e.defaults();
    merged.merge_patch(params);
    return e.run(merged);
}

SuiteConfig SuiteConfig::defaults() {
    SuiteConfig c;
    for (const auto& id : catalog()) c.checks.push_back({id, json::object()});
    return c;
}

SuiteConfig SuiteConfig::from_json(const json& j) {
    if (!j.is_object()) throw io::ConfigError("suite config must be a JSON object");
    SuiteConfig c = j.contains("checks") ? SuiteConfig{} : defaults();
    if (j.contains("checks")) {
        if (!j.at("checks").is_array()) throw io::ConfigError("'checks' must be an array");
        for (const auto& e : j.at("checks")) {
            if (e.is_string()) {
                c.checks.push_back({e.get<std::string>(), json::object()});
                continue;
            }
            if (!e.is_object() || !e.contains("id") || !e.at("id").is_string())
                throw io::ConfigError("each check needs a string 'id'");
            const auto id = e.at("id").get<std::string>();
            try {
                find_entry(id);
            } catch (const DomainError& err) {
                throw io::ConfigError(err.what());
            }
            c.checks.push_back({id, e.value("params", json::object())});
        }
    }
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_unsigned()) throw io::ConfigError("'threads' must be a non-negative integer");
        c.threads = j.at("threads").get<unsigned>();
    }
    return c;
}

std::string SuiteResult::summary_line() const {
    std::ostringstream os;
    os << "PASS " << passed << "/" << reports.size();
    return os.str();
}

SuiteResult full_suite(const SuiteConfig& config) {
    SuiteResult result;
    auto run_one = [](const SuiteConfig::Entry& entry) {
        try {
            return run_check(entry.id, entry.params);
        } catch (const io::ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            CheckReport r;
            r.check_id = entry.id;
            try {
                r.anchor = std::string(anchor_of(entry.id));
            } catch (const DomainError&) {
            }
            r.inputs = entry.params;
            r.passed = false;
            r.error = e.what();
            return r;
        }
    };
    if (config.threads <= 1) {
        for (const auto& entry : config.checks) result.reports.push_back(run_one(entry));
    } else {
        // Bounded fan-out; reports still land in configuration order.
        std::vector<std::future<CheckReport>> pending;
        for (std::size_t i = 0; i < config.checks.size(); i += config.threads) {
            for (std::size_t j = i; j < std::min(config.checks.size(), i + config.threads); ++j)
                pending.push_back(std::async(std::launch::async, run_one, std::cref(config.checks[j])));
            for (auto& f : pending) result.reports.push_back(f.get());
            pending.clear();
        }
    }
    for (const auto& r : result.reports) {
        if (r.error)
            ++result.errors;
        else if (r.passed)
            ++result.passed;
        else
            ++result.failed;
    }
    if (!config.checks.empty())
        result.untestable.push_back(
            "high-SNR case D(P||Q) = inf with D(P_Y||Q_Y) = o(gamma): no in-scope model has vanishing losses "
            "under infinite input divergence");
    return result;
}

// ---------------------------------------------------------------------------
// Figures

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
    if (count == 0) throw DomainError("grid: count must be >= 1");
    if (count == 1) return {start};
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return g;
}

std::vector<double> log_grid(double start, double stop, std::size_t count) {
    if (!(start > 0.0 && stop > 0.0)) throw DomainError("log grid: endpoints must be positive");
    auto g = linear_grid(std::log(start), std::log(stop), count);
    for (auto& v : g) v = std::exp(v);
    return g;
}

Curve figure2(double p, double q, double gmax, std::size_t points) {
    if (!(gmax > 0.0)) throw DomainError("figure2: gmax must be positive");
    Curve c{{"gamma", "mle_PP", "cmle_PP", "mle_PQ", "cmle_PQ"}, {}};
    for (double g : linear_grid(0.0, gmax, points))
        c.rows.push_back({g, binary_dc_g(p, p, g), binary_dc_cmle_closed(p, p, g), binary_dc_g(p, q, g),
                          binary_dc_cmle_closed(p, q, g)});
    return c;
}

Curve figure3(double gmax, std::size_t points) {
    if (!(gmax > 0.0)) throw DomainError("figure3: gmax must be positive");
    Curve c{{"gamma", "mle_PQ", "cmle_PQ"}, {}};
    for (double g : linear_grid(0.0, gmax, points)) c.rows.push_back({g, halfdc_f(g), halfdc_cmle_closed(g)});
    return c;
}

std::string to_csv(const Curve& curve) {
    std::ostringstream os;
    for (std::size_t i = 0; i < curve.columns.size(); ++i) os << (i ? "," : "") << curve.columns[i];
    os << "\n";
    for (const auto& r : curve.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << io::format_double(r[i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace pchan::verify
