#include "pchan/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "pchan/errors.hpp"

namespace pchan::io {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

template <class F>
auto rethrow_domain(F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const CapabilityError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

DiscretePrior prior_from_json(const json& j) {
    const auto& arr = require(j, "atoms");
    if (!arr.is_array()) throw ConfigError("'atoms' must be an array");
    std::vector<Atom> atoms;
    for (const auto& a : arr) atoms.push_back({number(require(a, "x"), "atom x"), number(require(a, "w"), "atom w")});
    return rethrow_domain([&] { return DiscretePrior(std::move(atoms)); });
}

json to_json(const DiscretePrior& p) {
    json atoms = json::array();
    for (const auto& a : p.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
    return {{"atoms", atoms}};
}

JointPrior joint_prior_from_json(const json& j) {
    const auto& arr = require(j, "atoms");
    if (!arr.is_array()) throw ConfigError("'atoms' must be an array");
    std::vector<JointAtom> atoms;
    for (const auto& a : arr) {
        JointAtom ja;
        const auto& vals = require(a, "values");
        if (!vals.is_array()) throw ConfigError("'values' must be an array");
        for (const auto& v : vals) ja.x.push_back(number(v, "atom value"));
        ja.w = number(require(a, "w"), "atom w");
        atoms.push_back(std::move(ja));
    }
    return rethrow_domain([&] { return JointPrior(std::move(atoms)); });
}

json to_json(const JointPrior& p) {
    json atoms = json::array();
    for (const auto& a : p.atoms()) atoms.push_back({{"values", a.x}, {"w", a.w}});
    return {{"atoms", atoms}};
}

PiecewiseSignalModel model_from_json(const json& j) {
    const auto& bp = require(j, "breakpoints");
    if (!bp.is_array()) throw ConfigError("'breakpoints' must be an array");
    std::vector<double> bps;
    for (const auto& v : bp) bps.push_back(number(v, "breakpoint"));
    auto prior = joint_prior_from_json(j);
    return rethrow_domain([&] { return PiecewiseSignalModel(std::move(bps), std::move(prior)); });
}

json to_json(const PiecewiseSignalModel& m) {
    auto j = to_json(m.prior());
    j["breakpoints"] = m.breakpoints();
    return j;
}

json ext_to_json(ExtReal v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

ExtReal ext_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ConfigError("expected a number or \"inf\", got \"" + s + "\"");
    }
    return number(j, "value");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace pchan::io
