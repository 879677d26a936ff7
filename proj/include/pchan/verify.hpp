#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pchan/loss.hpp"

// Catalog of information-estimation identity checks. Every check computes the
// compared quantities along separate routes (series sums, quadrature, closed
// forms, Monte Carlo) and never by rearranging one expression into another.
namespace pchan::verify {

enum class GapRule {
    automatic,  ///< relative when both sides exceed 0.1, absolute otherwise
    absolute,
    relative,
};

std::string_view to_string(GapRule rule);

struct CheckReport {
    std::string check_id;
    std::string anchor;  ///< short description of the identity being checked
    nlohmann::json inputs;
    /// Compared quantities at the deciding comparison; two for an equality,
    /// three for a three-way identity. Inequality checks report {violation, 0}.
    std::vector<ExtReal> sides;
    std::vector<std::string> side_labels;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    double tolerance = 0.0;
    GapRule gap_rule = GapRule::automatic;
    bool passed = false;
    std::optional<std::string> hypothesis_note;
    /// Every individual comparison that went into the verdict.
    nlohmann::json details = nlohmann::json::array();
    /// Set when a side could not be computed (convergence failure).
    std::optional<std::string> error;

    ExtReal lhs() const { return sides.empty() ? 0.0 : sides.front(); }
    ExtReal rhs() const { return sides.size() < 2 ? 0.0 : sides[1]; }
};

nlohmann::json to_json(const CheckReport& r);

/// Gap between two or more sides: the largest pairwise gap.
struct Gap {
    double abs_gap;
    double rel_gap;
    double decisive;  ///< the one compared against the tolerance
};

Gap gap_between(const std::vector<ExtReal>& sides, GapRule rule);

/// Catalog order.
const std::vector<std::string>& catalog();

/// Anchor text for a catalog id; throws DomainError for unknown ids.
std::string_view anchor_of(std::string_view check_id);

/// Default parameters for a check (the values the suite runs with).
nlohmann::json default_params(std::string_view check_id);

/// Runs one check. `params` is merged over default_params(check_id); unknown
/// ids throw DomainError and numerical failures propagate.
CheckReport run_check(std::string_view check_id, const nlohmann::json& params = nlohmann::json::object());

struct SuiteConfig {
    struct Entry {
        std::string id;
        nlohmann::json params = nlohmann::json::object();
    };
    std::vector<Entry> checks;
    unsigned threads = 1;

    /// Every catalog entry with default parameters.
    static SuiteConfig defaults();
    /// {"checks": [{"id": "T42", "params": {...}}, ...], "threads": n}; a missing
    /// "checks" key means the default catalog.
    static SuiteConfig from_json(const nlohmann::json& j);
};

struct SuiteResult {
    std::vector<CheckReport> reports;  ///< in configuration order
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t errors = 0;  ///< reports whose computation threw
    std::vector<std::string> untestable;

    bool all_passed() const { return failed == 0 && errors == 0; }
    std::string summary_line() const;
};

/// Runs every configured check; a check that throws becomes a failed report
/// with `error` set, except io::ConfigError (malformed parameters), which propagates.
SuiteResult full_suite(const SuiteConfig& config);

// Figure data (closed forms, T = 1).

struct Curve {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::vector<double> linear_grid(double start, double stop, std::size_t count);
std::vector<double> log_grid(double start, double stop, std::size_t count);

/// gamma, mle_PP, cmle_PP, mle_PQ, cmle_PQ for the binary DC signal.
Curve figure2(double p, double q, double gmax, std::size_t points);

/// gamma, mle_PQ, cmle_PQ for the deterministic 1/2 signal vs a fair binary belief.
Curve figure3(double gmax, std::size_t points);

std::string to_csv(const Curve& curve);

}  // namespace pchan::verify
