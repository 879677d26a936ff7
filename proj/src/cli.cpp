#include "pchan/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pchan/errors.hpp"
#include "pchan/io.hpp"
#include "pchan/pp_sim.hpp"
#include "pchan/scalar_channel.hpp"
#include "pchan/verify.hpp"

namespace pchan::cli {

namespace {

using nlohmann::json;

struct GridSpec {
    double start = 0.0;
    double stop = 10.0;
    std::size_t count = 101;
    bool log = false;

    std::vector<double> values() const {
        if (count < 1) throw io::ConfigError("grid count must be >= 1");
        if (start < 0.0 || stop < 0.0) throw io::ConfigError("gamma must be >= 0");
        if (log) {
            if (start <= 0.0) throw io::ConfigError("log grid needs a positive start");
            return verify::log_grid(start, stop, count);
        }
        return verify::linear_grid(start, stop, count);
    }
};

// "start,stop,count" with an optional ",log" or ",linear" suffix.
GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
    if (parts.size() != 3 && parts.size() != 4)
        throw io::ConfigError("gamma grid must be start,stop,count[,linear|log]: '" + text + "'");
    GridSpec g;
    try {
        std::size_t used = 0;
        g.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        g.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        const long long n = std::stoll(parts[2], &used);
        if (used != parts[2].size() || n < 1) throw std::invalid_argument(parts[2]);
        g.count = static_cast<std::size_t>(n);
    } catch (const std::logic_error&) {
        throw io::ConfigError("malformed gamma grid '" + text + "'");
    }
    if (parts.size() == 4) {
        if (parts[3] == "log")
            g.log = true;
        else if (parts[3] != "linear")
            throw io::ConfigError("grid spacing must be linear or log");
    }
    return g;
}

// Writes to the path, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::ConfigError("cannot write " + path);
    f << text;
}

int run_verify(const std::string& suite_path, const std::string& report_path, std::optional<unsigned> threads,
               std::ostream& out, std::ostream& err) {
    auto config = suite_path.empty() ? verify::SuiteConfig::defaults()
                                     : verify::SuiteConfig::from_json(io::read_json_file(suite_path));
    if (threads) config.threads = *threads;
    const auto result = verify::full_suite(config);

    std::string ndjson;
    for (const auto& r : result.reports) ndjson += verify::to_json(r).dump() + "\n";
    emit(report_path, ndjson, out);

    for (const auto& r : result.reports) {
        err << (r.error ? "ERROR" : r.passed ? "PASS " : "FAIL ") << ' ' << r.check_id << "  " << r.anchor;
        if (r.error) err << "  (" << *r.error << ")";
        err << "\n";
    }
    for (const auto& u : result.untestable) err << "untestable: " << u << "\n";
    out << result.summary_line() << "\n";

    if (result.errors > 0) return kConvergence;
    return result.failed > 0 ? kCheckFailed : kOk;
}

// A belief file may hold a scalar prior ({"x", "w"} atoms), lifted to the
// model's dimension as a constant signal, or a joint prior.
JointPrior read_belief(const std::string& path, std::size_t dimension) {
    const json j = io::read_json_file(path);
    const auto& atoms = j.at("atoms");
    if (atoms.is_array() && !atoms.empty() && atoms[0].contains("x"))
        return JointPrior::diagonal(io::prior_from_json(j), dimension);
    return io::joint_prior_from_json(j);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Poisson channel loss, estimation and information identities"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string suite_path, report_path;
    std::optional<unsigned> threads;
    auto* verify_cmd = app.add_subcommand("verify", "run the identity checks");
    verify_cmd->add_option("--suite", suite_path, "suite configuration JSON")->check(CLI::ExistingFile);
    verify_cmd->add_option("--report", report_path, "newline-delimited JSON reports (default stdout)");
    verify_cmd->add_option("--threads", threads, "checks run concurrently");

    double p2 = 0.5, q2 = 0.2, gmax2 = 12.0, gmax3 = 20.0;
    std::size_t points2 = 200, points3 = 200;
    std::string out2, out3;
    auto* fig2 = app.add_subcommand("figure2", "binary DC signal curves");
    fig2->add_option("--p", p2, "true probability of the 1 atom")->check(CLI::Range(0.0, 1.0));
    fig2->add_option("--q", q2, "belief probability of the 1 atom")->check(CLI::Range(0.0, 1.0));
    fig2->add_option("--gmax", gmax2, "largest gamma")->check(CLI::PositiveNumber);
    fig2->add_option("--points", points2, "grid points")->check(CLI::PositiveNumber);
    fig2->add_option("-o,--output", out2, "CSV path (default stdout)");
    auto* fig3 = app.add_subcommand("figure3", "deterministic signal vs binary belief curves");
    fig3->add_option("--gmax", gmax3, "largest gamma")->check(CLI::PositiveNumber);
    fig3->add_option("--points", points3, "grid points")->check(CLI::PositiveNumber);
    fig3->add_option("-o,--output", out3, "CSV path (default stdout)");

    std::string prior_path, mismatch_path, grid_text = "0,10,101", scalar_out;
    auto* scalar = app.add_subcommand("scalar", "scalar channel quantities over a gamma grid");
    scalar->add_option("--prior", prior_path, "true prior JSON")->required()->check(CLI::ExistingFile);
    scalar->add_option("--mismatch", mismatch_path, "belief prior JSON (default: the true prior)")
        ->check(CLI::ExistingFile);
    scalar->add_option("--gamma-grid", grid_text, "start,stop,count[,linear|log]");
    scalar->add_option("-o,--output", scalar_out, "CSV path (default stdout)");

    std::string model_path, filter_path, target_name = "cmle", mc_out;
    double mc_gamma = 1.0;
    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    unsigned mc_threads = 1;
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of a time-integrated loss");
    mc->add_option("--model", model_path, "signal model JSON")->required()->check(CLI::ExistingFile);
    mc->add_option("--filter", filter_path, "belief JSON (default: the model prior)")->check(CLI::ExistingFile);
    mc->add_option("--gamma", mc_gamma, "channel gain")->check(CLI::NonNegativeNumber);
    mc->add_option("--target", target_name, "cmle, mle or acmle")->check(CLI::IsMember({"cmle", "mle", "acmle"}));
    mc->add_option("--reps", reps, "replicates")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "base seed");
    mc->add_option("--threads", mc_threads, "worker threads")->check(CLI::PositiveNumber);
    mc->add_option("-o,--output", mc_out, "JSON path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadConfig;
    }

    try {
        if (verify_cmd->parsed()) return run_verify(suite_path, report_path, threads, out, err);
        if (fig2->parsed()) {
            emit(out2, verify::to_csv(verify::figure2(p2, q2, gmax2, points2)), out);
            return kOk;
        }
        if (fig3->parsed()) {
            emit(out3, verify::to_csv(verify::figure3(gmax3, points3)), out);
            return kOk;
        }
        if (scalar->parsed()) {
            const auto p = io::prior_from_json(io::read_json_file(prior_path));
            const auto q = mismatch_path.empty() ? p : io::prior_from_json(io::read_json_file(mismatch_path));
            std::string csv = "gamma,mmle,mle,output_kl,mutual_information\n";
            for (double g : parse_grid(grid_text).values()) {
                csv += io::format_double(g) + "," + io::format_double(mmle(p, g)) + "," +
                       io::format_double(mle(p, q, g)) + "," + io::format_double(output_kl(p, q, g)) + "," +
                       io::format_double(mutual_information(p, g)) + "\n";
            }
            emit(scalar_out, csv, out);
            return kOk;
        }
        if (mc->parsed()) {
            const auto model = io::model_from_json(io::read_json_file(model_path));
            const auto belief = filter_path.empty() ? model.prior() : read_belief(filter_path, model.intervals());
            const auto target = parse_target(target_name);
            McOptions opt;
            opt.threads = mc_threads;
            const auto est = mc_estimate(model, belief, mc_gamma, target, reps, seed, opt);
            const json j = {{"target", to_string(target)},
                            {"gamma", mc_gamma},
                            {"value", io::ext_to_json(est.value)},
                            {"std_error", io::ext_to_json(est.std_error)},
                            {"replicates", est.replicates},
                            {"seed", est.seed},
                            {"infinite_replicates", est.infinite_replicates}};
            emit(mc_out, j.dump() + "\n", out);
            return kOk;
        }
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << "\n";
        return kConvergence;
    } catch (const io::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const ConsistencyError& e) {
        err << "internal consistency failure: " << e.what() << "\n";
        return kConvergence;
    } catch (const std::logic_error& e) {
        // DomainError, CapabilityError and ConsistencyError are all logic errors on user input.
        err << "invalid input: " << e.what() << "\n";
        return kBadConfig;
    }
    return kBadConfig;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace pchan::cli
