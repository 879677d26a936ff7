#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "pchan/loss.hpp"
#include "pchan/pp_sim.hpp"
#include "pchan/priors.hpp"

// JSON schemas:
//   prior:  {"atoms": [{"x": number, "w": number}, ...]}
//   model:  {"breakpoints": [0, ..., T], "atoms": [{"values": [...], "w": number}, ...]}
// A joint belief without breakpoints uses the same "atoms"/"values" layout.
namespace pchan::io {

/// Thrown for malformed configuration or input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DiscretePrior prior_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DiscretePrior& p);

JointPrior joint_prior_from_json(const nlohmann::json& j);
nlohmann::json to_json(const JointPrior& p);

PiecewiseSignalModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PiecewiseSignalModel& m);

/// Extended reals as JSON: finite numbers verbatim, +inf as the string "inf".
nlohmann::json ext_to_json(ExtReal v);
ExtReal ext_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace pchan::io
