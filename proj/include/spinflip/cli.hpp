#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinflip/model.hpp"
#include "spinflip/quench.hpp"
#include "spinflip/report.hpp"

namespace spinflip::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// Raised for malformed configuration documents and inconsistent flags.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& known_checks();

// Resolved run configuration. Flags override the config file key by key.
struct RunConfig {
  std::optional<nlohmann::json> model;  // as accepted by model_from_json
  std::vector<std::string> checks;
  McPlan plan;
  std::size_t legendre = 32;
  std::size_t hermite = 64;
  nlohmann::json flip = "all";  // "all", "none" or a list of site indices
  std::array<double, 2> interval{0.0, 3.141592653589793};
  std::array<double, 2> angles{0.3, 1.1};
  std::optional<double> tolerance;
  std::optional<std::string> output;
};

// Strict: unknown keys raise ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);

FlipRegion resolve_flip(const ModelSpec& model, const nlohmann::json& flip);

// Runs every requested check in order.
std::vector<CheckReport> execute(const RunConfig& config);

// Full command line entry point: "check <names...> [flags]".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinflip::cli
