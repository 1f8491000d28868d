#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chargetune/cli.hpp"
#include "chargetune/config.hpp"
#include "chargetune/errors.hpp"
#include "chargetune/fitting.hpp"
#include "chargetune/formats.hpp"

namespace chargetune::cli {

using nlohmann::json;

struct Session {
  std::vector<std::string> args;  // as given, for the metadata trail
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  std::optional<std::uint64_t> seed;

  /// Config file (if any) with --seed applied; validated.
  RunConfig config() const;
};

/// `explicit_path` if set, else <output.directory>/<output.prefix>_<stem>.
std::string output_path(const RunConfig& config, const std::string& explicit_path, const std::string& stem);

/// Writes <path>.meta.json: schema version, command line, resolved config
/// and any command-specific `extra` fields.
void write_sidecar(const std::string& path, const Session& session, const RunConfig& config, const json& extra);

void write_json(const std::string& path, const json& j);

json to_json(const FitResult& r);

/// Seed for a stochastic path; throws ConfigError when none was given.
std::uint64_t require_seed(const RunConfig& config);

/// Parses "NxM".
std::pair<int, int> parse_grid(const std::string& text);

}  // namespace chargetune::cli
