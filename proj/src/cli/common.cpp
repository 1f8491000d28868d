#include "common.hpp"

#include <fstream>

#include "chargetune/errors.hpp"

namespace chargetune::cli {

RunConfig Session::config() const {
  RunConfig c = config_path.empty() ? RunConfig::defaults() : load_config(config_path);
  if (seed) c.seed = seed;
  c.validate();
  return c;
}

std::string output_path(const RunConfig& config, const std::string& explicit_path, const std::string& stem) {
  if (!explicit_path.empty()) return explicit_path;
  std::string dir = config.output.directory.empty() ? "." : config.output.directory;
  if (dir.back() != '/') dir += '/';
  const std::string prefix = config.output.prefix.empty() ? "" : config.output.prefix + "_";
  return dir + prefix + stem;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'", 0);
  out << j.dump(2) << '\n';
}

void write_sidecar(const std::string& path, const Session& session, const RunConfig& config, const json& extra) {
  json meta = {
      {"schema_version", kSchemaVersion},
      {"tool", "chargetune"},
      {"arguments", session.args},
      {"config", json::parse(config_to_json(config))},
  };
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  write_json(path + ".meta.json", meta);
}

json to_json(const FitResult& r) {
  json params = json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    params[r.names[i]] = {{"value", r.values[i]},
                          {"std_error", r.std_errors[i]},
                          {"at_bound", static_cast<bool>(r.bound_active[i])}};
  }
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.covariance.cols(); ++j) row.push_back(r.covariance(i, j));
    cov.push_back(row);
  }
  json derived = json::object();
  for (const auto& [k, v] : r.derived) derived[k] = v;
  return {
      {"schema_version", kSchemaVersion},
      {"parameters", params},
      {"derived", derived},
      {"covariance", cov},
      {"diagnostics",
       {{"objective", r.objective},
        {"residual_norm", r.residual_norm},
        {"gradient_norm", r.gradient_norm},
        {"iterations", r.iterations},
        {"n_data", r.n_data}}},
      {"flags", flag_names(r.flags)},
      {"ok", r.ok()},
  };
}

std::uint64_t require_seed(const RunConfig& config) {
  if (!config.seed) throw ConfigError("a --seed (or \"seed\" in the config) is required for noisy output");
  return *config.seed;
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no separator");
    std::size_t used = 0;
    const int a = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing text");
    const std::string rest = text.substr(x + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing text");
    return {a, b};
  } catch (const std::exception&) {
    throw ConfigError("--grid expects NxM, got '" + text + "'");
  }
}

}  // namespace chargetune::cli
