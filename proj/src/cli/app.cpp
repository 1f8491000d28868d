#include "chargetune/cli.hpp"

#include <algorithm>

#include "chargetune/errors.hpp"
#include "commands.hpp"

namespace chargetune {

namespace {

int report(std::ostream& err, const char* kind, const std::string& message, int code, std::size_t line = 0) {
  nlohmann::json e = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  if (line) e["line"] = line;
  err << nlohmann::json{{"error", e}}.dump() << '\n';
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  cli::Session session{args, out, err, {}, {}};
  cli::Runner runner{session};

  CLI::App app{"Photo-induced surface chemistry and emitter charge-state modelling", "chargetune"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-c,--config", session.config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", session.seed, "Random seed (required for noisy synthetic output)");
  cli::add_simulate(app, runner);
  cli::add_bandbend(app, runner);
  cli::add_fit(app, runner);
  cli::add_synth(app, runner);
  cli::add_estimate(app, runner);

  // CLI11 consumes arguments back to front.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    return runner.status;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", e.what(), kExitUsage);
  } catch (const ParseError& e) {
    return report(err, "parse", e.what(), kExitUsage, e.line());
  } catch (const ConfigError& e) {
    return report(err, "config", e.what(), kExitUsage);
  } catch (const DomainError& e) {
    return report(err, "domain", e.what(), kExitUsage);
  } catch (const DegenerateSystemError& e) {
    return report(err, "degenerate", e.what(), kExitUsage);
  } catch (const SolverError& e) {
    return report(err, "solver", e.what(), kExitSolver);
  } catch (const std::exception& e) {
    return report(err, "internal", e.what(), kExitUsage);
  }
}

}  // namespace chargetune
