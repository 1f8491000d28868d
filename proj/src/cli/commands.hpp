#pragma once

#include <CLI11.hpp>

#include "common.hpp"

namespace chargetune::cli {

// Each group adds its subcommands; callbacks run during parsing and leave
// their exit code in `status`.
struct Runner {
  Session& session;
  int status = 0;
};

void add_simulate(CLI::App& app, Runner& runner);
void add_bandbend(CLI::App& app, Runner& runner);
void add_fit(CLI::App& app, Runner& runner);
void add_synth(CLI::App& app, Runner& runner);
void add_estimate(CLI::App& app, Runner& runner);

}  // namespace chargetune::cli
