#ifndef WAVEMAP_APP_RUNNER_HPP
#define WAVEMAP_APP_RUNNER_HPP

#include <string>

#include "config.hpp"

namespace wavemap::app {

// Each writes its artifacts into `out` (created if needed) and throws wavemap::Error.
void run_solve(const RunConfig& c, const std::string& out);
void run_verify(const RunConfig& c, const std::string& out);
void run_scatter(const RunConfig& c, const std::string& out);
void run_converge(const RunConfig& c, const std::string& out);

// dispatch on "solve", "verify-estimates", "scatter", "converge"
void run_command(const RunConfig& c, const std::string& command, const std::string& out);

} // namespace wavemap::app

#endif
