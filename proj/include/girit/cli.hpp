#pragma once

#include "girit/config.hpp"
#include "girit/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace girit::cli {

/// Builds and persists the index; writes corpus statistics.
auto cmd_index(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;
/// One run file per model: <output>/<tag>.<model>.run.
auto cmd_run(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;
/// Expanded topics plus the added-terms summary.
auto cmd_expand(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;
/// <output>/<run stem>.eval and .eval.csv per run file.
auto cmd_eval(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;
/// <output>/comparison.txt and comparison.csv.
auto cmd_compare(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;
/// Cross-checks index ranking against the exhaustive oracle.
auto cmd_verify(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode;

/// Full command-line entry point; `args[0]` is the program name.
auto run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace girit::cli
