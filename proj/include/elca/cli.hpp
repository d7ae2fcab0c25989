#ifndef ELCA_CLI_HPP
#define ELCA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace elca::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the command line `args` (without the program name). Diagnostics go
/// to `err` as a single line; returns the process exit code.
///
///   fit       fit one (G, K) model and write parameters, traces, assignments
///   select    cross-validated greedy search over (G, K)
///   simulate  draw a hypergraph from given or random parameters
///   sizedist  observed and model hyperedge-size distributions, moments
///   replay    re-run the command recorded in a manifest.json
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elca::cli

#endif  // ELCA_CLI_HPP
