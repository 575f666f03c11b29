#pragma once

#include "deltaring/bae.hpp"
#include "deltaring/core.hpp"
#include "deltaring/oracle.hpp"

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace deltaring::cli {

enum ExitCode : int {
  ok = 0,
  usage = 1,
  no_roots = 2,
  contract_violation = 3,
  numerical_failure = 4,
};

struct RunConfig {
  std::string subcommand;
  SystemParams params;
  SearchWindow window{12.0 * std::numbers::pi, 800, 1e-12, 1e-6};
  OracleConfig oracle_cfg;
  bool allow_attractive = false;
  std::string output_path;    //!< empty: standard output
  std::string output_format;  //!< json | csv; empty picks the per-command default

  // spectrum
  bool emit_contours = false;
  int contour_n = 200;
  // wavefunction / verify
  int root_index = 0;
  int grid_points = 201;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<double> tol;
  std::uint64_t seed = 20240611;
  int probes = 128;
  // expansion
  std::vector<double> xi_samples{200, 400, 800, 1600, 3200};
  std::string pair = "auto";
  // oracle
  std::string match_path;
  bool cusp = false;
};

struct CommandResult {
  int exit_code = ok;
  std::string document;  //!< file body
  std::string message;   //!< diagnostic for standard error
};

CommandResult cmd_spectrum(const RunConfig& cfg);
CommandResult cmd_wavefunction(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_expansion(const RunConfig& cfg);
CommandResult cmd_oracle(const RunConfig& cfg);

//! Dispatches on cfg.subcommand and maps exceptions onto exit codes.
CommandResult execute(const RunConfig& cfg);

//! Parses argv, runs, writes the document to --output (or `out`) and
//! diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deltaring::cli
