#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerificationFailed = 2;

struct RunConfig {
  std::string command;  // solve | barycenter | maxprinc | angles | steiner-ratio | t-tensor | hgraph-sweep | counterexample | linfty
  std::string input;
  std::string output;  // empty: stdout
  std::string csv;     // optional plot data
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<std::size_t> grid_res;
  std::size_t samples_per_edge = 21;
  std::size_t jobs = 1;
  std::string labeling = "standard";
  std::optional<double> lambda;
  std::string functional = "neg-entropy";  // neg-entropy | power:<m>
  std::optional<std::size_t> count;        // corpus size for generated runs
  std::string topology = "auto";           // auto | full | all
  std::string method = "exact";            // barycenter: exact | free
  std::vector<double> sigmas;
  std::size_t dim = 1;
  int verbosity = 0;
};

/// Executes one command. Returns kExitOk, kExitVerificationFailed when a
/// checked property fails, or kExitError (message on `log`) on bad input.
int run(const RunConfig& config, std::ostream& log);

/// Parses argv into a RunConfig and runs it.
int main_entry(int argc, char** argv);

}  // namespace wnet::cli
