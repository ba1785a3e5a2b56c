#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qwlift::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericError = 3,
  kClaimFailed = 4,
};

struct RunConfig {
  std::string command;
  std::vector<std::string> graph_paths;
  std::string coin = "fourier";  // or a path to a coin matrix file
  std::string start = "0,0";     // "k,v"; k may be L/R on 2-regular graphs
  std::string state_path;        // full state, overrides start
  double epsilon = 0.25;
  std::optional<std::size_t> horizon;
  std::uint64_t seed = 1;
  std::string output;  // empty: stdout
  std::string format = "json";
  std::size_t root = 0;
  std::string target = "pi-q";    // pi-q | uniform
  std::string bridge = "maxflow"; // maxflow | tree
  std::string chain = "lazy";     // simple | lazy
  bool timings = false;
  std::vector<std::size_t> sizes{5, 9, 17, 33};
  std::size_t samples = 100'000;
};

// Runs one command, writing the artifact to config.output (or `out`) and
// diagnostics to `err`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and calls run().
int main_entry(int argc, char** argv);

}  // namespace qwlift::cli
