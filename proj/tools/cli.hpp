#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravomg/hierarchy_config.hpp"
#include "gravomg/mesh_io.hpp"
#include "gravomg/operators.hpp"
#include "gravomg/solver.hpp"

namespace gravomg::cli {

enum ExitCode : int {
  kOk = 0,
  kParseFailure = 2,
  kDegenerateInput = 3,
  kZeroDiagonal = 4,
  kOracleSize = 5,
};

/// Largest system the dense oracle will factor.
inline constexpr Index kOracleLimit = 5000;

/// Everything a run depends on. Saved as manifest.json next to the outputs;
/// loading it back with --manifest repeats the run.
struct RunManifest {
  std::string command = "solve";  // hierarchy | solve | ablate | oracle
  std::string input;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  int knn = kDefaultKnn;
  ProblemSpec problem;
  std::string input_function;  // one value per line; replaces the N(0,1) draw
  std::string system_matrix;   // Matrix Market file replacing the assembled matrix
  HierarchyConfig hierarchy;
  SolverConfig solver;
  std::string axis = "sampling";  // ablate only
  bool export_levels = false;
  bool export_matrices = false;
  bool zero_timings = false;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);
/// Missing keys keep their defaults. Throws ParseError on unknown names.
RunManifest manifest_from_json(const nlohmann::json& json);
RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Runs a resolved manifest and maps failures to exit codes.
int execute(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Parses `gravomg <command> [input] [flags]` (args excludes the program
/// name) and executes it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gravomg::cli
