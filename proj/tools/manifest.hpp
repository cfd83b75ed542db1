#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace fairtopo::cli {

// Record of one run: the subcommand path, every option value after defaults
// and config files were applied, the seeds, digests of the input files and
// the tool version.
struct RunManifest {
  std::vector<std::string> subcommand;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  std::string version;
  std::string cwd;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Options that never enter a manifest (help, config file, manifest path).
bool is_meta_option(const std::string& name);

// Collects the resolved options of `app` (a leaf subcommand). Vector values
// are stored comma-joined, flags as booleans. Options named in `input_files`
// get SHA-256 digests of the files they point at (every regular file for a
// directory).
RunManifest collect_manifest(const CLI::App& app, const std::vector<std::string>& path,
                             const std::set<std::string>& input_files, const std::string& version);

// Command line that re-runs the manifest, with option values replaced by
// `overrides` (option name -> value).
std::vector<std::string> replay_arguments(
    const RunManifest& m, const std::vector<std::pair<std::string, std::string>>& overrides);

// Throws IoError if any recorded input file is missing or has changed.
void verify_inputs(const RunManifest& m);

}  // namespace fairtopo::cli
