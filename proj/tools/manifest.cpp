#include "manifest.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/io.hpp"

#include <algorithm>

namespace fairtopo::cli {

namespace fs = std::filesystem;

namespace {

std::string strip_brackets(std::string s) {
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  return s;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += ',';
    out += parts[k];
  }
  return out;
}

nlohmann::ordered_json digest_path(const fs::path& p) {
  nlohmann::ordered_json entry;
  entry["path"] = p.string();
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    nlohmann::ordered_json digests = nlohmann::ordered_json::object();
    for (const auto& f : files) digests[f.filename().string()] = io::sha256_file(f);
    entry["files"] = digests;
  } else {
    entry["sha256"] = io::sha256_file(p);
  }
  return entry;
}

}  // namespace

bool is_meta_option(const std::string& name) {
  return name == "help" || name == "config" || name == "manifest" || name == "version";
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "fair-topo";
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["cwd"] = cwd;
  j["config"] = config;
  j["seeds"] = seeds;
  j["inputs"] = inputs;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::vector<std::string>>();
    m.config = j.at("config");
    m.seeds = j.value("seeds", nlohmann::json::object());
    m.inputs = j.value("inputs", nlohmann::json::object());
    m.version = j.value("version", "");
    m.cwd = j.value("cwd", "");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest collect_manifest(const CLI::App& app, const std::vector<std::string>& path,
                             const std::set<std::string>& input_files, const std::string& version) {
  RunManifest m;
  m.subcommand = path;
  m.version = version;
  m.cwd = fs::current_path().string();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || is_meta_option(name)) continue;
    if (opt->get_expected_min() == 0) {
      m.config[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      value = join(opt->results());
    } else {
      value = strip_brackets(opt->get_default_str());
      if (value.empty()) continue;
    }
    m.config[name] = value;
    if (name == "seed") m.seeds[name] = value;
    if (input_files.count(name) != 0) m.inputs[name] = digest_path(value);
  }
  return m;
}

std::vector<std::string> replay_arguments(
    const RunManifest& m, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::string> args = m.subcommand;
  for (const auto& [name, value] : m.config.items()) {
    std::string text;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + name);
      continue;
    }
    text = value.get<std::string>();
    for (const auto& [key, replacement] : overrides)
      if (key == name) text = replacement;
    args.push_back("--" + name);
    args.push_back(text);
  }
  return args;
}

void verify_inputs(const RunManifest& m) {
  for (const auto& [name, entry] : m.inputs.items()) {
    const fs::path p = entry.at("path").get<std::string>();
    if (!fs::exists(p)) throw IoError("input '" + name + "' (" + p.string() + ") is missing");
    const auto now = nlohmann::json::parse(digest_path(p).dump());
    if (now != nlohmann::json::parse(entry.dump())) {
      throw IoError("input '" + name + "' (" + p.string() + ") changed since the manifest was written");
    }
  }
}

}  // namespace fairtopo::cli
