#pragma once

#include "fairtopo/graph.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fairtopo {

// Group ids used for the senate dataset.
inline constexpr int kDemocratic = 0;
inline constexpr int kRepublican = 1;
inline constexpr int kMixed = 2;

struct SenateDataset {
  // One row per node (the President first, then states in alphabetical order
  // of their postal code), one column per roll call in increasing roll number.
  Matrix x;
  GroupAssignment groups{{0}, 1};
  std::vector<std::string> node_names;
  std::vector<int> roll_numbers;
  int congress = 0;
  // Human-readable notes about policy decisions taken during ingestion
  // (replaced senators, unknown party codes).
  std::vector<std::string> notes;

  int node_count() const { return static_cast<int>(x.rows()); }
  int vote_count() const { return static_cast<int>(x.cols()); }
};

// Maps a roll-call cast code to the +1 / -1 / 0 coding.
int cast_code_value(int cast_code);

// Parses roll-call files in the public member/vote schema. Columns are found
// by header name: the member file needs congress, chamber, icpsr,
// state_abbrev and party_code; the vote file needs congress, rollnumber,
// icpsr and cast_code (chamber is used when present). Quoted fields are
// supported. Throws IoError on unreadable or malformed files and DomainError
// when the congress has no senate roll calls or no President.
SenateDataset ingest_rollcalls(const std::filesystem::path& votes_file,
                               const std::filesystem::path& members_file, int congress);

// Writes signals.csv (N x M), groups.csv and nodes.csv (`node,name`).
void export_dataset(const SenateDataset& d, const std::filesystem::path& dir);

struct LoadedSignals {
  Matrix x;
  GroupAssignment groups;
};

// Reads signals.csv and groups.csv back from a directory written by
// export_dataset (or prepared by hand in the same layout).
LoadedSignals load_dataset(const std::filesystem::path& dir);

}  // namespace fairtopo
