#include "fairtopo/ingest.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

namespace fairtopo {

namespace {

constexpr int kDemocraticCode = 100;
constexpr int kRepublicanCode = 200;

// Splits one CSV record, honouring double quotes ("" escapes a quote).
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path.string() + " for reading");
    std::string line;
    if (!next_line(line)) throw IoError(path.string() + ": missing header row");
    header_ = split_record(line);
    for (std::size_t k = 0; k < header_.size(); ++k) index_[header_[k]] = k;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    const auto col = find(name);
    if (!col) throw IoError(path_.string() + ":1: missing column '" + name + "'");
    return *col;
  }

  // Next non-empty record; false at end of file.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      fields = split_record(line);
      if (fields.size() != header_.size()) {
        throw IoError(path_.string() + ":" + std::to_string(line_no_) + ": record has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header_.size()));
      }
      return true;
    }
    return false;
  }

  long long integer(const std::vector<std::string>& fields, std::size_t col) const {
    const std::string& s = fields[col];
    // Some exports write integral codes as 1.0.
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || value != static_cast<long long>(value)) {
      throw IoError(path_.string() + ":" + std::to_string(line_no_) + ":" + std::to_string(col + 1) +
                    ": expected an integer in column '" + header_[col] + "', got '" + s + "'");
    }
    return static_cast<long long>(value);
  }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t line_no_ = 0;
};

struct Member {
  long long icpsr = 0;
  std::string state;
  int party = 0;
  bool president = false;
};

int party_group(int party_code) {
  if (party_code == kDemocraticCode) return kDemocratic;
  if (party_code == kRepublicanCode) return kRepublican;
  return kMixed;
}

}  // namespace

int cast_code_value(int cast_code) {
  if (cast_code >= 1 && cast_code <= 3) return 1;
  if (cast_code >= 4 && cast_code <= 6) return -1;
  return 0;
}

SenateDataset ingest_rollcalls(const std::filesystem::path& votes_file,
                               const std::filesystem::path& members_file, int congress) {
  SenateDataset d;
  d.congress = congress;

  std::vector<Member> members;
  {
    CsvReader reader(members_file);
    const auto c_congress = reader.require("congress");
    const auto c_chamber = reader.require("chamber");
    const auto c_icpsr = reader.require("icpsr");
    const auto c_state = reader.require("state_abbrev");
    const auto c_party = reader.require("party_code");
    std::set<long long> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (reader.integer(f, c_congress) != congress) continue;
      const bool president = f[c_chamber] == "President";
      if (!president && f[c_chamber] != "Senate") continue;
      const long long icpsr = reader.integer(f, c_icpsr);
      if (!seen.insert(icpsr).second) continue;
      members.push_back({icpsr, f[c_state], static_cast<int>(reader.integer(f, c_party)), president});
    }
  }

  // Roll calls and per-member votes for this congress.
  std::set<int> rolls;
  std::map<std::pair<long long, int>, int> votes;
  std::unordered_map<long long, int> cast_count;
  {
    CsvReader reader(votes_file);
    const auto c_congress = reader.require("congress");
    const auto c_roll = reader.require("rollnumber");
    const auto c_icpsr = reader.require("icpsr");
    const auto c_cast = reader.require("cast_code");
    const auto c_chamber = reader.find("chamber");
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (reader.integer(f, c_congress) != congress) continue;
      if (c_chamber && f[*c_chamber] != "Senate" && f[*c_chamber] != "President") continue;
      const int roll = static_cast<int>(reader.integer(f, c_roll));
      const long long icpsr = reader.integer(f, c_icpsr);
      const int cast = static_cast<int>(reader.integer(f, c_cast));
      if (!c_chamber || f[*c_chamber] == "Senate") rolls.insert(roll);
      votes[{icpsr, roll}] = cast_code_value(cast);
      if (cast >= 1 && cast <= 6) ++cast_count[icpsr];
    }
  }
  if (rolls.empty()) {
    throw DomainError("no senate roll calls found for congress " + std::to_string(congress));
  }

  auto by_activity = [&cast_count](const Member& a, const Member& b) {
    const int ca = cast_count.count(a.icpsr) ? cast_count.at(a.icpsr) : 0;
    const int cb = cast_count.count(b.icpsr) ? cast_count.at(b.icpsr) : 0;
    if (ca != cb) return ca > cb;
    return a.icpsr < b.icpsr;
  };

  std::vector<Member> presidents;
  std::map<std::string, std::vector<Member>> states;
  for (const auto& m : members) {
    if (m.president) {
      presidents.push_back(m);
    } else {
      states[m.state].push_back(m);
    }
  }
  if (presidents.empty()) {
    throw DomainError("no President listed in the member file for congress " +
                      std::to_string(congress));
  }
  std::sort(presidents.begin(), presidents.end(), by_activity);
  if (presidents.size() > 1) {
    d.notes.push_back("several Presidents in congress " + std::to_string(congress) +
                      "; using icpsr " + std::to_string(presidents.front().icpsr));
  }

  d.roll_numbers.assign(rolls.begin(), rolls.end());
  std::unordered_map<int, Eigen::Index> column;
  for (std::size_t k = 0; k < d.roll_numbers.size(); ++k)
    column[d.roll_numbers[k]] = static_cast<Eigen::Index>(k);

  const auto node_count = static_cast<Eigen::Index>(1 + states.size());
  d.x = Matrix::Zero(node_count, static_cast<Eigen::Index>(d.roll_numbers.size()));
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(node_count));

  auto add_votes = [&](Eigen::Index row, long long icpsr) {
    for (auto it = votes.lower_bound({icpsr, std::numeric_limits<int>::min()}); it != votes.end() && it->first.first == icpsr;
         ++it) {
      const auto col = column.find(it->first.second);
      if (col != column.end()) d.x(row, col->second) += it->second;
    }
  };

  const Member& president = presidents.front();
  add_votes(0, president.icpsr);
  d.node_names.push_back("President");
  if (president.party != kDemocraticCode && president.party != kRepublicanCode) {
    d.notes.push_back("President has party code " + std::to_string(president.party) +
                      "; labeled Mixed");
  }
  labels.push_back(party_group(president.party));

  Eigen::Index row = 1;
  for (auto& [state, senators] : states) {
    std::sort(senators.begin(), senators.end(), by_activity);
    if (senators.size() > 2) {
      d.notes.push_back(state + " has " + std::to_string(senators.size()) +
                        " senators; kept the two with the most recorded votes");
      senators.resize(2);
    } else if (senators.size() < 2) {
      d.notes.push_back(state + " has only one senator");
    }
    int group = party_group(senators.front().party);
    for (const auto& s : senators) {
      add_votes(row, s.icpsr);
      if (s.party != kDemocraticCode && s.party != kRepublicanCode) {
        d.notes.push_back(state + " senator icpsr " + std::to_string(s.icpsr) + " has party code " +
                          std::to_string(s.party) + "; state labeled Mixed");
      }
      if (party_group(s.party) != group) group = kMixed;
    }
    d.node_names.push_back(state);
    labels.push_back(group);
    ++row;
  }

  int group_count = 0;
  for (int g : labels) group_count = std::max(group_count, g + 1);
  d.groups = GroupAssignment(std::move(labels), group_count);
  return d;
}

void export_dataset(const SenateDataset& d, const std::filesystem::path& dir) {
  io::ensure_directory(dir);
  io::write_matrix_csv(dir / "signals.csv", d.x);
  io::write_groups_csv(dir / "groups.csv", d.groups);
  std::string names = "node,name\n";
  for (std::size_t k = 0; k < d.node_names.size(); ++k)
    names += std::to_string(k) + ',' + d.node_names[k] + '\n';
  io::write_text(dir / "nodes.csv", names);
}

LoadedSignals load_dataset(const std::filesystem::path& dir) {
  Matrix x = io::read_matrix_csv(dir / "signals.csv");
  GroupAssignment groups = io::read_groups_csv(dir / "groups.csv");
  if (groups.size() != x.rows()) {
    throw IoError(dir.string() + ": signals have " + std::to_string(x.rows()) +
                  " rows but groups list " + std::to_string(groups.size()) + " nodes");
  }
  return {std::move(x), std::move(groups)};
}

}  // namespace fairtopo
