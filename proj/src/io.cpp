#include "fairtopo/io.hpp"

#include "fairtopo/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

namespace fairtopo::io {

namespace {

std::string where(const fs::path& path, std::size_t line, std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read error on " + path.string());
  // Trailing blank lines carry no data.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based character position of the field start
};

std::vector<Field> split(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    fields.push_back({line.substr(start, end - start), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(const Field& f, const fs::path& path, std::size_t line) {
  std::string_view t = trim(f.text);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw IoError(where(path, line, f.column) + ": expected a number, got '" +
                  std::string(f.text) + "'");
  }
  return value;
}

long long parse_integer(const Field& f, const fs::path& path, std::size_t line) {
  const std::string_view t = trim(f.text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw IoError(where(path, line, f.column) + ": expected an integer, got '" +
                  std::string(f.text) + "'");
  }
  return value;
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write error on " + path.string());
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0 into 0
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw IoError("cannot format a number");
  return std::string(buf.data(), ptr);
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": file has no rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto fields = split(lines[l]);
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw IoError(where(path, l + 1, 1) + ": row has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(rows.front().size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, l + 1));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string text;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) text += ',';
      text += format_double(m(i, j));
    }
    text += '\n';
  }
  write_file(path, text);
}

AdjacencyMatrix read_adjacency_csv(const fs::path& path) {
  Matrix m = read_matrix_csv(path);
  if (m.rows() != m.cols()) {
    throw IoError(path.string() + ": adjacency must be square, got " + std::to_string(m.rows()) +
                  "x" + std::to_string(m.cols()));
  }
  return AdjacencyMatrix(std::move(m));
}

GroupAssignment read_groups_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": missing header `node,group`");
  {
    const auto header = split(lines.front());
    if (header.size() != 2 || trim(header[0].text) != "node" || trim(header[1].text) != "group") {
      throw IoError(where(path, 1, 1) + ": expected header `node,group`");
    }
  }
  const std::size_t n = lines.size() - 1;
  if (n == 0) throw IoError(path.string() + ": no group rows");
  std::vector<int> labels(n, -1);
  int group_count = 0;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split(lines[l]);
    if (fields.size() != 2) {
      throw IoError(where(path, l + 1, 1) + ": expected 2 fields, got " +
                    std::to_string(fields.size()));
    }
    const long long node = parse_integer(fields[0], path, l + 1);
    const long long group = parse_integer(fields[1], path, l + 1);
    if (node < 0 || node >= static_cast<long long>(n)) {
      throw IoError(where(path, l + 1, fields[0].column) + ": node id " + std::to_string(node) +
                    " outside [0, " + std::to_string(n) + ")");
    }
    if (group < 0 || group > 1'000'000) {
      throw IoError(where(path, l + 1, fields[1].column) + ": invalid group id " +
                    std::to_string(group));
    }
    auto& slot = labels[static_cast<std::size_t>(node)];
    if (slot != -1) {
      throw IoError(where(path, l + 1, fields[0].column) + ": node " + std::to_string(node) +
                    " listed twice");
    }
    slot = static_cast<int>(group);
    group_count = std::max(group_count, static_cast<int>(group) + 1);
  }
  return GroupAssignment(std::move(labels), group_count);
}

void write_groups_csv(const fs::path& path, const GroupAssignment& groups) {
  std::string text = "node,group\n";
  for (int i = 0; i < groups.size(); ++i)
    text += std::to_string(i) + ',' + std::to_string(groups.label(i)) + '\n';
  write_file(path, text);
}

void write_triplets_csv(const fs::path& path, const Matrix& m) {
  std::string text = "row,col,value\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0)
        text += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(m(i, j)) + '\n';
  write_file(path, text);
}

void write_vector_csv(const fs::path& path, const Vector& v) {
  std::string text;
  for (Eigen::Index i = 0; i < v.size(); ++i) text += format_double(v(i)) + '\n';
  write_file(path, text);
}

std::string Table::to_csv() const {
  std::string text;
  auto append = [&text](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) text += ',';
      text += cells[k];
    }
    text += '\n';
  };
  append(header);
  for (const auto& row : rows) append(row);
  return text;
}

void write_table_csv(const fs::path& path, const Table& table) { write_file(path, table.to_csv()); }

Table read_table_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": missing header line");
  Table table;
  for (const auto& f : split(lines.front())) table.header.emplace_back(trim(f.text));
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split(lines[l]);
    if (fields.size() != table.header.size()) {
      throw IoError(where(path, l + 1, 1) + ": row has " + std::to_string(fields.size()) +
                    " fields, header has " + std::to_string(table.header.size()));
    }
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.emplace_back(trim(f.text));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, std::string_view text) { write_file(path, text); }

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int k = 0; k < length; ++k) {
    hex += kHex[digest[k] >> 4];
    hex += kHex[digest[k] & 0xf];
  }
  return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

}  // namespace fairtopo::io
