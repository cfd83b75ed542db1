#pragma once

#include "fairtopo/graph.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairtopo::io {

namespace fs = std::filesystem;

// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

// Header-less CSV of reals, one matrix row per line. Every row must have the
// same number of fields. Parse failures throw IoError naming path, line and
// column.
Matrix read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const Matrix& m);

// Adjacency CSV: a square matrix file, validated as an AdjacencyMatrix.
AdjacencyMatrix read_adjacency_csv(const fs::path& path);

// Groups CSV with header `node,group`; every node 0..N-1 appears exactly once
// (any row order). G is one more than the largest group id.
GroupAssignment read_groups_csv(const fs::path& path);
void write_groups_csv(const fs::path& path, const GroupAssignment& groups);

// Nonzero entries as `row,col,value` lines under that header.
void write_triplets_csv(const fs::path& path, const Matrix& m);
void write_vector_csv(const fs::path& path, const Vector& v);

// A table with a header line and numeric cells. Empty optional cells are
// written as empty fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::string to_csv() const;
};
void write_table_csv(const fs::path& path, const Table& table);
// Reads a CSV with a header line into string cells; quoting is not supported.
Table read_table_csv(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
void ensure_directory(const fs::path& dir);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace fairtopo::io
