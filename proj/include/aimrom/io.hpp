#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aimrom/linalg.hpp"

namespace aimrom {

// Shortest decimal that round-trips.
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);  // MissingArtifact when absent
void write_file(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  Mat values;

  int column(const std::string& name) const;  // -1 if absent
  Vec col(const std::string& name) const;
};

std::string csv_string(const std::vector<std::string>& header, const Mat& values);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Mat& values);
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

// Header t, u@x_0, ..., u@x_N.
std::vector<std::string> field_header(const Vec& grid_points);

}  // namespace aimrom
