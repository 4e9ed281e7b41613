#ifndef DMOE_CLI_IO_HPP
#define DMOE_CLI_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dmoe::cli {

/// A CSV file with a header row. Quoted fields with embedded commas or
/// doubled quotes are supported; embedded newlines are not.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of every row

  /// Column position by name; throws InvalidInput naming the file if absent.
  int column(std::string_view name) const;
  std::string source;
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double value);

/// Parses a full-string decimal number; returns false on any trailing junk.
bool parse_double(std::string_view text, double& out);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Comma-separated list, whitespace trimmed, empty items dropped.
std::vector<std::string> split_list(std::string_view text);

}  // namespace dmoe::cli

#endif
