#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dante::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Column index by name; nullopt if absent.
  std::optional<std::size_t> column(std::string_view name) const;
  // Column index by name; throws DataError naming `what` if absent.
  std::size_t require(std::string_view name, std::string_view what) const;
};

std::string read_file(const std::filesystem::path& path);
Table parse(const std::string& text);
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);
std::string_view trim(std::string_view s);

// Strict parses: the whole (trimmed) field must be consumed. `NA` and blanks give nullopt.
std::optional<double> to_double(std::string_view field);
std::optional<long> to_long(std::string_view field);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace dante::csv
