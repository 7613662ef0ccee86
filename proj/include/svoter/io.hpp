#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace svoter::io {

/// Decimal with 17 significant digits (round-trips every double).
std::string format_double(double x);
/// Shortest decimal that round-trips.
std::string format_shortest(double x);

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// RFC-4180 CSV with LF line endings and UTF-8 text.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<Cell>& cells);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  static std::string escape(std::string_view field);
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace svoter::io
