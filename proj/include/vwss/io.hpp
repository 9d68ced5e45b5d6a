#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vwss::io {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Lowercase hex SHA-256 of a file's contents (streamed).
std::string sha256_hex_file(const std::filesystem::path& path);

std::string read_file_text(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory followed by an atomic
/// rename, so readers never observe a half-written file.
void atomic_write_text(const std::filesystem::path& path,
                       std::string_view content);

/// Splits one CSV line on commas. No quoting support — every file this tool
/// reads or writes is plain numeric CSV. A trailing '\r' (CRLF input) is
/// stripped first.
std::vector<std::string> split_csv_line(std::string_view line);

/// Splits text into lines on '\n', dropping a final empty fragment after a
/// trailing newline. A UTF-8 BOM on the first line is removed.
std::vector<std::string> split_lines(std::string_view text);

/// Shortest text form that round-trips the exact double ("%.17g" width).
std::string format_double(double v);

/// Strict double parse; `where` names the file location for the error text.
double parse_double(std::string_view field, const std::string& where);

/// Strict nonnegative integer parse, same error convention.
std::size_t parse_index(std::string_view field, const std::string& where);

/// Provenance record for one CLI run: the command, its parameters, and
/// content digests of every input consumed plus the paths written.
/// Deliberately contains nothing volatile (no timestamps, no hostnames) so
/// identical runs produce identical manifests.
struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)
  std::vector<std::string> outputs;

  void add_input(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Serializes next to the run's outputs, atomically.
  void write(const std::filesystem::path& path) const;
};

}  // namespace vwss::io
