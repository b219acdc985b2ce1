#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracflow::csv {

struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> find(std::string_view name) const;
  /// Index of a header column; throws Error naming the file context.
  std::size_t require(std::string_view name, std::string_view context) const;
};

/// RFC-4180 parser: quoted fields, doubled quotes, CRLF or LF endings.
Document parse(std::string_view text);
Document read_file(const std::string& path);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_file(const std::string& path, const Document& doc);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace fracflow::csv
