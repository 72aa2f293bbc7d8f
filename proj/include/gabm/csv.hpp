#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gabm::csv {

// RFC 4180 quoting: fields containing commas, quotes or newlines are
// quoted, embedded quotes doubled.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Parses full CSV text (handles quoted fields spanning lines). Lines whose
// first character is '#' are provenance/comment lines and are skipped.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace gabm::csv
