#pragma once

#include <string>
#include <vector>

namespace cvboost::csv {

// RFC-4180 reader: quoted fields, "" escapes, embedded newlines, CRLF or LF
// records. Unquoted fields are trimmed of surrounding ASCII blanks so files
// written with ", " separators parse cleanly; quoted fields are verbatim.
std::vector<std::vector<std::string>> read_file(const std::string& path);
std::vector<std::vector<std::string>> parse(const std::string& text);

// Quotes a field only when it contains a comma, quote, or newline.
std::string quote_field(const std::string& field);
std::string format_row(const std::vector<std::string>& fields);

// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double value);

}  // namespace cvboost::csv
