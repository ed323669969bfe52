#pragma once

// Small string helpers shared by the C model, the detector and the patcher.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tarepair::text {

std::string trim(std::string_view s);
std::string rtrim(std::string_view s);
std::string leading_ws(std::string_view s);

// Collapse internal whitespace runs to one space and trim the ends.
std::string normalize_ws(std::string_view s);

// Remove every whitespace character. Used to compare C expressions.
std::string strip_ws(std::string_view s);

bool starts_with_word(std::string_view s, std::string_view word);

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

// Split on `sep` at parenthesis/bracket/brace depth zero, outside string and
// character literals. Pieces are trimmed.
std::vector<std::string> split_top_level(std::string_view s, char sep = ',');

// Index of the bracket matching the opener at `open`, or npos.
std::size_t match_bracket(std::string_view s, std::size_t open);

// All identifier tokens outside string/char literals.
std::vector<std::string> identifiers(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

// Replace only whole-token occurrences of the C expression `from`
// (whitespace-insensitive match). Returns the rewritten text.
std::string replace_expr(std::string_view s, std::string_view from, std::string_view to);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Parse a C integer literal (decimal, hex, octal, with optional u/l suffixes).
std::optional<std::int64_t> parse_int(std::string_view s);

bool is_c_keyword(std::string_view s);

std::string to_hex(std::string_view bytes);
std::optional<std::string> from_hex(std::string_view hex);

// Stable 64-bit FNV-1a digest, hex encoded.
std::string fnv1a_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace tarepair::text
