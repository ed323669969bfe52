#include "tarepair/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "tarepair/error.hpp"

namespace tarepair::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string rtrim(std::string_view s) {
  std::size_t e = s.size();
  while (e > 0 && is_space(s[e - 1])) --e;
  return std::string(s.substr(0, e));
}

std::string leading_ws(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return std::string(s.substr(0, i));
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string strip_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!is_space(c)) out.push_back(c);
  return out;
}

bool starts_with_word(std::string_view s, std::string_view word) {
  if (s.substr(0, word.size()) != word) return false;
  return s.size() == word.size() || !is_ident_char(s[word.size()]);
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '"':
      case '\'':
        quote = c;
        break;
      case '(':
      case '[':
      case '{':
        ++depth;
        break;
      case ')':
      case ']':
      case '}':
        --depth;
        break;
      default:
        if (c == sep && depth == 0) {
          out.push_back(trim(s.substr(start, i - start)));
          start = i + 1;
        }
    }
  }
  std::string last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

std::size_t match_bracket(std::string_view s, std::size_t open) {
  if (open >= s.size()) return std::string_view::npos;
  char o = s[open];
  char c = o == '(' ? ')' : o == '[' ? ']' : o == '{' ? '}' : 0;
  if (!c) return std::string_view::npos;
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char ch = s[i];
    if (quote) {
      if (ch == '\\') {
        ++i;
      } else if (ch == quote) {
        quote = 0;
      }
      continue;
    }
    if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == o) {
      ++depth;
    } else if (ch == c) {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

std::vector<std::string> identifiers(std::string_view s) {
  std::vector<std::string> out;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      continue;
    }
    if (is_ident_start(c) && (i == 0 || !is_ident_char(s[i - 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j - 1;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      // skip numeric literals such as 0x55 so "x55" is not an identifier
      while (i + 1 < s.size() && is_ident_char(s[i + 1])) ++i;
    }
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string replace_expr(std::string_view s, std::string_view from, std::string_view to) {
  std::string needle = strip_ws(from);
  if (needle.empty()) return std::string(s);
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    bool boundary_before = i == 0 || !is_ident_char(needle[0]) ||
                           !(is_ident_char(s[i - 1]) || s[i - 1] == '.');
    if (boundary_before && s[i] == needle[0]) {
      std::size_t j = i;
      std::size_t k = 0;
      while (j < s.size() && k < needle.size()) {
        if (is_space(s[j]) && k > 0) {
          ++j;
          continue;
        }
        if (s[j] != needle[k]) break;
        ++j;
        ++k;
      }
      bool boundary_after =
          j >= s.size() || !is_ident_char(s[j]) || !is_ident_char(needle.back());
      if (k == needle.size() && boundary_after) {
        out.append(to);
        i = j;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < s.size()) out.emplace_back(s.substr(start));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view raw) {
  std::string s = trim(raw);
  while (!s.empty() && (s.back() == 'u' || s.back() == 'U' || s.back() == 'l' || s.back() == 'L'))
    s.pop_back();
  if (s.empty()) return std::nullopt;
  int base = 10;
  std::size_t i = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    i = 2;
  } else if (s.size() > 1 && s[0] == '0') {
    base = 8;
    i = 1;
  }
  std::int64_t v = 0;
  for (; i < s.size(); ++i) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = 10 + (c - 'a');
    } else {
      return std::nullopt;
    }
    if (d >= base) return std::nullopt;
    v = v * base + d;
  }
  return v;
}

bool is_c_keyword(std::string_view s) {
  static const std::set<std::string, std::less<>> kw = {
      "auto",     "break",  "case",    "char",   "const",    "continue", "default",
      "do",       "double", "else",    "enum",   "extern",   "float",    "for",
      "goto",     "if",     "inline",  "int",    "long",     "register", "restrict",
      "return",   "short",  "signed",  "sizeof", "static",   "struct",   "switch",
      "typedef",  "union",  "unsigned", "void",  "volatile", "while",    "_Bool",
      "bool",     "NULL"};
  return kw.count(s) != 0;
}

std::string to_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xF]);
  }
  return out;
}

std::optional<std::string> from_hex(std::string_view hex) {
  if (hex.size() % 2) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    auto hi = parse_int(std::string("0x") + std::string(hex.substr(i, 2)));
    if (!hi) return std::nullopt;
    out.push_back(static_cast<char>(*hi));
  }
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace tarepair::text
