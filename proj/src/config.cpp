#include "tarepair/config.hpp"

#include <map>
#include <regex>
#include <vector>

#include "tarepair/error.hpp"
#include "tarepair/text.hpp"

namespace tarepair {

namespace {

// Regex over the raw source text: `*` is a decimal index and whitespace may
// appear between any two tokens of the pattern.
std::regex compile(std::string_view pattern) {
  std::string p = text::strip_ws(pattern);
  std::string re;
  for (std::size_t i = 0; i < p.size(); ++i) {
    char c = p[i];
    if (i) re += "\\s*";
    if (c == '*') {
      re += "\\d+";
    } else if (std::string_view(".[]()\\^$|?+{}").find(c) != std::string_view::npos) {
      re += '\\';
      re += c;
    } else {
      re += c;
    }
  }
  // identifier boundary on the left
  return std::regex("(^|[^A-Za-z0-9_.])(" + re + ")");
}

std::string find_with(std::string_view pattern, std::string_view expr) {
  thread_local std::map<std::string, std::regex, std::less<>> cache;
  auto it = cache.find(pattern);
  if (it == cache.end()) it = cache.emplace(std::string(pattern), compile(pattern)).first;
  const std::regex& re = it->second;
  std::string s(expr);
  std::smatch m;
  if (std::regex_search(s, m, re)) return m[2].str();
  return {};
}

std::set<std::string> parse_set(const std::string& v) {
  std::set<std::string> out;
  for (auto& part : text::split_top_level(v, ','))
    if (!part.empty()) out.insert(part);
  return out;
}

}  // namespace

void FunctionClassification::check_disjoint() const {
  std::vector<std::pair<std::string, const std::set<std::string>*>> sets = {
      {"copy", &copy_fns},   {"snprint", &snprint_fns}, {"enc", &enc_fns},
      {"hash", &hash_fns},   {"read", &read_fns},       {"write", &write_fns},
      {"malloc", &malloc_fns}, {"compare", &compare_fns}};
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      for (const auto& n : *sets[i].second)
        if (sets[j].second->count(n))
          throw ConfigError("function '" + n + "' classified as both " + sets[i].first + " and " +
                            sets[j].first);
}

bool FunctionClassification::matches_output(std::string_view expr) const {
  return !find_output(expr).empty();
}
bool FunctionClassification::matches_input(std::string_view expr) const {
  return !find_input(expr).empty();
}
bool FunctionClassification::matches_shared(std::string_view expr) const {
  return !find_shared(expr).empty();
}

std::string FunctionClassification::find_shared(std::string_view expr) const {
  return find_with(shared_mem_pattern, expr);
}
std::string FunctionClassification::find_output(std::string_view expr) const {
  return find_with(output_param_pattern, expr);
}
std::string FunctionClassification::find_input(std::string_view expr) const {
  return find_with(input_param_pattern, expr);
}

std::string_view FunctionClassification::category(std::string_view fn) const {
  std::string f(fn);
  if (copy_fns.count(f)) return "copy";
  if (snprint_fns.count(f)) return "snprint";
  if (enc_fns.count(f)) return "enc";
  if (hash_fns.count(f)) return "hash";
  if (read_fns.count(f)) return "read";
  if (write_fns.count(f)) return "write";
  if (malloc_fns.count(f)) return "malloc";
  if (compare_fns.count(f)) return "compare";
  return "";
}

FunctionClassification parse_classification(std::string_view src) {
  FunctionClassification fc;
  int lineno = 0;
  for (const auto& raw : text::split_lines(src)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = text::trim(std::string_view(line).substr(0, eq));
    std::string val = text::trim(std::string_view(line).substr(eq + 1));
    if (key == "copy") fc.copy_fns = parse_set(val);
    else if (key == "snprint") fc.snprint_fns = parse_set(val);
    else if (key == "enc") fc.enc_fns = parse_set(val);
    else if (key == "hash") fc.hash_fns = parse_set(val);
    else if (key == "read") fc.read_fns = parse_set(val);
    else if (key == "write") fc.write_fns = parse_set(val);
    else if (key == "malloc") fc.malloc_fns = parse_set(val);
    else if (key == "compare") fc.compare_fns = parse_set(val);
    else if (key == "output_param_pattern") fc.output_param_pattern = val;
    else if (key == "input_param_pattern") fc.input_param_pattern = val;
    else if (key == "shared_mem_pattern") fc.shared_mem_pattern = val;
    else if (key == "entry_point") fc.entry_point = val;
    else if (key == "uuid") fc.uuid_override = val;
    else if (key == "lower.copy") fc.lower_copy = val;
    else if (key == "lower.enc") fc.lower_enc = val;
    else if (key == "lower.hash") fc.lower_hash = val;
    else if (key == "lower.read") fc.lower_read = val;
    else if (key == "lower.write") fc.lower_write = val;
    else if (key == "lower.compare") fc.lower_compare = val;
    else if (key == "lower.ecode") fc.lower_ecode = val;
    else if (key == "lower.buffer_type") fc.lower_buffer_type = val;
    else if (key == "lower.hash_len") {
      auto v = text::parse_int(val);
      if (!v || *v <= 0) throw ConfigError("lower.hash_len must be a positive integer");
      fc.hash_len = static_cast<int>(*v);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  fc.check_disjoint();
  return fc;
}

FunctionClassification load_classification(const std::string& path) {
  return parse_classification(text::read_file(path));
}

}  // namespace tarepair
