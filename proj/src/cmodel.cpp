#include "tarepair/cmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "tarepair/text.hpp"

namespace tarepair::cmodel {

namespace {

using text::is_ident_char;
using text::is_ident_start;

// Source with comments blanked out (newlines kept) so offsets line up with
// the original, plus a mask of bytes inside string/char literals.
struct Cleaned {
  std::string text;
  std::vector<bool> in_lit;
};

Cleaned clean_source(std::string_view src) {
  Cleaned c{std::string(src), std::vector<bool>(src.size(), false)};
  std::string& s = c.text;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') s[i++] = ' ';
    } else if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      s[i] = s[i + 1] = ' ';
      i += 2;
      while (i < s.size() && !(s[i] == '*' && i + 1 < s.size() && s[i + 1] == '/')) {
        if (s[i] != '\n') s[i] = ' ';
        ++i;
      }
      if (i < s.size()) {
        s[i] = s[i + 1] = ' ';
        i += 2;
      }
    } else if (s[i] == '"' || s[i] == '\'') {
      char q = s[i++];
      while (i < s.size() && s[i] != q && s[i] != '\n') {
        c.in_lit[i] = true;
        if (s[i] == '\\' && i + 1 < s.size()) c.in_lit[++i] = true;
        ++i;
      }
      ++i;
    } else {
      ++i;
    }
  }
  return c;
}

int type_size(const std::string& type) {
  static const std::map<std::string, int> sizes = {
      {"char", 1},     {"int8_t", 1},   {"uint8_t", 1},  {"bool", 1},     {"short", 2},
      {"int16_t", 2},  {"uint16_t", 2}, {"int", 4},      {"int32_t", 4},  {"uint32_t", 4},
      {"float", 4},    {"TEE_Result", 4}, {"long", 8},   {"int64_t", 8},  {"uint64_t", 8},
      {"double", 8},   {"size_t", 8}};
  std::string last;
  for (auto& w : text::identifiers(type))
    if (w != "const" && w != "unsigned" && w != "signed" && w != "static" && w != "volatile") last = w;
  if (last.empty() && type.find("unsigned") != std::string::npos) last = "int";
  auto it = sizes.find(last);
  return it == sizes.end() ? 0 : it->second;
}

bool is_type_start(const std::string& w) {
  static const std::set<std::string> not_types = {
      "return", "goto", "case", "default", "break", "continue", "if", "else", "while", "for",
      "do", "switch", "sizeof", "typedef", "struct", "union", "enum"};
  return !not_types.count(w);
}

// Count of top-level items in an initializer list `{a, b, c}`.
std::optional<std::int64_t> init_list_count(const std::string& init) {
  std::string t = text::trim(init);
  if (t.size() < 2 || t.front() != '{' || t.back() != '}') return std::nullopt;
  std::string inner = text::trim(std::string_view(t).substr(1, t.size() - 2));
  if (inner.empty()) return std::nullopt;
  auto parts = text::split_top_level(inner, ',');
  if (!parts.empty() && parts.back().empty()) parts.pop_back();
  return static_cast<std::int64_t>(parts.size());
}

std::optional<std::int64_t> string_literal_length(const std::string& init) {
  std::string t = text::trim(init);
  if (t.size() < 2 || t.front() != '"' || t.back() != '"') return std::nullopt;
  std::int64_t n = 0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] == '\\') ++i;
    ++n;
  }
  return n + 1;
}

struct Declarator {
  std::string name;
  DeclKind kind = DeclKind::Scalar;
  std::string type;
  std::string length_text;
  std::string init;
};

// Parse `T a[N] = x, *b, c` style declarations. Empty when the statement is
// not a declaration.
std::vector<Declarator> parse_declarators(std::string_view code_in) {
  std::string code = text::trim(code_in);
  if (!code.empty() && code.back() == ';') code.pop_back();
  code = text::trim(code);
  std::vector<Declarator> out;
  if (code.empty() || !is_ident_start(code[0])) return out;

  // base type: leading identifier words, up to the last word before the first declarator
  std::size_t i = 0;
  std::vector<std::pair<std::size_t, std::size_t>> words;
  while (i < code.size()) {
    while (i < code.size() && code[i] == ' ') ++i;
    if (i >= code.size() || !is_ident_start(code[i])) break;
    std::size_t b = i;
    while (i < code.size() && is_ident_char(code[i])) ++i;
    words.emplace_back(b, i);
  }
  if (words.empty()) return out;
  std::string first = code.substr(words[0].first, words[0].second - words[0].first);
  static const std::set<std::string> type_keywords = {"const", "unsigned", "signed", "static", "char",
                                                      "int",   "short",    "long",   "float",  "double",
                                                      "void",  "volatile"};
  if (!is_type_start(first) || (text::is_c_keyword(first) && !type_keywords.count(first))) return out;

  // Cases: `T name ...` (>=2 words), `T *name` (1+ words then '*').
  std::size_t type_end;
  if (i < code.size() && code[i] == '*') {
    type_end = words.back().second;
  } else {
    if (words.size() < 2) return out;
    type_end = words[words.size() - 2].second;
    i = words.back().first;
  }
  std::string type = text::trim(std::string_view(code).substr(0, type_end));
  for (auto& w : text::identifiers(type))
    if (!is_type_start(w)) return out;

  for (auto& piece : text::split_top_level(std::string_view(code).substr(i), ',')) {
    Declarator d;
    d.type = type;
    std::string p = piece;
    std::size_t eq = std::string::npos;
    int depth = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      char ch = p[k];
      if (ch == '(' || ch == '[' || ch == '{') ++depth;
      else if (ch == ')' || ch == ']' || ch == '}') --depth;
      else if (ch == '=' && depth == 0 && (k + 1 >= p.size() || p[k + 1] != '=')) {
        eq = k;
        break;
      }
    }
    std::string lhs = text::trim(std::string_view(p).substr(0, eq));
    if (eq != std::string::npos) d.init = text::trim(std::string_view(p).substr(eq + 1));
    bool ptr = false;
    std::size_t k = 0;
    while (k < lhs.size() && (lhs[k] == '*' || lhs[k] == ' ')) {
      if (lhs[k] == '*') ptr = true;
      ++k;
    }
    // `const` after `*`
    while (text::starts_with_word(std::string_view(lhs).substr(k), "const")) {
      k += 5;
      while (k < lhs.size() && lhs[k] == ' ') ++k;
    }
    if (k >= lhs.size() || !is_ident_start(lhs[k])) return {};
    std::size_t nb = k;
    while (k < lhs.size() && is_ident_char(lhs[k])) ++k;
    d.name = lhs.substr(nb, k - nb);
    if (text::is_c_keyword(d.name)) return {};
    while (k < lhs.size() && lhs[k] == ' ') ++k;
    if (k < lhs.size() && lhs[k] == '[') {
      std::size_t close = text::match_bracket(lhs, k);
      if (close == std::string::npos) return {};
      d.length_text = text::trim(std::string_view(lhs).substr(k + 1, close - k - 1));
      d.kind = DeclKind::Array;
      k = close + 1;
      while (k < lhs.size() && lhs[k] == ' ') ++k;
    } else {
      d.kind = ptr ? DeclKind::Pointer : DeclKind::Scalar;
    }
    if (k != lhs.size()) return {};
    out.push_back(std::move(d));
  }
  return out;
}

// `(` ... `)` after a leading keyword, e.g. the condition of `if (...)`.
std::optional<std::pair<std::string, std::size_t>> paren_after(std::string_view code, std::string_view kw) {
  if (!text::starts_with_word(code, kw)) return std::nullopt;
  std::size_t i = kw.size();
  while (i < code.size() && code[i] == ' ') ++i;
  if (i >= code.size() || code[i] != '(') return std::nullopt;
  std::size_t close = text::match_bracket(code, i);
  if (close == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(code.substr(i + 1, close - i - 1)), close + 1);
}

struct Relation {
  std::string left;
  std::string op;
  std::string right;
};

std::optional<Relation> split_relation(std::string_view cond) {
  int depth = 0;
  for (std::size_t i = 0; i < cond.size(); ++i) {
    char c = cond[i];
    if (c == '"' || c == '\'') {
      char q = c;
      for (++i; i < cond.size() && cond[i] != q; ++i)
        if (cond[i] == '\\') ++i;
      continue;
    }
    if (c == '(' || c == '[') ++depth;
    else if (c == ')' || c == ']') --depth;
    if (depth != 0) continue;
    char n = i + 1 < cond.size() ? cond[i + 1] : '\0';
    char p = i ? cond[i - 1] : '\0';
    std::string op;
    if ((c == '=' || c == '!') && n == '=') op = std::string{c, n};
    else if ((c == '<' || c == '>') && n == '=') op = std::string{c, n};
    else if (c == '<' && n != '<' && p != '<') op = "<";
    else if (c == '>' && n != '>' && p != '>' && p != '-') op = ">";
    if (op.empty()) continue;
    if (c == '<' && n == '=' && p == '<') continue;
    if (c == '>' && n == '=' && p == '>') continue;
    // '&&' / '||' at top level: not a single relation
    std::string l = text::trim(cond.substr(0, i));
    std::string r = text::trim(cond.substr(i + op.size()));
    if (l.empty() || r.empty()) return std::nullopt;
    if (l.find("&&") != std::string::npos || l.find("||") != std::string::npos ||
        r.find("&&") != std::string::npos || r.find("||") != std::string::npos)
      return std::nullopt;
    return Relation{l, op, r};
  }
  return std::nullopt;
}

std::optional<std::string> return_value(std::string_view code) {
  std::string t = text::trim(code);
  if (!text::starts_with_word(t, "return")) return std::nullopt;
  t = text::trim(std::string_view(t).substr(6));
  if (!t.empty() && t.back() == ';') t.pop_back();
  return text::trim(t);
}

dsl::Term lit(std::string s) { return dsl::Literal{text::normalize_ws(s)}; }

}  // namespace

// ---------------------------------------------------------------------------
// SourceModel

std::size_t SourceModel::offset(const Pos& p) const {
  if (p.line < 1) return 0;
  if (static_cast<std::size_t>(p.line) > line_offsets.size()) return source.size();
  return std::min(source.size(), line_offsets[p.line - 1] + static_cast<std::size_t>(p.col));
}

Pos SourceModel::pos(std::size_t off) const {
  auto it = std::upper_bound(line_offsets.begin(), line_offsets.end(), off);
  int line = static_cast<int>(it - line_offsets.begin());
  if (line < 1) line = 1;
  return Pos{line, static_cast<int>(off - line_offsets[line - 1])};
}

std::string SourceModel::slice(const Span& s) const {
  std::size_t b = offset(s.begin), e = offset(s.end);
  return e > b ? source.substr(b, e - b) : std::string();
}

const FunctionDef* SourceModel::function(std::string_view name) const {
  for (auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const FunctionDef* SourceModel::function_at(int line) const {
  for (auto& f : functions)
    if (f.span.begin.line <= line && line <= f.span.end.line) return &f;
  return nullptr;
}

const Declaration* SourceModel::find_decl(std::string_view name, std::string_view fn) const {
  const Declaration* file_scope = nullptr;
  for (auto& d : declarations) {
    if (d.name != name) continue;
    if (!fn.empty() && d.function == fn) return &d;
    if (d.function.empty() && !file_scope) file_scope = &d;
  }
  return file_scope;
}

std::optional<std::int64_t> SourceModel::resolve_int(std::string_view expr, std::string_view fn) const {
  std::string e = text::trim(expr);
  while (e.size() >= 2 && e.front() == '(' && text::match_bracket(e, 0) == e.size() - 1)
    e = text::trim(std::string_view(e).substr(1, e.size() - 2));
  if (auto v = text::parse_int(e)) return v;
  if (auto it = macros.find(e); it != macros.end()) {
    if (it->second == e) return std::nullopt;
    return resolve_int(it->second, fn);
  }
  if (text::starts_with_word(e, "sizeof")) {
    std::string arg = text::trim(std::string_view(e).substr(6));
    if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')')
      arg = text::trim(std::string_view(arg).substr(1, arg.size() - 2));
    if (const Declaration* d = find_decl(arg, fn); d && d->kind == DeclKind::Array && d->length) {
      int es = d->elem_size ? d->elem_size : 1;
      return *d->length * es;
    }
    if (int ts = type_size(arg); ts && arg.find('*') == std::string::npos) return ts;
  }
  return std::nullopt;
}

std::vector<const Statement*> SourceModel::body(const FunctionDef& f) const {
  std::vector<const Statement*> out;
  for (std::size_t i = f.header_index + 1; i < f.end_index && i < statements.size(); ++i)
    out.push_back(&statements[i]);
  return out;
}

SourceModel load_source(std::string_view src) {
  SourceModel m;
  m.source = std::string(src);
  m.line_offsets.push_back(0);
  for (std::size_t i = 0; i < src.size(); ++i)
    if (src[i] == '\n' && i + 1 <= src.size()) m.line_offsets.push_back(i + 1);
  if (!src.empty() && src.back() == '\n') m.line_offsets.pop_back();
  m.lines = text::split_lines(src);
  if (src.empty()) m.line_offsets = {0};

  Cleaned cl = clean_source(src);
  const std::string& s = cl.text;

  struct Block {
    std::size_t header;  // statement index, npos for bare braces without header text
    bool is_function;
    std::size_t func_index;
  };
  std::vector<Block> blocks;
  std::string current_fn;

  std::size_t start = std::string::npos;  // start offset of the pending statement
  int paren = 0;
  int init_depth = 0;
  char last_sig = '\0';
  bool at_line_start = true;

  auto add = [&](std::size_t b, std::size_t e, StmtKind kind) -> std::size_t {
    Statement st;
    st.span = {m.pos(b), m.pos(e)};
    st.text = m.source.substr(b, e - b);
    std::string code = s.substr(b, e - b);
    if (kind == StmtKind::Directive) code = text::replace_all(code, "\\\n", " ");
    st.code = text::normalize_ws(code);
    st.function = current_fn;
    st.depth = static_cast<int>(blocks.size());
    st.kind = kind;
    st.index = m.statements.size();
    m.statements.push_back(std::move(st));
    return m.statements.size() - 1;
  };

  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (cl.in_lit[i] || c == '"' || c == '\'') {
      if (start == std::string::npos) start = i;
      last_sig = c;
      at_line_start = false;
      ++i;
      continue;
    }
    if (c == '\n') {
      at_line_start = true;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '#' && at_line_start && start == std::string::npos) {
      std::size_t e = i;
      while (e < s.size() && s[e] != '\n') {
        if (s[e] == '\\' && e + 1 < s.size() && s[e + 1] == '\n') ++e;
        ++e;
      }
      std::size_t end = e;
      while (end > i && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
      std::size_t idx = add(i, end, StmtKind::Directive);
      static const std::regex define_re(R"(^#\s*define\s+([A-Za-z_]\w*)\s+(.+)$)");
      std::smatch mm;
      const std::string code = m.statements[idx].code;
      if (std::regex_match(code, mm, define_re)) m.macros[mm[1].str()] = text::trim(mm[2].str());
      i = e;
      continue;
    }
    at_line_start = false;
    if (start == std::string::npos) start = i;

    if (c == '(' || c == '[') {
      ++paren;
    } else if (c == ')' || c == ']') {
      --paren;
    } else if (c == '{' && (init_depth > 0 || last_sig == '=' || (last_sig == ',' && init_depth > 0))) {
      ++init_depth;
    } else if (c == '}' && init_depth > 0) {
      --init_depth;
    } else if (c == ';' && paren <= 0 && init_depth == 0) {
      add(start, i + 1, StmtKind::Simple);
      start = std::string::npos;
      paren = 0;
      last_sig = ';';
      ++i;
      continue;
    } else if (c == ':' && paren == 0 && init_depth == 0 && i + 1 < s.size() && s[i + 1] != ':') {
      std::string head = text::normalize_ws(s.substr(start, i - start));
      if (text::starts_with_word(head, "case") || head == "default") {
        add(start, i + 1, StmtKind::Label);
        start = std::string::npos;
        last_sig = ':';
        ++i;
        continue;
      }
    } else if (c == '{') {
      bool is_fn = false;
      std::size_t fidx = 0;
      std::size_t idx = add(start, i + 1, StmtKind::Header);
      if (blocks.empty()) {
        std::string head = m.statements[idx].code;
        if (!head.empty() && head.back() == '{') head = text::trim(head.substr(0, head.size() - 1));
        std::size_t lp = head.find('(');
        bool aggregate = text::starts_with_word(head, "struct") || text::starts_with_word(head, "union") ||
                         text::starts_with_word(head, "enum") || text::starts_with_word(head, "typedef");
        if (!aggregate && lp != std::string::npos && head.back() == ')' &&
            text::match_bracket(head, lp) == head.size() - 1 && head.find('=') == std::string::npos) {
          std::size_t ne = lp;
          while (ne > 0 && head[ne - 1] == ' ') --ne;
          std::size_t nb = ne;
          while (nb > 0 && is_ident_char(head[nb - 1])) --nb;
          if (nb < ne) {
            FunctionDef f;
            f.name = head.substr(nb, ne - nb);
            f.header_index = idx;
            f.span.begin = m.statements[idx].span.begin;
            std::string params = head.substr(lp + 1, head.size() - lp - 2);
            for (auto& p : text::split_top_level(params, ',')) {
              if (p.empty() || p == "void") continue;
              auto ds = parse_declarators(p);
              if (ds.size() == 1) {
                f.params.push_back(ds[0].name);
                Declaration d;
                d.name = ds[0].name;
                d.kind = ds[0].kind;
                d.type = ds[0].type;
                d.elem_size = type_size(d.type);
                d.length_text = ds[0].length_text;
                d.span = m.statements[idx].span;
                d.function = f.name;
                d.is_param = true;
                d.depth = 1;
                m.declarations.push_back(std::move(d));
              } else {
                // fall back to the last identifier
                auto ids = text::identifiers(p);
                if (!ids.empty()) f.params.push_back(ids.back());
              }
            }
            m.functions.push_back(f);
            is_fn = true;
            fidx = m.functions.size() - 1;
            current_fn = f.name;
            m.statements[idx].function = "";
          }
        }
      }
      blocks.push_back({idx, is_fn, fidx});
      start = std::string::npos;
      paren = 0;
      last_sig = '{';
      ++i;
      continue;
    } else if (c == '}') {
      if (blocks.empty()) throw UnbalancedBraces(m.pos(i).line);
      if (start != i) {
        // trailing statement without ';' before the brace: keep it opaque
        std::size_t end = i;
        while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
        add(start, end, StmtKind::Simple);
      }
      Block b = blocks.back();
      blocks.pop_back();
      m.statements[b.header].block_end = m.pos(i + 1);
      if (b.is_function) {
        FunctionDef& f = m.functions[b.func_index];
        f.span.end = m.pos(i + 1);
        f.end_index = m.statements.size();
        current_fn.clear();
      }
      start = std::string::npos;
      paren = 0;
      last_sig = '}';
      ++i;
      // `} while (x);` and `struct {...} name;` continue as a new statement
      continue;
    }
    last_sig = c;
    ++i;
  }
  if (!blocks.empty()) throw UnbalancedBraces(m.statements[blocks.back().header].span.begin.line);
  if (start != std::string::npos) {
    std::size_t end = s.size();
    while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    if (end > start) add(start, end, StmtKind::Simple);
  }

  // Declarations from simple statements.
  for (const auto& st : m.statements) {
    if (st.kind != StmtKind::Simple) continue;
    for (auto& dd : parse_declarators(st.code)) {
      Declaration d;
      d.name = dd.name;
      d.kind = dd.kind;
      d.type = dd.type;
      d.elem_size = type_size(d.type);
      d.length_text = dd.length_text;
      d.init = dd.init;
      d.span = st.span;
      d.function = st.function;
      d.depth = st.depth;
      m.declarations.push_back(std::move(d));
    }
  }
  // Length hints need the macro table and earlier declarations.
  for (auto& d : m.declarations) {
    if (d.kind != DeclKind::Array) continue;
    if (!d.length_text.empty()) {
      d.length = m.resolve_int(d.length_text, d.function);
    } else if (auto n = string_literal_length(d.init)) {
      d.length = n;
    } else if (auto n2 = init_list_count(d.init)) {
      d.length = n2;
    }
  }
  std::stable_sort(m.declarations.begin(), m.declarations.end(), [](const Declaration& a, const Declaration& b) {
    return a.span.begin < b.span.begin;
  });
  return m;
}

// ---------------------------------------------------------------------------
// Statement abstraction

std::size_t find_assignment(std::string_view code, std::size_t* op_len) {
  int depth = 0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    char c = code[i];
    if (c == '"' || c == '\'') {
      for (++i; i < code.size() && code[i] != c; ++i)
        if (code[i] == '\\') ++i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    if (depth != 0 || c != '=') continue;
    if (i + 1 < code.size() && code[i + 1] == '=') {
      ++i;
      continue;
    }
    char p = i ? code[i - 1] : '\0';
    if (p == '=' || p == '!') continue;
    std::size_t b = i;
    if (p == '<' || p == '>') {
      // `<=`/`>=` are comparisons unless doubled (`<<=`, `>>=`)
      if (i >= 2 && code[i - 2] == p) b = i - 2;
      else continue;
    } else if (std::string_view("+-*/%&|^").find(p) != std::string_view::npos && i > 0) {
      b = i - 1;
    }
    if (op_len) *op_len = i + 1 - b;
    return b;
  }
  return std::string_view::npos;
}

std::string strip_casts(std::string_view expr) {
  std::string e = text::trim(expr);
  static const std::regex cast_re(R"(^\(\s*((?:const\s+|unsigned\s+|signed\s+|struct\s+|volatile\s+)*[A-Za-z_]\w*)\s*(\**)\s*\)\s*)");
  for (;;) {
    std::smatch mm;
    if (!std::regex_search(e, mm, cast_re)) break;
    std::string type = mm[1].str();
    bool stars = !mm[2].str().empty();
    std::string last = text::identifiers(type).back();
    bool typeish = stars || type_size(type) > 0 || type_size(last) > 0 ||
                   (last.size() > 2 && last.substr(last.size() - 2) == "_t") || last == "void";
    std::string rest = e.substr(mm[0].length());
    if (!typeish || rest.empty()) break;
    // `(x) + 1` is not a cast; a cast is followed by an operand
    if (!is_ident_start(rest[0]) && rest[0] != '(' && rest[0] != '*' && rest[0] != '&' &&
        !std::isdigit(static_cast<unsigned char>(rest[0])))
      break;
    e = text::trim(rest);
  }
  return e;
}

std::optional<CallSite> find_call(std::string_view code_in) {
  std::string t = text::trim(code_in);
  if (!t.empty() && t.back() == ';') t.pop_back();
  t = text::trim(t);
  if (text::starts_with_word(t, "return")) t = text::trim(std::string_view(t).substr(6));
  CallSite cs;
  std::string rhs = t;
  std::size_t len = 0;
  std::size_t pos = find_assignment(t, &len);
  if (pos != std::string::npos && len == 1) {
    auto ds = parse_declarators(t);
    cs.lhs = ds.size() == 1 ? ds[0].name : text::trim(std::string_view(t).substr(0, pos));
    rhs = t.substr(pos + 1);
  }
  rhs = strip_casts(rhs);
  if (text::starts_with_word(rhs, "(void)")) rhs = text::trim(std::string_view(rhs).substr(6));
  if (rhs.empty() || !is_ident_start(rhs[0])) return std::nullopt;
  std::size_t k = 0;
  while (k < rhs.size() && is_ident_char(rhs[k])) ++k;
  cs.callee = rhs.substr(0, k);
  if (text::is_c_keyword(cs.callee)) return std::nullopt;
  while (k < rhs.size() && rhs[k] == ' ') ++k;
  if (k >= rhs.size() || rhs[k] != '(') return std::nullopt;
  std::size_t close = text::match_bracket(rhs, k);
  if (close != rhs.size() - 1) return std::nullopt;
  std::string inner = text::trim(std::string_view(rhs).substr(k + 1, close - k - 1));
  if (!inner.empty()) cs.args = text::split_top_level(inner, ',');
  return cs;
}

std::string concrete(const dsl::Term& t) { return dsl::render_term(t); }

namespace {

std::string input_base(const FunctionClassification& fc) {
  auto ids = text::identifiers(fc.input_param_pattern);
  return ids.empty() ? std::string() : ids.front();
}

std::optional<dsl::Guard> guard_of(const Statement& s, const FunctionClassification& fc, const SourceModel& m) {
  auto cond = paren_after(s.code, "if");
  if (!cond) return std::nullopt;
  std::string rest = text::trim(std::string_view(s.code).substr(cond->second));
  if (s.kind == StmtKind::Simple) {
    if (!return_value(rest)) return std::nullopt;
  } else if (s.kind == StmtKind::Header) {
    if (rest != "{" || s.index + 1 >= m.statements.size()) return std::nullopt;
    const Statement& next = m.statements[s.index + 1];
    if (next.kind != StmtKind::Simple || next.depth != s.depth + 1 || !return_value(next.code))
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  auto rel = split_relation(cond->first);
  if (!rel) return std::nullopt;
  dsl::Guard g;
  g.op = *dsl::rel_op_from(rel->op);
  g.left = lit(rel->left);
  if (auto call = find_call(rel->left); call && fc.compare_fns.count(call->callee) && call->args.size() >= 2) {
    auto eq = std::make_shared<dsl::EqualTerm>();
    eq->lhs = lit(call->args[0]);
    eq->rhs = lit(call->args[1]);
    g.left = eq;
  }
  g.right = lit(rel->right);
  return g;
}

dsl::FuncCall call_node(dsl::CallKind k, std::vector<std::string> args, std::optional<std::string> result = {}) {
  dsl::FuncCall f{k, {}, std::nullopt};
  for (auto& a : args) f.args.push_back(lit(a));
  if (result) f.result = lit(*result);
  return f;
}

// Shared-memory expression at the start of `expr` (casts removed), allowing
// a trailing offset such as `+ 16`.
std::string shared_prefix(const std::string& expr, const FunctionClassification& fc) {
  std::string e = strip_casts(expr);
  while (e.size() >= 2 && e.front() == '(' && text::match_bracket(e, 0) == e.size() - 1)
    e = strip_casts(std::string_view(e).substr(1, e.size() - 2));
  std::string sm = fc.find_shared(e);
  if (sm.empty()) return {};
  if (text::strip_ws(e).rfind(text::strip_ws(sm), 0) != 0) return {};
  return sm;
}

}  // namespace

std::vector<ArrayAccess> array_accesses(const Statement& s, const FunctionClassification& fc) {
  std::vector<ArrayAccess> out;
  std::vector<std::string> regions;
  auto ds = parse_declarators(s.code);
  if (!ds.empty()) {
    for (auto& d : ds)
      if (!d.init.empty()) regions.push_back(d.init);
  } else if (s.kind == StmtKind::Simple) {
    regions.push_back(s.code);
  }
  std::string skip = input_base(fc);
  for (const auto& r : regions) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      char c = r[j];
      if (c == '"' || c == '\'') {
        for (++j; j < r.size() && r[j] != c; ++j)
          if (r[j] == '\\') ++j;
        continue;
      }
      if (c != '[') continue;
      std::size_t e = j;
      while (e > 0 && r[e - 1] == ' ') --e;
      std::size_t b = e;
      while (b > 0 && is_ident_char(r[b - 1])) --b;
      if (b == e || !is_ident_start(r[b])) continue;
      std::size_t before = b;
      while (before > 0 && r[before - 1] == ' ') --before;
      if (before > 0 && (r[before - 1] == '.' || (r[before - 1] == '>' && before > 1 && r[before - 2] == '-')))
        continue;
      std::string base = r.substr(b, e - b);
      if (base == skip || text::is_c_keyword(base)) continue;
      std::size_t close = text::match_bracket(r, j);
      if (close == std::string::npos) continue;
      out.push_back({base, text::normalize_ws(r.substr(j + 1, close - j - 1))});
    }
  }
  return out;
}

std::optional<AbstractStmt> abstract_statement(const Statement& s, const FunctionClassification& fc,
                                               const SourceModel& m) {
  AbstractStmt a;
  a.stmt_index = s.index;
  a.span = s.span;
  a.text = s.text;

  if (auto g = guard_of(s, fc, m)) {
    a.node = *g;
    return a;
  }
  if (s.kind != StmtKind::Simple || s.function.empty()) return std::nullopt;
  const std::string& code = s.code;
  auto ds = parse_declarators(code);

  // SHALLOW: pointer initialized or assigned from shared memory
  if (ds.size() == 1 && ds[0].kind == DeclKind::Pointer && !ds[0].init.empty()) {
    if (std::string sm = shared_prefix(ds[0].init, fc); !sm.empty()) {
      a.node = call_node(dsl::CallKind::Shallow, {strip_casts(ds[0].init)}, ds[0].name);
      return a;
    }
  }
  std::size_t op_len = 0;
  std::size_t pos = ds.empty() ? find_assignment(code, &op_len) : std::string::npos;
  if (pos != std::string::npos) {
    std::string lhs = text::trim(std::string_view(code).substr(0, pos));
    std::string rhs = text::trim(std::string_view(code).substr(pos + op_len));
    if (!rhs.empty() && rhs.back() == ';') rhs = text::trim(std::string_view(rhs).substr(0, rhs.size() - 1));
    const Declaration* d = m.find_decl(lhs, s.function);
    if (op_len == 1 && d && d->kind == DeclKind::Pointer) {
      if (std::string sm = shared_prefix(rhs, fc); !sm.empty()) {
        a.node = call_node(dsl::CallKind::Shallow, {strip_casts(rhs)}, lhs);
        return a;
      }
    }
    // MUTATE: write through a shared-memory expression
    if (std::string sm = fc.find_shared(lhs); !sm.empty()) {
      a.node = call_node(dsl::CallKind::Mutate, {rhs}, sm);
      return a;
    }
  }

  if (auto call = find_call(code)) {
    a.call = call;
    auto cat = fc.category(call->callee);
    const auto& args = call->args;
    std::optional<dsl::FuncCall> node;
    if (cat == "copy" && args.size() >= 3) {
      node = call_node(dsl::CallKind::Copy, {args[0], args[1], args[2]});
    } else if (cat == "snprint" && args.size() >= 3) {
      std::vector<std::string> v{args[0], args[2]};
      v.insert(v.end(), args.begin() + 3, args.end());
      node = call_node(dsl::CallKind::Snprint, v);
    } else if (cat == "enc" && args.size() == 3) {
      node = call_node(dsl::CallKind::Enc, {args[0], args[1], args[2]});
    } else if (cat == "enc" && args.size() == 2) {
      node = call_node(dsl::CallKind::Enc, {args[0], args[0], args[1]});
    } else if (cat == "hash" && args.size() == 3) {
      node = call_node(dsl::CallKind::Hash, {args[1], args[0], args[2]});
    } else if (cat == "read" && args.size() == 1) {
      node = call_node(dsl::CallKind::Read, {}, args[0]);
    } else if (cat == "write" && args.size() == 1) {
      node = call_node(dsl::CallKind::Write, {args[0]});
    } else if (cat == "malloc" && !args.empty() && !call->lhs.empty()) {
      node = call_node(dsl::CallKind::Malloc, {args[0]}, call->lhs);
    }
    if (node) {
      a.node = *node;
      return a;
    }
  }

  if (ds.size() == 1 && ds[0].kind == DeclKind::Array && ds[0].init.empty()) {
    std::string len = ds[0].length_text;
    if (len.empty()) {
      const Declaration* d = m.find_decl(ds[0].name, s.function);
      if (d && d->length) len = std::to_string(*d->length);
    }
    a.node = call_node(dsl::CallKind::Malloc, {len}, ds[0].name);
    return a;
  }
  if (ds.size() == 1 && ds[0].kind == DeclKind::Array) {
    // initialized array: still a buffer declaration
    std::string len = ds[0].length_text;
    const Declaration* d = m.find_decl(ds[0].name, s.function);
    if (len.empty() && d && d->length) len = std::to_string(*d->length);
    a.node = call_node(dsl::CallKind::Malloc, {len}, ds[0].name);
    return a;
  }

  auto acc = array_accesses(s, fc);
  if (!acc.empty()) {
    a.node = call_node(dsl::CallKind::Array, {acc[0].base, acc[0].index});
    return a;
  }
  return std::nullopt;
}

std::set<std::string> names_in_scope(const SourceModel& m, int line) {
  std::set<std::string> out;
  const FunctionDef* f = m.function_at(line);
  for (const auto& d : m.declarations) {
    if (d.span.begin.line > line) continue;
    if (d.function.empty() || (f && d.function == f->name)) out.insert(d.name);
  }
  if (f)
    for (const auto& p : f->params) out.insert(p);
  return out;
}

// ---------------------------------------------------------------------------
// Client metadata

std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::None: return "none";
    case ParamType::ValueIn: return "value-in";
    case ParamType::ValueOut: return "value-out";
    case ParamType::MemrefIn: return "memref-in";
    case ParamType::MemrefOut: return "memref-out";
  }
  return "none";
}

const Command* ClientSpec::command_for_function(std::string_view fn) const {
  for (const auto& c : commands)
    for (const auto& f : c.functions)
      if (f == fn) return &c;
  return nullptr;
}

namespace {

ParamType merge(ParamType a, ParamType b) {
  auto rank = [](ParamType t) {
    switch (t) {
      case ParamType::None: return 0;
      case ParamType::ValueIn: return 1;
      case ParamType::ValueOut: return 2;
      case ParamType::MemrefIn: return 3;
      case ParamType::MemrefOut: return 4;
    }
    return 0;
  };
  // memref usage wins over value usage; output wins over input
  return rank(b) > rank(a) ? b : a;
}

void scan_params(const Statement& st, const FunctionClassification& fc, const std::string& base,
                 std::array<ParamType, 4>& types) {
  static const std::regex use_re(R"(([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*\.\s*(memref|value)\s*\.\s*(\w+))");
  const std::string& code = st.code;
  std::size_t op_len = 0;
  std::size_t apos = find_assignment(code, &op_len);
  std::string lhs = apos == std::string::npos ? std::string() : code.substr(0, apos);
  // An input used as an index of the assigned object is only read.
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] != '[') continue;
    auto close = text::match_bracket(lhs, i);
    if (close == std::string::npos) break;
    if (!text::parse_int(text::trim(lhs.substr(i + 1, close - i - 1)))) lhs.erase(i + 1, close - i - 1);
  }
  auto call = find_call(code);
  std::string dest;
  if (call) {
    auto cat = fc.category(call->callee);
    if ((cat == "copy" || cat == "snprint" || cat == "read") && !call->args.empty()) dest = call->args[0];
    if (cat == "write" || cat == "enc") dest.clear();
    if (cat == "enc" && call->args.size() == 3) dest = call->args[1];
  }
  for (auto it = std::sregex_iterator(code.begin(), code.end(), use_re); it != std::sregex_iterator(); ++it) {
    const auto& mm = *it;
    if (mm[1].str() != base) continue;
    int slot = std::stoi(mm[2].str());
    if (slot < 0 || slot > 3) continue;
    std::string use = text::strip_ws(mm[0].str());
    bool written = (!lhs.empty() && text::strip_ws(lhs).find(use) != std::string::npos) ||
                   (!dest.empty() && text::strip_ws(dest).find(use) != std::string::npos);
    ParamType t;
    if (mm[3].str() == "memref") t = written ? ParamType::MemrefOut : ParamType::MemrefIn;
    else t = written ? ParamType::ValueOut : ParamType::ValueIn;
    types[slot] = merge(types[slot], t);
  }
}

std::optional<std::string> find_uuid_macro(const SourceModel& m) {
  for (const auto& [name, value] : m.macros)
    if (name.find("UUID") != std::string::npos && value.find('{') != std::string::npos) return value;
  return std::nullopt;
}

struct Uuid {
  std::uint32_t a = 0;
  std::uint16_t b = 0, c = 0;
  std::array<std::uint8_t, 8> d{};
};

std::string canonical(const Uuid& u) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%02x%02x-%02x%02x%02x%02x%02x%02x", u.a, u.b, u.c, u.d[0], u.d[1],
                u.d[2], u.d[3], u.d[4], u.d[5], u.d[6], u.d[7]);
  return buf;
}

std::string initializer(const Uuid& u) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "{ 0x%08x, 0x%04x, 0x%04x, { 0x%02x, 0x%02x, 0x%02x, 0x%02x, 0x%02x, 0x%02x, 0x%02x, 0x%02x } }", u.a,
                u.b, u.c, u.d[0], u.d[1], u.d[2], u.d[3], u.d[4], u.d[5], u.d[6], u.d[7]);
  return buf;
}

std::optional<Uuid> parse_uuid_initializer(const std::string& v) {
  std::vector<std::int64_t> nums;
  static const std::regex num_re(R"(0[xX][0-9a-fA-F]+|\d+)");
  for (auto it = std::sregex_iterator(v.begin(), v.end(), num_re); it != std::sregex_iterator(); ++it) {
    auto n = text::parse_int(it->str());
    if (!n) return std::nullopt;
    nums.push_back(*n);
  }
  if (nums.size() != 11) return std::nullopt;
  Uuid u;
  u.a = static_cast<std::uint32_t>(nums[0]);
  u.b = static_cast<std::uint16_t>(nums[1]);
  u.c = static_cast<std::uint16_t>(nums[2]);
  for (int i = 0; i < 8; ++i) u.d[i] = static_cast<std::uint8_t>(nums[3 + i]);
  return u;
}

std::optional<Uuid> parse_uuid_canonical(const std::string& v) {
  static const std::regex re(
      R"(^([0-9a-fA-F]{8})-([0-9a-fA-F]{4})-([0-9a-fA-F]{4})-([0-9a-fA-F]{4})-([0-9a-fA-F]{12})$)");
  std::smatch mm;
  std::string t = text::trim(v);
  if (!std::regex_match(t, mm, re)) return std::nullopt;
  Uuid u;
  u.a = static_cast<std::uint32_t>(std::stoul(mm[1].str(), nullptr, 16));
  u.b = static_cast<std::uint16_t>(std::stoul(mm[2].str(), nullptr, 16));
  u.c = static_cast<std::uint16_t>(std::stoul(mm[3].str(), nullptr, 16));
  std::string tail = mm[4].str() + mm[5].str();
  for (int i = 0; i < 8; ++i) u.d[i] = static_cast<std::uint8_t>(std::stoul(tail.substr(2 * i, 2), nullptr, 16));
  return u;
}

}  // namespace

ClientSpec extract_client_spec(const SourceModel& m, const FunctionClassification& fc,
                               const std::vector<const SourceModel*>& headers) {
  const FunctionDef* entry = m.function(fc.entry_point);
  if (!entry) throw NoEntryPoint(fc.entry_point);
  std::string base = input_base(fc);

  ClientSpec spec;
  std::vector<std::vector<const Statement*>> groups;
  bool in_case = false;
  for (const Statement* st : m.body(*entry)) {
    if (st->kind == StmtKind::Label) {
      std::string lbl = text::trim(st->code.substr(0, st->code.size() - 1));
      if (text::starts_with_word(lbl, "case")) {
        Command c;
        c.id = text::trim(std::string_view(lbl).substr(4));
        spec.commands.push_back(c);
        groups.emplace_back();
        in_case = true;
      } else {
        in_case = false;
      }
      continue;
    }
    if (in_case) groups.back().push_back(st);
  }
  if (spec.commands.empty()) throw NoCases();

  for (std::size_t i = 0; i < spec.commands.size(); ++i) {
    Command& c = spec.commands[i];
    c.value = m.resolve_int(c.id);
    for (const SourceModel* h : headers)
      if (!c.value && h) c.value = h->resolve_int(c.id);
    for (const Statement* st : groups[i]) {
      scan_params(*st, fc, base, c.params);
      for (const auto& id : text::identifiers(st->code)) {
        const FunctionDef* f = m.function(id);
        if (!f || f == entry) continue;
        if (std::find(c.functions.begin(), c.functions.end(), id) != c.functions.end()) continue;
        c.functions.push_back(id);
        // the handler may name its parameter array differently
        std::string hbase = base;
        for (const auto& p : f->params)
          if (const Declaration* d = m.find_decl(p, f->name); d && d->kind == DeclKind::Array) hbase = p;
        for (const Statement* hs : m.body(*f)) scan_params(*hs, fc, hbase, c.params);
      }
    }
  }

  std::optional<Uuid> u;
  if (!fc.uuid_override.empty()) {
    u = parse_uuid_canonical(fc.uuid_override);
    if (!u) u = parse_uuid_initializer(fc.uuid_override);
    if (!u) throw ConfigError("malformed uuid override '" + fc.uuid_override + "'");
  }
  if (!u) {
    if (auto v = find_uuid_macro(m)) u = parse_uuid_initializer(*v);
    for (const SourceModel* h : headers)
      if (!u && h)
        if (auto v = find_uuid_macro(*h)) u = parse_uuid_initializer(*v);
  }
  if (!u) throw NoUuid();
  spec.uuid = canonical(*u);
  spec.uuid_initializer = initializer(*u);
  return spec;
}

}  // namespace tarepair::cmodel
