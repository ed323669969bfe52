#include "tarepair/dsl.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>

#include "tarepair/text.hpp"

namespace tarepair::dsl {

namespace {

struct KindInfo {
  CallKind kind;
  std::string_view keyword;
  std::size_t min_args;
  std::size_t max_args;  // SIZE_MAX for variadic
  bool result_required;
};

constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);

constexpr std::array<KindInfo, 12> kKinds = {{
    {CallKind::Copy, "COPY", 3, 3, false},
    {CallKind::Snprint, "SNPRINT", 3, kVariadic, false},
    {CallKind::Malloc, "MALLOC", 1, 1, true},
    {CallKind::Enc, "ENC", 3, 3, false},
    {CallKind::MulMalloc, "MULMALLOC", 1, kVariadic, true},
    {CallKind::MulEnc, "MULENC", 2, kVariadic, false},
    {CallKind::Array, "ARRAY", 2, 2, true},
    {CallKind::Shallow, "SHALLOW", 1, 1, true},
    {CallKind::Read, "READ", 0, 0, true},
    {CallKind::Write, "WRITE", 1, 1, false},
    {CallKind::Hash, "HASH", 3, 3, false},
    {CallKind::Mutate, "MUTATE", 1, 1, true},
}};

const KindInfo& info(CallKind k) {
  for (const auto& ki : kKinds)
    if (ki.kind == k) return ki;
  return kKinds[0];
}

std::string want_text(const KindInfo& ki) {
  if (ki.max_args == kVariadic) return ">=" + std::to_string(ki.min_args);
  return std::to_string(ki.min_args);
}

enum class Tok {
  Ident,
  Number,
  String,
  Placeholder,
  Arrow,
  Separator,
  Semi,
  Comma,
  LParen,
  RParen,
  Amp,
  RelOp,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourcePos start = pos_;
      if (at_end()) {
        out.push_back({Tok::End, "", start});
        return out;
      }
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
        continue;
      }
      if (starts("\xE2\x86\x92")) {  // U+2192 RIGHTWARDS ARROW
        advance(3);
        out.push_back({Tok::Arrow, "->", start});
      } else if (starts("=>")) {
        advance(2);
        out.push_back({Tok::Separator, "=>", start});
      } else if (starts("->")) {
        advance(2);
        out.push_back({Tok::Arrow, "->", start});
      } else if (starts("==") || starts("!=") || starts("<=") || starts(">=")) {
        out.push_back({Tok::RelOp, std::string(src_.substr(pos_.offset, 2)), start});
        advance(2);
      } else if (c == '<' || c == '>') {
        advance();
        out.push_back({Tok::RelOp, std::string(1, c), start});
      } else if (c == ';') {
        advance();
        out.push_back({Tok::Semi, ";", start});
      } else if (c == ',') {
        advance();
        out.push_back({Tok::Comma, ",", start});
      } else if (c == '(') {
        advance();
        out.push_back({Tok::LParen, "(", start});
      } else if (c == ')') {
        advance();
        out.push_back({Tok::RParen, ")", start});
      } else if (c == '&') {
        advance();
        out.push_back({Tok::Amp, "&", start});
      } else if (c == '$') {
        advance();
        std::string name;
        while (!at_end() && text::is_ident_char(peek())) {
          name.push_back(peek());
          advance();
        }
        if (name.empty()) throw SyntaxError(start, "placeholder name after '$'");
        out.push_back({Tok::Placeholder, name, start});
      } else if (text::is_ident_start(c)) {
        std::string name;
        while (!at_end() && (text::is_ident_char(peek()) || peek() == '.')) {
          name.push_back(peek());
          advance();
        }
        if (name == "_") {
          out.push_back({Tok::Placeholder, "_", start});
        } else {
          out.push_back({Tok::Ident, name, start});
        }
      } else if ((c >= '0' && c <= '9') || (c == '-' && next_is_digit())) {
        std::string lit(1, c);
        advance();
        while (!at_end() && text::is_ident_char(peek())) {
          lit.push_back(peek());
          advance();
        }
        out.push_back({Tok::Number, lit, start});
      } else if (c == '"') {
        std::string lit(1, c);
        advance();
        bool closed = false;
        while (!at_end()) {
          char ch = peek();
          lit.push_back(ch);
          advance();
          if (ch == '\\' && !at_end()) {
            lit.push_back(peek());
            advance();
          } else if (ch == '"') {
            closed = true;
            break;
          }
        }
        if (!closed) throw SyntaxError(start, "closing '\"'");
        out.push_back({Tok::String, lit, start});
      } else {
        throw SyntaxError(start, "a DSL token");
      }
    }
  }

 private:
  bool at_end() const { return pos_.offset >= src_.size(); }
  char peek() const { return src_[pos_.offset]; }
  bool starts(std::string_view s) const { return src_.substr(pos_.offset, s.size()) == s; }
  bool next_is_digit() const {
    return pos_.offset + 1 < src_.size() && src_[pos_.offset + 1] >= '0' &&
           src_[pos_.offset + 1] <= '9';
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && !at_end(); ++i) {
      if (src_[pos_.offset] == '\n') {
        ++pos_.line;
        pos_.col = 1;
      } else {
        ++pos_.col;
      }
      ++pos_.offset;
    }
  }
  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  SourcePos pos_;
};

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::size_t begin, std::size_t end)
      : toks_(toks), i_(begin), end_(end) {}

  Program program() {
    Program p;
    p.nodes.push_back(node());
    while (cur().kind == Tok::Semi) {
      ++i_;
      // tolerate a trailing ';' before the end of a program
      if (at_end()) break;
      p.nodes.push_back(node());
    }
    if (!at_end()) throw SyntaxError(cur().pos, "';' or end of program");
    return p;
  }

 private:
  const Token& cur() const {
    static const Token end_tok{Tok::End, "", {}};
    if (i_ >= end_) return i_ < toks_.size() ? toks_[std::min(i_, toks_.size() - 1)] : end_tok;
    return toks_[i_];
  }
  bool at_end() const { return i_ >= end_ || toks_[i_].kind == Tok::End; }
  SourcePos end_pos() const {
    return i_ < toks_.size() ? toks_[i_].pos : (toks_.empty() ? SourcePos{} : toks_.back().pos);
  }

  void expect(Tok k, std::string_view what) {
    if (at_end() || cur().kind != k) throw SyntaxError(at_end() ? end_pos() : cur().pos, std::string(what));
    ++i_;
  }

  Node node() {
    if (at_end()) throw SyntaxError(end_pos(), "a node");
    const Token& t = cur();
    if (t.kind != Tok::Ident) throw SyntaxError(t.pos, "a FuncCall keyword or IF");
    if (t.text == "IF") return guard();
    auto kind = call_kind_from(t.text);
    if (!kind) throw SyntaxError(t.pos, "a FuncCall keyword or IF");
    ++i_;
    return call(*kind);
  }

  Node call(CallKind kind) {
    const KindInfo& ki = info(kind);
    expect(Tok::LParen, "'('");
    FuncCall fc{kind, {}, std::nullopt};
    if (!at_end() && cur().kind != Tok::RParen) {
      fc.args.push_back(term(false));
      while (!at_end() && cur().kind == Tok::Comma) {
        ++i_;
        fc.args.push_back(term(false));
      }
    }
    expect(Tok::RParen, "')'");
    if (fc.args.size() < ki.min_args || fc.args.size() > ki.max_args)
      throw ArityError(kind, fc.args.size(), want_text(ki));
    if (!at_end() && cur().kind == Tok::Arrow) {
      ++i_;
      SourcePos rp = at_end() ? end_pos() : cur().pos;
      Term r = term(false);
      const Placeholder* ph = as_placeholder(r);
      if (!ki.result_required && !(ph && ph->is_discard())) throw SyntaxError(rp, "'_'");
      fc.result = std::move(r);
    } else if (ki.result_required) {
      throw SyntaxError(at_end() ? end_pos() : cur().pos, "'->' and a result");
    }
    return fc;
  }

  Node guard() {
    ++i_;
    expect(Tok::LParen, "'('");
    Term left = term(true);
    expect(Tok::Comma, "','");
    if (at_end() || cur().kind != Tok::RelOp) throw SyntaxError(at_end() ? end_pos() : cur().pos, "a relational operator");
    RelOp op = *rel_op_from(cur().text);
    ++i_;
    expect(Tok::Comma, "','");
    Term right = term(true);
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    if (at_end() || cur().kind != Tok::Ident || cur().text != "return")
      throw SyntaxError(at_end() ? end_pos() : cur().pos, "'return'");
    ++i_;
    if (at_end() || cur().kind != Tok::Ident) throw SyntaxError(at_end() ? end_pos() : cur().pos, "an error code");
    std::string code = cur().text;
    ++i_;
    return Guard{std::move(left), op, std::move(right), "return " + code};
  }

  Term term(bool allow_equal) {
    if (at_end()) throw SyntaxError(end_pos(), "a term");
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Placeholder:
        ++i_;
        return Placeholder{t.text};
      case Tok::Number:
      case Tok::String:
        ++i_;
        return Literal{t.text};
      case Tok::Amp: {
        ++i_;
        if (at_end() || cur().kind != Tok::Ident) throw SyntaxError(at_end() ? end_pos() : cur().pos, "an identifier after '&'");
        std::string name = cur().text;
        ++i_;
        return AddressOf{name};
      }
      case Tok::Ident: {
        std::string name = t.text;
        ++i_;
        if (!at_end() && cur().kind == Tok::LParen) {
          if (name != "equal" || !allow_equal)
            throw SyntaxError(t.pos, "a flat term (nested calls are not supported)");
          ++i_;
          auto eq = std::make_shared<EqualTerm>();
          eq->lhs = term(false);
          expect(Tok::Comma, "','");
          eq->rhs = term(false);
          expect(Tok::RParen, "')'");
          return eq;
        }
        return Identifier{name};
      }
      default:
        throw SyntaxError(t.pos, "a term");
    }
  }

  const std::vector<Token>& toks_;
  std::size_t i_;
  std::size_t end_;
};

void collect(const Term& t, std::set<std::string>& out) {
  if (auto* p = as_placeholder(t)) {
    if (!p->is_discard()) out.insert(p->name);
  } else if (auto* eq = std::get_if<std::shared_ptr<EqualTerm>>(&t)) {
    collect((*eq)->lhs, out);
    collect((*eq)->rhs, out);
  }
}

void collect(const Node& n, std::set<std::string>& out) {
  if (auto* fc = std::get_if<FuncCall>(&n)) {
    for (const auto& a : fc->args) collect(a, out);
    if (fc->result) collect(*fc->result, out);
  } else {
    const auto& g = std::get<Guard>(n);
    collect(g.left, out);
    collect(g.right, out);
  }
}

std::string ph_name(const Term& t) {
  auto* p = as_placeholder(t);
  return p && !p->is_discard() ? p->name : std::string();
}

// Placeholders that sit in a slot the synthesis layer may fill.
std::set<std::string> synthesizable(const Program& p) {
  std::set<std::string> out;
  auto add = [&](const Term& t) {
    auto n = ph_name(t);
    if (!n.empty()) out.insert(n);
  };
  for (const auto& node : p.nodes) {
    if (auto* fc = std::get_if<FuncCall>(&node)) {
      if (fc->result) add(*fc->result);
      switch (fc->kind) {
        case CallKind::Malloc:
          add(fc->args[0]);
          break;
        case CallKind::Enc:
          add(fc->args[1]);
          add(fc->args[2]);
          break;
        case CallKind::Copy:
          add(fc->args[2]);
          break;
        case CallKind::Hash:
          add(fc->args[1]);
          add(fc->args[2]);
          break;
        case CallKind::MulEnc:
          add(fc->args.back());
          break;
        default:
          break;
      }
    } else {
      add(std::get<Guard>(node).right);
    }
  }
  return out;
}

void classify(Rule& r) {
  r.bound = placeholders_of(r.trigger);
  std::set<std::string> all = placeholders_of(r.transformer);
  std::set<std::string> synth = synthesizable(r.transformer);
  for (const auto& n : all)
    if (!r.bound.count(n) && synth.count(n)) r.fresh.insert(n);
  for (const auto& node : r.trigger.nodes) {
    auto* fc = std::get_if<FuncCall>(&node);
    if (fc && fc->kind == CallKind::Snprint && fc->args.size() == 3) {
      auto n = ph_name(fc->args[2]);
      if (!n.empty()) r.lists.insert(n);
    }
  }
}

}  // namespace

std::string_view to_string(CallKind k) { return info(k).keyword; }

std::optional<CallKind> call_kind_from(std::string_view keyword) {
  for (const auto& ki : kKinds)
    if (ki.keyword == keyword) return ki.kind;
  return std::nullopt;
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "==";
}

std::optional<RelOp> rel_op_from(std::string_view s) {
  if (s == "==") return RelOp::Eq;
  if (s == "!=") return RelOp::Ne;
  if (s == "<") return RelOp::Lt;
  if (s == "<=") return RelOp::Le;
  if (s == ">") return RelOp::Gt;
  if (s == ">=") return RelOp::Ge;
  return std::nullopt;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "info";
}

SyntaxError::SyntaxError(SourcePos pos, std::string expected)
    : Error("SyntaxError", "syntax error at " + std::to_string(pos.line) + ":" +
                               std::to_string(pos.col) + ": expected " + expected),
      pos_(pos),
      expected_(std::move(expected)) {}

ArityError::ArityError(CallKind kind, std::size_t got, std::string want)
    : Error("ArityError", std::string(to_string(kind)) + " takes " + want + " argument(s), got " +
                              std::to_string(got)),
      kind_(kind),
      got_(got),
      want_(std::move(want)) {}

const Placeholder* as_placeholder(const Term& t) { return std::get_if<Placeholder>(&t); }

bool term_equal(const Term& a, const Term& b) {
  if (a.index() != b.index()) return false;
  if (auto* ea = std::get_if<std::shared_ptr<EqualTerm>>(&a)) {
    const auto& eb = std::get<std::shared_ptr<EqualTerm>>(b);
    return term_equal((*ea)->lhs, eb->lhs) && term_equal((*ea)->rhs, eb->rhs);
  }
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::shared_ptr<EqualTerm>>) {
          return false;
        } else {
          return x == std::get<T>(b);
        }
      },
      a);
}

std::string render_term(const Term& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Identifier>) return x.name;
        if constexpr (std::is_same_v<T, Literal>) return x.text;
        if constexpr (std::is_same_v<T, Placeholder>) return x.is_discard() ? "_" : "$" + x.name;
        if constexpr (std::is_same_v<T, AddressOf>) return "&" + x.name;
        if constexpr (std::is_same_v<T, std::shared_ptr<EqualTerm>>)
          return "equal(" + render_term(x->lhs) + ", " + render_term(x->rhs) + ")";
      },
      t);
}

std::string render_node(const Node& n) {
  if (auto* fc = std::get_if<FuncCall>(&n)) {
    std::string out(to_string(fc->kind));
    out += "(";
    for (std::size_t i = 0; i < fc->args.size(); ++i) {
      if (i) out += ", ";
      out += render_term(fc->args[i]);
    }
    out += ")";
    if (fc->result) out += " -> " + render_term(*fc->result);
    return out;
  }
  const auto& g = std::get<Guard>(n);
  return "IF(" + render_term(g.left) + ", " + std::string(to_string(g.op)) + ", " +
         render_term(g.right) + ") -> " + g.action;
}

std::string render_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) out += "; ";
    out += render_node(p.nodes[i]);
  }
  return out;
}

std::string render_rule(const Rule& r) {
  std::string out;
  if (!r.name.empty()) out += "# name: " + r.name + "\n";
  out += render_program(r.trigger);
  out += "\n=>\n";
  for (std::size_t i = 0; i < r.transformer.nodes.size(); ++i) {
    if (i) out += ";\n";
    out += render_node(r.transformer.nodes[i]);
  }
  out += "\n";
  return out;
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const Node& x = a.nodes[i];
    const Node& y = b.nodes[i];
    if (x.index() != y.index()) return false;
    if (auto* fx = std::get_if<FuncCall>(&x)) {
      const auto& fy = std::get<FuncCall>(y);
      if (fx->kind != fy.kind || fx->args.size() != fy.args.size()) return false;
      for (std::size_t k = 0; k < fx->args.size(); ++k)
        if (!term_equal(fx->args[k], fy.args[k])) return false;
      if (fx->result.has_value() != fy.result.has_value()) return false;
      if (fx->result && !term_equal(*fx->result, *fy.result)) return false;
    } else {
      const auto& gx = std::get<Guard>(x);
      const auto& gy = std::get<Guard>(y);
      if (gx.op != gy.op || gx.action != gy.action || !term_equal(gx.left, gy.left) ||
          !term_equal(gx.right, gy.right))
        return false;
    }
  }
  return true;
}

bool structurally_equal(const Rule& a, const Rule& b) {
  return structurally_equal(a.trigger, b.trigger) && structurally_equal(a.transformer, b.transformer);
}

std::set<std::string> placeholders_of(const Program& p) {
  std::set<std::string> out;
  for (const auto& n : p.nodes) collect(n, out);
  return out;
}

Program parse_program(std::string_view src) {
  auto toks = Lexer(src).run();
  for (const auto& t : toks)
    if (t.kind == Tok::Separator) throw SyntaxError(t.pos, "a node (unexpected '=>')");
  return Parser(toks, 0, toks.size() - 1).program();
}

Rule parse_rule(std::string_view src, std::string name) {
  auto toks = Lexer(src).run();
  std::vector<std::size_t> seps;
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].kind == Tok::Separator) seps.push_back(i);
  if (seps.empty()) throw MissingSeparator("rule has no '=>' separator");
  if (seps.size() > 1) throw SyntaxError(toks[seps[1]].pos, "a single '=>' per rule");
  Rule r;
  r.name = std::move(name);
  r.trigger = Parser(toks, 0, seps[0]).program();
  r.transformer = Parser(toks, seps[0] + 1, toks.size() - 1).program();
  classify(r);
  return r;
}

std::vector<Rule> parse_rule_file(std::string_view src, std::string_view default_name) {
  std::vector<Rule> rules;
  std::string block;
  std::string name;
  auto flush = [&] {
    if (text::trim(block).empty()) {
      block.clear();
      name.clear();
      return;
    }
    std::string n = name.empty() ? std::string(default_name) + "#" + std::to_string(rules.size() + 1) : name;
    rules.push_back(parse_rule(block, n));
    block.clear();
    name.clear();
  };
  for (const auto& raw : text::split_lines(src)) {
    std::string line = text::trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      std::string body = text::trim(std::string_view(line).substr(1));
      if (body.rfind("name:", 0) == 0) name = text::trim(std::string_view(body).substr(5));
      continue;
    }
    block += raw;
    block += "\n";
  }
  flush();
  return rules;
}

std::vector<Rule> load_rule_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("rules directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".dsl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Rule> rules;
  for (const auto& f : files) {
    auto part = parse_rule_file(text::read_file(f.string()), f.stem().string());
    rules.insert(rules.end(), part.begin(), part.end());
  }
  return rules;
}

bool ValidationReport::clean() const {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.severity != Severity::Info; });
}

bool ValidationReport::has(std::string_view code, std::string_view name) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) {
    return f.code == code && (name.empty() || f.name == name);
  });
}

ValidationReport validate_rule(const Rule& r) {
  ValidationReport rep;
  std::set<std::string> used = placeholders_of(r.transformer);
  for (const auto& n : used) {
    if (!r.bound.count(n) && !r.fresh.count(n))
      rep.findings.push_back({Severity::Warning, "UnboundPlaceholder", n,
                              "$" + n + " is not bound by the trigger and is not in a synthesizable slot"});
  }
  for (const auto& n : r.bound) {
    if (!used.count(n))
      rep.findings.push_back({Severity::Info, "UnusedBinding", n, "$" + n + " is bound but never used"});
  }

  // List-valued placeholders and the MULMALLOC/MULENC expansion contract.
  std::set<std::string> lists = r.lists;
  std::map<std::string, std::vector<std::string>> malloc_sources;
  auto err = [&](const std::string& n, const std::string& msg) {
    rep.findings.push_back({Severity::Error, "ExpansionMismatch", n, msg});
  };
  for (const auto& node : r.transformer.nodes) {
    auto* fc = std::get_if<FuncCall>(&node);
    if (!fc) continue;
    if (fc->kind == CallKind::MulMalloc) {
      std::vector<std::string> src;
      for (const auto& a : fc->args) {
        auto n = ph_name(a);
        if (n.empty() || !lists.count(n)) {
          err(render_term(a), "MULMALLOC argument must be a bound argument list");
        } else {
          src.push_back(n);
        }
      }
      auto res = fc->result ? ph_name(*fc->result) : std::string();
      if (res.empty()) {
        err("", "MULMALLOC result must be a placeholder");
      } else {
        lists.insert(res);
        malloc_sources[res] = src;
      }
    } else if (fc->kind == CallKind::MulEnc) {
      auto ciphers = ph_name(fc->args.back());
      std::vector<std::string> src;
      for (std::size_t i = 0; i + 1 < fc->args.size(); ++i) src.push_back(ph_name(fc->args[i]));
      auto it = malloc_sources.find(ciphers);
      if (it == malloc_sources.end()) {
        err(ciphers, "MULENC ciphers must come from a preceding MULMALLOC");
      } else if (it->second != src) {
        err(ciphers, "MULENC arguments differ from the MULMALLOC that produced the ciphers");
      }
    } else {
      // list-valued placeholders may only feed SNPRINT's variadic tail
      for (std::size_t i = 0; i < fc->args.size(); ++i) {
        auto n = ph_name(fc->args[i]);
        if (n.empty() || !lists.count(n)) continue;
        if (!(fc->kind == CallKind::Snprint && i >= 2))
          err(n, "list placeholder $" + n + " used in a scalar slot");
      }
    }
  }
  return rep;
}

}  // namespace tarepair::dsl
