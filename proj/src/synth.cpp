#include "tarepair/synth.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "tarepair/text.hpp"

namespace tarepair::synth {

using templates::LineOp;
using templates::PatchTemplate;
using templates::TemplateLine;

namespace {

const std::regex& placeholder_re() {
  static const std::regex re(R"(\$([A-Za-z_][A-Za-z0-9_]*))");
  return re;
}

// Replace bound `$name` tokens; unbound names are appended to `missing`.
std::string substitute(const std::string& s, const Bindings& b, std::vector<std::string>* missing = nullptr) {
  std::string out;
  auto begin = std::sregex_iterator(s.begin(), s.end(), placeholder_re());
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& mt = *it;
    out.append(s, last, mt.position(0) - last);
    auto found = b.find(mt[1].str());
    if (found != b.end()) {
      out += found->second;
    } else {
      out += mt[0].str();
      if (missing && std::find(missing->begin(), missing->end(), mt[1].str()) == missing->end())
        missing->push_back(mt[1].str());
    }
    last = mt.position(0) + mt.length(0);
  }
  out.append(s, last, std::string::npos);
  return out;
}

bool word_char(char c) { return text::is_ident_char(c) || c == '$'; }

// Whitespace kept only where it separates two word characters, collapsed to one space.
std::string squeeze(std::string_view s) {
  std::string n = text::normalize_ws(s), out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == ' ') {
      if (!out.empty() && i + 1 < n.size() && word_char(out.back()) && word_char(n[i + 1])) out += ' ';
      continue;
    }
    out += n[i];
  }
  return out;
}

std::string regex_escape(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{}/-)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !text::is_ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return text::is_ident_char(c); });
}

std::string base_ident(std::string_view e) {
  std::string s = text::trim(e);
  while (!s.empty() && (s[0] == '&' || s[0] == '*' || s[0] == '(')) s = text::trim(s.substr(1));
  std::size_t i = 0;
  while (i < s.size() && text::is_ident_char(s[i])) ++i;
  return s.substr(0, i);
}

std::string bound(const PatchTemplate& t, const std::string& key) {
  auto it = t.bound.find(key);
  return it == t.bound.end() ? std::string{} : it->second;
}

std::optional<std::int64_t> byte_length(const cmodel::Declaration* d) {
  if (!d || d->kind != cmodel::DeclKind::Array || !d->length) return std::nullopt;
  return *d->length * std::max(d->elem_size, 1);
}

// Statements of the template's function that precede the patch site.
std::vector<const cmodel::Statement*> before_site(const PatchTemplate& t, const cmodel::SourceModel& m) {
  std::vector<const cmodel::Statement*> out;
  const auto* f = m.function(t.function);
  if (!f) return out;
  for (const auto* s : m.body(*f))
    if (s->index < t.stmt_index) out.push_back(s);
  return out;
}

// Right-hand literal of an earlier `if (<size_expr> != N)` or `if (<size_expr> > N)` guard.
std::optional<std::string> size_guard_literal(const PatchTemplate& t, const cmodel::SourceModel& m,
                                              const std::string& size_expr) {
  std::string want = text::strip_ws(size_expr);
  std::optional<std::string> found;
  for (const auto* s : before_site(t, m)) {
    if (!text::starts_with_word(s->code, "if")) continue;
    auto open = s->code.find('(');
    if (open == std::string::npos) continue;
    auto close = text::match_bracket(s->code, open);
    if (close == std::string::npos) continue;
    std::string cond = s->code.substr(open + 1, close - open - 1);
    for (std::string op : {"!=", ">"}) {
      auto p = cond.find(op);
      if (p == std::string::npos) continue;
      if (op == ">" && (p + 1 < cond.size() && (cond[p + 1] == '=' || cond[p + 1] == '>'))) continue;
      if (op == ">" && p > 0 && (cond[p - 1] == '-' || cond[p - 1] == '>')) continue;
      std::string left = text::strip_ws(cond.substr(0, p)), right = text::trim(cond.substr(p + op.size()));
      if (left == want && m.resolve_int(right, t.function)) found = right;
    }
  }
  return found;
}

std::string size_of_shared(const std::string& sm) {
  std::string s = text::strip_ws(sm);
  auto p = s.rfind(".buffer");
  if (p == std::string::npos || p + 7 != s.size()) return {};
  return s.substr(0, p) + ".size";
}

}  // namespace

std::string_view to_string(ResolverSource s) {
  switch (s) {
    case ResolverSource::Heuristic: return "heuristic";
    case ResolverSource::External: return "external";
    case ResolverSource::Replay: return "replay";
  }
  return "heuristic";
}

IncompleteBindings::IncompleteBindings(const std::vector<std::string>& missing)
    : Error("IncompleteBindings", "unbound placeholders: $" + text::join(missing, ", $")), missing_(missing) {}

std::set<std::string> declared_placeholders(const PatchTemplate& t) {
  std::set<std::string> out;
  static const std::regex decl(R"(^\s*[A-Za-z_][A-Za-z0-9_\s]*[\s\*]\*?\s*\$([A-Za-z_][A-Za-z0-9_]*)\s*[\[=;])");
  for (const auto& l : t.lines) {
    if (l.op != LineOp::Insert) continue;
    std::smatch mt;
    if (std::regex_search(l.text, mt, decl)) out.insert(mt[1].str());
  }
  return out;
}

std::set<std::string> forbidden_names(const PatchTemplate& t, const cmodel::SourceModel& m, const History& history) {
  std::set<std::string> out = cmodel::names_in_scope(m, t.span.begin.line);
  for (const auto& s : m.statements) {
    if (s.kind == cmodel::StmtKind::Directive) continue;
    for (auto& id : text::identifiers(s.code)) out.insert(id);
  }
  for (const auto& f : m.functions) out.insert(f.name);
  for (const auto& [name, value] : m.macros) out.insert(name);
  out.insert(history.assigned.begin(), history.assigned.end());
  return out;
}

Bindings resolve_heuristic(const PatchTemplate& t, const cmodel::SourceModel& m, const History& history,
                           const FunctionClassification& fc) {
  Bindings b;
  auto wants = [&](const char* name) { return t.placeholders.count(name) > 0; };

  if (t.rule == "2.1" && wants("value")) {
    if (auto n = byte_length(m.find_decl(base_ident(bound(t, "dst")), t.function))) b["value"] = std::to_string(*n);
  } else if (t.rule == "2.2" && wants("value")) {
    const auto* d = m.find_decl(base_ident(bound(t, "base")), t.function);
    if (d && d->kind == cmodel::DeclKind::Array && d->length) b["value"] = std::to_string(*d->length - 1);
  } else if (t.rule == "1.1" && wants("size")) {
    if (auto n = m.resolve_int(bound(t, "len"), t.function))
      b["size"] = std::to_string(*n);
    else if (auto n2 = byte_length(m.find_decl(base_ident(bound(t, "plain")), t.function)))
      b["size"] = std::to_string(*n2);
  } else if (t.rule == "3.1" && wants("size")) {
    if (auto lit = size_guard_literal(t, m, size_of_shared(bound(t, "sm")))) b["size"] = *lit;
  } else if (t.rule == "3.2") {
    std::string sm = text::strip_ws(bound(t, "sm"));
    for (const auto* s : before_site(t, m)) {
      auto call = cmodel::find_call(s->code);
      if (!call || !fc.copy_fns.count(call->callee) || call->args.size() != 3) continue;
      if (text::strip_ws(cmodel::strip_casts(call->args[1])) != sm) continue;
      if (wants("buf")) b["buf"] = call->args[0];
      if (wants("size")) b["size"] = call->args[2];
    }
    if (wants("size") && !b.count("size"))
      if (auto lit = size_guard_literal(t, m, size_of_shared(sm))) b["size"] = *lit;
  }

  std::set<std::string> avoid = forbidden_names(t, m, history);
  for (const auto& name : templates::placeholder_tokens(templates::render(t))) {
    if (b.count(name) || !declared_placeholders(t).count(name)) continue;
    std::string cand = name;
    for (int k = 1; avoid.count(cand); ++k) cand = name + "_" + std::to_string(k);
    avoid.insert(cand);
    b[name] = cand;
  }
  return b;
}

std::string partial_render(const PatchTemplate& t, const Bindings& b) {
  std::vector<TemplateLine> lines = t.lines;
  for (auto& l : lines) l.text = substitute(l.text, b);
  return templates::render(lines);
}

std::string Prompt::serialize() const {
  std::ostringstream out;
  out << code << "\n\n" << textual;
  if (!history.empty()) {
    out << "\n\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
      if (i) out << "\n";
      out << "Q" << i + 1 << ": " << history[i].question << "\n";
      out << "A" << i + 1 << ": " << history[i].answer;
    }
  }
  return out.str();
}

Prompt build_prompt(const cmodel::SourceModel& m, const detector::Issue& issue, const PatchTemplate& t,
                    const History& history, const Bindings& partial) {
  Prompt p;
  p.code = "We have a C code file with bad partitioning issues:\n" + m.source;
  std::string tmpl = partial_render(t, partial);
  if (!tmpl.empty() && tmpl.back() == '\n') tmpl.pop_back();
  std::ostringstream q;
  q << "New repair:\n"
    << "Following is a code snippet from the above code in line " << issue.span.begin.line << ":\n"
    << text::trim(issue.statement) << "\n"
    << "It has a bad partitioning issue: " << detector::class_name(issue.kind) << ".\n"
    << "Repair the code with the following template code:\n"
    << tmpl << "\n"
    << "You need to deduce and replace the fields starting with $ in the template based on the above code context "
       "and previous repairs, and avoid using variable names that have already been defined in the code or in "
       "history repair.\n"
    << kInstruction;
  p.textual = q.str();
  p.history = history.pairs;
  return p;
}

Bindings parse_reply(const std::string& reply, const PatchTemplate& t, const Bindings& partial) {
  std::vector<std::string> got;
  for (auto& raw : text::split_lines(reply)) {
    std::string l = text::rtrim(raw);
    if (text::trim(l).empty() || text::trim(l).rfind("```", 0) == 0) continue;
    std::string lead = text::trim(l);
    if ((lead[0] == '+' || lead[0] == '-') && (lead.size() == 1 || lead[1] == ' ' || lead[1] == '\t'))
      lead = lead.substr(1);
    got.push_back(squeeze(lead));
  }

  std::vector<const TemplateLine*> want;
  for (const auto& l : t.lines) want.push_back(&l);
  if (got.size() != want.size()) {
    std::erase_if(want, [](const TemplateLine* l) { return l->op == LineOp::Delete; });
    if (got.size() != want.size())
      throw UnparseableReply("expected " + std::to_string(t.lines.size()) + " lines, got " +
                             std::to_string(got.size()));
  }

  Bindings b;
  for (std::size_t i = 0; i < want.size(); ++i) {
    std::string pattern_src = squeeze(substitute(want[i]->text, partial));
    std::string pattern;
    std::vector<std::string> names;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(pattern_src.begin(), pattern_src.end(), placeholder_re());
         it != std::sregex_iterator(); ++it) {
      pattern += regex_escape(pattern_src.substr(last, it->position(0) - last));
      names.push_back((*it)[1].str());
      pattern += "(.+?)";
      last = it->position(0) + it->length(0);
    }
    pattern += regex_escape(pattern_src.substr(last));
    std::smatch mt;
    if (!std::regex_match(got[i], mt, std::regex(pattern))) throw UnparseableReply(got[i]);
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::string v = text::trim(mt[k + 1].str());
      if (v.empty() || v.find('$') != std::string::npos) throw UnparseableReply(got[i]);
      auto [it, fresh] = b.emplace(names[k], v);
      if (!fresh && it->second != v) throw UnparseableReply(got[i]);
    }
  }
  for (const auto& [name, role] : t.roles)
    if (role == templates::Role::Name && b.count(name) && !is_identifier(b[name])) throw UnparseableReply(b[name]);
  return b;
}

ResolverOutcome resolve_external(const Prompt& p, const PatchTemplate& t, ModelClient& client,
                                 const std::set<std::string>& forbidden, const Bindings& partial,
                                 ResolverSource source, int max_requests) {
  ResolverOutcome out;
  out.source = source;
  std::set<std::string> fresh = declared_placeholders(t);
  Prompt current = p;
  for (int attempt = 0; attempt < max_requests; ++attempt) {
    std::string reply = client.complete(current.serialize());
    ++out.requests;
    out.raw_reply = reply;
    Bindings b = parse_reply(reply, t, partial);
    for (const auto& [k, v] : partial) b[k] = v;

    std::vector<std::string> clashes;
    std::set<std::string> seen;
    for (const auto& name : fresh) {
      auto it = b.find(name);
      if (it == b.end()) continue;
      if (forbidden.count(it->second) || !seen.insert(it->second).second) clashes.push_back(it->second);
    }
    if (clashes.empty()) {
      std::vector<std::string> missing;
      for (const auto& ph : t.placeholders)
        if (!b.count(ph)) missing.push_back(ph);
      if (!missing.empty()) throw IncompleteBindings(missing);
      out.bindings = std::move(b);
      return out;
    }
    if (attempt + 1 >= max_requests) throw CollisionAfterRetry(clashes.front());
    current.textual = p.textual + "\nNote: the names " + text::join(clashes, ", ") +
                      " are already defined in the code or in history repair; use different names.";
  }
  return out;
}

templates::ConcretePatch apply_bindings(const PatchTemplate& t, const Bindings& b) {
  templates::ConcretePatch c;
  c.span = t.span;
  c.stmt_index = t.stmt_index;
  c.rule = t.rule;
  std::vector<std::string> missing;
  for (const auto& l : t.lines) c.lines.push_back({l.op, substitute(l.text, b, &missing)});
  if (!missing.empty()) throw IncompleteBindings(missing);
  return c;
}

void remember(History& h, const Prompt& p, const std::string& answer, const PatchTemplate& t, const Bindings& b) {
  h.pairs.push_back({p.textual, answer});
  for (const auto& name : declared_placeholders(t))
    if (auto it = b.find(name); it != b.end()) h.assigned.insert(it->second);
}

}  // namespace tarepair::synth
