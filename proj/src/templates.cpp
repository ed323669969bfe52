#include "tarepair/templates.hpp"

#include <algorithm>
#include <regex>

#include "tarepair/text.hpp"

namespace tarepair::templates {

using dsl::CallKind;

std::set<std::string> MatchBindings::names() const {
  std::set<std::string> out;
  for (const auto& [k, v] : scalars) out.insert(k);
  for (const auto& [k, v] : lists) out.insert(k);
  return out;
}

namespace {

std::optional<CallKind> kind_of(const dsl::Node& n) {
  if (auto* f = std::get_if<dsl::FuncCall>(&n)) return f->kind;
  return std::nullopt;
}

bool bind_scalar(MatchBindings& b, const std::string& name, const std::string& value) {
  auto [it, fresh] = b.scalars.emplace(name, value);
  return fresh || text::strip_ws(it->second) == text::strip_ws(value);
}

bool unify(const dsl::Term& pat, const dsl::Term& con, MatchBindings& b) {
  std::string value = cmodel::concrete(con);
  if (auto* p = dsl::as_placeholder(pat)) return p->is_discard() || bind_scalar(b, p->name, value);
  if (auto* eq = std::get_if<std::shared_ptr<dsl::EqualTerm>>(&pat)) {
    auto* ceq = std::get_if<std::shared_ptr<dsl::EqualTerm>>(&con);
    return ceq && unify((*eq)->lhs, (*ceq)->lhs, b) && unify((*eq)->rhs, (*ceq)->rhs, b);
  }
  return text::strip_ws(dsl::render_term(pat)) == text::strip_ws(value);
}

}  // namespace

std::optional<MatchBindings> match_trigger(const dsl::Rule& rule, const cmodel::AbstractStmt& stmt) {
  if (rule.trigger.nodes.size() != 1) return std::nullopt;
  MatchBindings b;
  b.stmt = stmt;
  const dsl::Node& pat = rule.trigger.nodes.front();
  if (auto* pf = std::get_if<dsl::FuncCall>(&pat)) {
    auto* cf = std::get_if<dsl::FuncCall>(&stmt.node);
    if (!cf || cf->kind != pf->kind) return std::nullopt;
    std::size_t n = pf->args.size();
    const dsl::Placeholder* last = n ? dsl::as_placeholder(pf->args.back()) : nullptr;
    bool variadic = last && rule.lists.count(last->name);
    if (variadic ? cf->args.size() < n : cf->args.size() != n) return std::nullopt;
    std::size_t fixed = variadic ? n - 1 : n;
    for (std::size_t i = 0; i < fixed; ++i)
      if (!unify(pf->args[i], cf->args[i], b)) return std::nullopt;
    if (variadic) {
      auto& list = b.lists[last->name];
      for (std::size_t i = fixed; i < cf->args.size(); ++i) list.push_back(cmodel::concrete(cf->args[i]));
    }
    if (pf->result) {
      auto* rp = dsl::as_placeholder(*pf->result);
      if (!(rp && rp->is_discard())) {
        if (!cf->result || !unify(*pf->result, *cf->result, b)) return std::nullopt;
      }
    }
    return b;
  }
  const auto& pg = std::get<dsl::Guard>(pat);
  auto* cg = std::get_if<dsl::Guard>(&stmt.node);
  if (!cg || cg->op != pg.op) return std::nullopt;
  if (!unify(pg.left, cg->left, b) || !unify(pg.right, cg->right, b)) return std::nullopt;
  return b;
}

const dsl::Rule& select_rule(const detector::Issue& issue, const std::vector<dsl::Rule>& rules) {
  const dsl::Rule* fallback = nullptr;
  for (const auto& r : rules) {
    if (r.trigger.nodes.size() != 1 || !match_trigger(r, issue.abs)) continue;
    if (r.name == issue.rule_hint) return r;
    if (!fallback) fallback = &r;
  }
  if (fallback) return *fallback;
  throw NoApplicableRule(std::string(detector::to_string(issue.kind)));
}

namespace {

class Lowerer {
 public:
  Lowerer(const dsl::Rule& r, const MatchBindings& b, const cmodel::SourceModel& m, const FunctionClassification& fc,
          PatchTemplate& t)
      : rule_(r), b_(b), m_(m), fc_(fc), t_(t) {
    if (b.stmt.stmt_index < m.statements.size()) original_ = m.statements[b.stmt.stmt_index].code;
    if (original_.empty()) original_ = text::normalize_ws(b.stmt.text);
  }

  const std::string& original() const { return original_; }

  std::vector<std::string> lower(const dsl::Node& n) {
    if (auto* g = std::get_if<dsl::Guard>(&n)) return lower_guard(*g);
    const auto& f = std::get<dsl::FuncCall>(n);
    auto a = [&](std::size_t i, Role role) { return term(f.args.at(i), role); };
    auto result = [&](Role role) { return f.result ? term(*f.result, role) : std::string(); };
    const auto* call = b_.stmt.call ? &*b_.stmt.call : nullptr;
    switch (f.kind) {
      case CallKind::Malloc: {
        std::string size = a(0, Role::Value);
        // a symbolic bound is not a usable array length; leave it to synthesis
        if (size.find('$') == std::string::npos && !text::parse_int(size)) size = fresh("size", Role::Value);
        return {fc_.lower_buffer_type + " " + result(Role::Name) + "[" + size + "] = {0};"};
      }
      case CallKind::MulMalloc: {
        auto args = list(f.args.at(0));
        auto names = expand(f.result ? *f.result : dsl::Term{}, args.size());
        std::vector<std::string> out;
        for (std::size_t i = 0; i < args.size(); ++i)
          out.push_back(fc_.lower_buffer_type + " " + names[i] + "[strlen(" + args[i] + ")] = {0};");
        return out;
      }
      case CallKind::Enc:
        return {fc_.lower_enc + "(" + a(0, Role::Name) + ", " + a(1, Role::Name) + ", " + a(2, Role::Value) + ");"};
      case CallKind::MulEnc: {
        auto args = list(f.args.at(0));
        auto names = expand(f.args.back(), args.size());
        std::vector<std::string> out;
        for (std::size_t i = 0; i < args.size(); ++i)
          out.push_back(fc_.lower_enc + "(" + args[i] + ", " + names[i] + ", strlen(" + args[i] + "));");
        return out;
      }
      case CallKind::Copy: {
        std::string callee = fc_.lower_copy;
        if (trigger_kind() == CallKind::Copy && call) callee = call->callee;
        return {callee + "(" + a(0, Role::Name) + ", " + a(1, Role::Name) + ", " + a(2, Role::Value) + ");"};
      }
      case CallKind::Snprint: {
        if (!call || call->args.size() < 2) throw LoweringError(dsl::render_node(n));
        std::vector<std::string> parts{a(0, Role::Name), call->args[1], a(1, Role::Value)};
        for (std::size_t i = 2; i < f.args.size(); ++i) {
          auto* p = dsl::as_placeholder(f.args[i]);
          if (p && (b_.lists.count(p->name) || expanded_.count(p->name))) {
            auto v = list(f.args[i]);
            parts.insert(parts.end(), v.begin(), v.end());
          } else {
            parts.push_back(term(f.args[i], Role::Name));
          }
        }
        return {call->callee + "(" + text::join(parts, ", ") + ");"};
      }
      case CallKind::Array: {
        std::string out = original_;
        std::string base = a(0, Role::Name), index = a(1, Role::Value);
        auto ob = b_.stmt.node.index() == 0 ? std::get<dsl::FuncCall>(b_.stmt.node).args : std::vector<dsl::Term>{};
        if (ob.size() == 2) {
          out = text::replace_expr(out, cmodel::concrete(ob[0]) + "[" + cmodel::concrete(ob[1]) + "]",
                                   base + "[" + index + "]");
        }
        return {out};
      }
      case CallKind::Read: {
        std::string h = result(Role::Name);
        return {fc_.lower_buffer_type + " " + h + "[" + std::to_string(fc_.hash_len) + "];",
                fc_.lower_read + "(" + h + ");"};
      }
      case CallKind::Hash: {
        std::string v = a(1, Role::Name);
        return {fc_.lower_buffer_type + " " + v + "[" + std::to_string(fc_.hash_len) + "];",
                fc_.lower_hash + "(" + v + ", " + a(0, Role::Name) + ", " + a(2, Role::Value) + ");"};
      }
      case CallKind::Write:
        return {fc_.lower_write + "(" + a(0, Role::Name) + ");"};
      case CallKind::Mutate: {
        const auto* orig = std::get_if<dsl::FuncCall>(&b_.stmt.node);
        if (!orig || orig->kind != CallKind::Mutate || !orig->result) throw LoweringError(dsl::render_node(n));
        std::string out = text::replace_expr(original_, cmodel::concrete(*orig->result), result(Role::Name));
        std::string value = a(0, Role::Value), old_value = cmodel::concrete(orig->args.at(0));
        if (text::strip_ws(value) != text::strip_ws(old_value)) out = text::replace_expr(out, old_value, value);
        return {out};
      }
      case CallKind::Shallow:
        return {fc_.lower_buffer_type + " *" + result(Role::Name) + " = " + a(0, Role::Name) + ";"};
    }
    throw LoweringError(dsl::render_node(n));
  }

  std::optional<CallKind> trigger_kind() const { return kind_of(rule_.trigger.nodes.front()); }

 private:
  std::vector<std::string> lower_guard(const dsl::Guard& g) {
    std::string left;
    if (auto* eq = std::get_if<std::shared_ptr<dsl::EqualTerm>>(&g.left)) {
      left = fc_.lower_compare + "(" + term((*eq)->lhs, Role::Name) + ", " + term((*eq)->rhs, Role::Name) + ", " +
             std::to_string(fc_.hash_len) + ")";
    } else {
      left = term(g.left, Role::Value);
    }
    std::string right = term(g.right, Role::Value);
    if (g.op == dsl::RelOp::Lt && text::strip_ws(right) == "0" && maybe_unsigned(left))
      t_.notes.push_back("guard `" + left + " < 0` may be tautological: operand looks unsigned");
    return {"if (" + left + " " + std::string(dsl::to_string(g.op)) + " " + right + ") {",
            "    return " + fc_.lower_ecode + ";", "}"};
  }

  bool maybe_unsigned(const std::string& expr) const {
    if (expr.find(".value.") != std::string::npos || expr.find(".memref.size") != std::string::npos) return true;
    for (const auto& id : text::identifiers(expr)) {
      const auto* d = m_.find_decl(id, function());
      if (d && (d->type.find("unsigned") != std::string::npos || d->type.rfind("uint", 0) == 0 ||
                d->type == "size_t"))
        return true;
    }
    return false;
  }

  std::string function() const {
    return b_.stmt.stmt_index < m_.statements.size() ? m_.statements[b_.stmt.stmt_index].function : "";
  }

  std::string fresh(const std::string& name, Role role) {
    t_.roles.emplace(name, role);
    return "$" + name;
  }

  std::string term(const dsl::Term& t, Role role) {
    if (auto* p = dsl::as_placeholder(t)) {
      if (auto it = b_.scalars.find(p->name); it != b_.scalars.end()) return it->second;
      if (b_.lists.count(p->name)) throw LoweringError("list placeholder $" + p->name + " in a scalar slot");
      return fresh(p->name, role);
    }
    return dsl::render_term(t);
  }

  std::vector<std::string> list(const dsl::Term& t) {
    auto* p = dsl::as_placeholder(t);
    if (!p) return {dsl::render_term(t)};
    if (auto it = b_.lists.find(p->name); it != b_.lists.end()) return it->second;
    if (auto it = expanded_.find(p->name); it != expanded_.end()) return it->second;
    return {term(t, Role::Name)};
  }

  // One fresh name per list element: $ciphers -> $cipher0, $cipher1, ...
  std::vector<std::string> expand(const dsl::Term& t, std::size_t n) {
    auto* p = dsl::as_placeholder(t);
    if (!p || p->is_discard()) throw LoweringError("expansion needs a placeholder");
    if (auto it = expanded_.find(p->name); it != expanded_.end()) return it->second;
    std::string stem = p->name;
    if (stem.size() > 1 && stem.back() == 's') stem.pop_back();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(fresh(stem + std::to_string(i), Role::Name));
    expanded_[p->name] = names;
    return names;
  }

  const dsl::Rule& rule_;
  const MatchBindings& b_;
  const cmodel::SourceModel& m_;
  const FunctionClassification& fc_;
  PatchTemplate& t_;
  std::string original_;
  std::map<std::string, std::vector<std::string>> expanded_;
};

}  // namespace

PatchTemplate instantiate(const dsl::Rule& rule, const MatchBindings& b, const cmodel::SourceModel& m,
                          const FunctionClassification& fc) {
  PatchTemplate t;
  t.rule = rule.name;
  t.span = b.stmt.span;
  t.stmt_index = b.stmt.stmt_index;
  if (t.stmt_index < m.statements.size()) t.function = m.statements[t.stmt_index].function;
  t.bound = b.scalars;
  Lowerer low(rule, b, m, fc, t);

  std::vector<std::vector<std::string>> lowered;
  for (const auto& n : rule.transformer.nodes) lowered.push_back(low.lower(n));

  // The first transformer node of the trigger's kind replaces the original statement.
  std::optional<std::size_t> counterpart;
  auto tk = low.trigger_kind();
  for (std::size_t i = 0; i < rule.transformer.nodes.size() && tk; ++i)
    if (kind_of(rule.transformer.nodes[i]) == tk) {
      counterpart = i;
      break;
    }

  const std::string& orig = low.original();
  if (!counterpart) t.lines.push_back({LineOp::Delete, orig});
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    if (counterpart && *counterpart == i) {
      bool same = lowered[i].size() == 1 && text::normalize_ws(lowered[i][0]) == text::normalize_ws(orig);
      if (same) {
        t.lines.push_back({LineOp::Keep, orig});
        continue;
      }
      t.lines.push_back({LineOp::Delete, orig});
    }
    for (auto& l : lowered[i]) t.lines.push_back({LineOp::Insert, l});
  }
  for (const auto& l : t.lines)
    if (l.op == LineOp::Insert)
      for (auto& p : placeholder_tokens(l.text)) t.placeholders.insert(p);
  for (auto it = t.roles.begin(); it != t.roles.end();)
    it = t.placeholders.count(it->first) ? std::next(it) : t.roles.erase(it);
  return t;
}

std::vector<std::string> placeholder_tokens(std::string_view s) {
  static const std::regex re(R"(\$([A-Za-z_][A-Za-z0-9_]*))");
  std::vector<std::string> out;
  std::string str(s);
  for (auto it = std::sregex_iterator(str.begin(), str.end(), re); it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::string render(const std::vector<TemplateLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.op == LineOp::Insert ? "+ " : l.op == LineOp::Delete ? "- " : "  ";
    out += l.text;
    out += '\n';
  }
  return out;
}

std::string render(const PatchTemplate& t) { return render(t.lines); }

std::vector<TemplateLine> parse_block(std::string_view block) {
  std::vector<TemplateLine> out;
  for (const auto& raw : text::split_lines(block)) {
    if (text::trim(raw).empty()) continue;
    TemplateLine l;
    if (raw[0] == '+') l.op = LineOp::Insert;
    else if (raw[0] == '-') l.op = LineOp::Delete;
    else l.op = LineOp::Keep;
    std::string_view rest = std::string_view(raw).substr(raw[0] == '+' || raw[0] == '-' ? 1 : 0);
    l.text = text::trim(rest);
    out.push_back(std::move(l));
  }
  return out;
}

std::string canonical(const std::vector<TemplateLine>& lines) {
  std::map<std::string, std::string> names;
  std::string out;
  for (const auto& l : lines) {
    out += l.op == LineOp::Insert ? '+' : l.op == LineOp::Delete ? '-' : ' ';
    std::string s = text::strip_ws(l.text);
    for (auto& p : placeholder_tokens(s))
      if (!names.count(p)) names[p] = "$" + std::to_string(names.size() + 1);
    std::string r;
    for (std::size_t i = 0; i < s.size();) {
      if (s[i] == '$') {
        std::size_t e = i + 1;
        while (e < s.size() && text::is_ident_char(s[e])) ++e;
        auto it = names.find(s.substr(i + 1, e - i - 1));
        r += it != names.end() ? it->second : s.substr(i, e - i);
        i = e;
      } else {
        r += s[i++];
      }
    }
    out += r;
    out += '\n';
  }
  return out;
}

}  // namespace tarepair::templates
