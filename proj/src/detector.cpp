#include "tarepair/detector.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "tarepair/text.hpp"

namespace tarepair::detector {

using cmodel::AbstractStmt;
using cmodel::SourceModel;
using cmodel::Statement;

std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::UnencryptedOutput: return "UnencryptedOutput";
    case IssueKind::InputValidationWeakness: return "InputValidationWeakness";
    case IssueKind::SharedMemoryUse: return "SharedMemoryUse";
  }
  return "";
}

std::string_view class_name(IssueKind k) {
  switch (k) {
    case IssueKind::UnencryptedOutput: return "Unencrypted Data Output";
    case IssueKind::InputValidationWeakness: return "Input Validation Weaknesses";
    case IssueKind::SharedMemoryUse: return "Direct Usage of Shared Memory";
  }
  return "";
}

namespace {

// Whitespace-free form with redundant outer parentheses removed.
std::string norm(std::string_view e) {
  std::string s = text::strip_ws(e);
  while (s.size() >= 2 && s.front() == '(' && text::match_bracket(s, 0) == s.size() - 1)
    s = s.substr(1, s.size() - 2);
  return s;
}

std::string base_ident(std::string_view expr) {
  std::string t = cmodel::strip_casts(expr);
  std::size_t i = 0;
  while (i < t.size() && (t[i] == '&' || t[i] == '*' || t[i] == '(' || t[i] == ' ')) ++i;
  std::size_t b = i;
  while (i < t.size() && text::is_ident_char(t[i])) ++i;
  if (b == i || !text::is_ident_start(t[b])) return {};
  return t.substr(b, i - b);
}

const dsl::FuncCall* call_of(const std::optional<AbstractStmt>& a) {
  return a ? std::get_if<dsl::FuncCall>(&a->node) : nullptr;
}

const dsl::Guard* guard_of(const std::optional<AbstractStmt>& a) {
  return a ? std::get_if<dsl::Guard>(&a->node) : nullptr;
}

std::string arg(const dsl::FuncCall& f, std::size_t i) { return i < f.args.size() ? cmodel::concrete(f.args[i]) : ""; }
std::string res(const dsl::FuncCall& f) { return f.result ? cmodel::concrete(*f.result) : ""; }

struct Item {
  const Statement* stmt;
  std::optional<AbstractStmt> abs;
};

struct FnView {
  const cmodel::FunctionDef* fn;
  std::vector<Item> items;
};

std::vector<FnView> views(const SourceModel& m, const FunctionClassification& fc) {
  std::vector<FnView> out;
  for (const auto& f : m.functions) {
    FnView v{&f, {}};
    for (const Statement* s : m.body(f)) v.items.push_back({s, cmodel::abstract_statement(*s, fc, m)});
    out.push_back(std::move(v));
  }
  return out;
}

Issue make_issue(IssueKind k, const std::string& hint, const Item& it, const AbstractStmt& abs,
                 std::map<std::string, std::string> ev) {
  Issue is;
  is.kind = k;
  is.span = it.stmt->span;
  is.statement = it.stmt->text;
  is.function = it.stmt->function;
  is.evidence = std::move(ev);
  is.rule_hint = hint;
  is.abs = abs;
  return is;
}

// Call sites `callee(args)` of functions defined in the model.
std::vector<std::pair<std::string, std::vector<std::string>>> calls_in(const std::string& code,
                                                                      const SourceModel& m) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (!text::is_ident_start(code[i]) || (i && text::is_ident_char(code[i - 1]))) continue;
    std::size_t e = i;
    while (e < code.size() && text::is_ident_char(code[e])) ++e;
    std::string name = code.substr(i, e - i);
    std::size_t p = e;
    while (p < code.size() && code[p] == ' ') ++p;
    if (p < code.size() && code[p] == '(' && m.function(name)) {
      std::size_t close = text::match_bracket(code, p);
      if (close != std::string::npos) {
        std::string inner = code.substr(p + 1, close - p - 1);
        out.push_back({name, text::trim(inner).empty() ? std::vector<std::string>{}
                                                       : text::split_top_level(inner, ',')});
      }
    }
    i = e - 1;
  }
  return out;
}

class Taint {
 public:
  Taint(const SourceModel& m, const FunctionClassification& fc, const std::vector<FnView>& vs) : m_(m), fc_(fc) {
    auto ids = text::identifiers(fc.input_param_pattern);
    input_base_ = ids.empty() ? "" : ids.front();
    // one level of interprocedural propagation: callee parameters receiving
    // input-derived arguments
    for (const auto& v : vs) {
      std::set<std::string> local = locals(v, {});
      for (const auto& it : v.items)
        for (const auto& [callee, args] : calls_in(it.stmt->code, m)) {
          const cmodel::FunctionDef* f = m.function(callee);
          for (std::size_t i = 0; i < args.size() && i < f->params.size(); ++i)
            if (tainted(args[i], local) || text::strip_ws(args[i]) == input_base_)
              param_taint_[callee].insert(f->params[i]);
        }
    }
    for (const auto& v : vs) fn_taint_[v.fn->name] = locals(v, param_taint_[v.fn->name]);
  }

  bool tainted(const std::string& expr, const std::set<std::string>& set) const {
    if (fc_.matches_input(expr)) return true;
    for (const auto& id : text::identifiers(expr))
      if (set.count(id)) return true;
    return false;
  }

  bool tainted(const std::string& expr, const std::string& fn) const {
    auto it = fn_taint_.find(fn);
    static const std::set<std::string> none;
    return tainted(expr, it == fn_taint_.end() ? none : it->second);
  }

  // Expression designating normal-side input data (a parameter or an alias of one).
  bool is_input(const std::string& expr, const std::string& fn) const {
    if (fc_.matches_input(expr)) return true;
    std::string b = base_ident(expr);
    auto it = param_taint_.find(fn);
    if (it != param_taint_.end() && it->second.count(b)) return true;
    auto al = alias_.find(fn);
    return al != alias_.end() && al->second.count(b);
  }

 private:
  std::set<std::string> locals(const FnView& v, std::set<std::string> seed) {
    std::set<std::string>& alias = alias_[v.fn->name];
    for (const auto& p : seed) alias.insert(p);
    for (const auto& it : v.items) {
      const Statement& s = *it.stmt;
      for (const auto& d : m_.declarations) {
        if (d.span != s.span || d.function != v.fn->name || d.is_param || d.init.empty()) continue;
        if (tainted(d.init, seed)) {
          seed.insert(d.name);
          if (d.kind == cmodel::DeclKind::Pointer) alias.insert(d.name);
        }
      }
      std::size_t len = 0;
      std::size_t pos = cmodel::find_assignment(s.code, &len);
      if (pos != std::string::npos) {
        std::string lhs = text::trim(std::string_view(s.code).substr(0, pos));
        std::string rhs = s.code.substr(pos + len);
        bool simple = !lhs.empty() && std::all_of(lhs.begin(), lhs.end(), text::is_ident_char);
        if (simple && tainted(rhs, seed)) {
          seed.insert(lhs);
          if (const auto* d = m_.find_decl(lhs, v.fn->name); d && d->kind == cmodel::DeclKind::Pointer)
            alias.insert(lhs);
        }
      }
    }
    return seed;
  }

  const SourceModel& m_;
  const FunctionClassification& fc_;
  std::string input_base_;
  std::map<std::string, std::set<std::string>> param_taint_;
  std::map<std::string, std::set<std::string>> fn_taint_;
  std::map<std::string, std::set<std::string>> alias_;
};

struct GuardUse {
  const dsl::Guard* g;
  int depth;
};

std::vector<GuardUse> guards_before(const FnView& v, std::size_t upto) {
  std::vector<GuardUse> out;
  for (std::size_t i = 0; i < upto; ++i)
    if (const dsl::Guard* g = guard_of(v.items[i].abs)) out.push_back({g, v.items[i].stmt->depth});
  return out;
}

bool is_guard_stmt(const Item& it) { return guard_of(it.abs) != nullptr; }

// Whether a dominating guard bounds `expr` from above (`upper`) or below.
bool bounded(const std::vector<GuardUse>& gs, int depth, const std::string& expr, bool upper, bool ne_counts) {
  std::string e = norm(expr);
  for (const auto& gu : gs) {
    if (gu.depth > depth) continue;
    const dsl::Guard& g = *gu.g;
    bool left = norm(cmodel::concrete(g.left)) == e;
    bool right = norm(cmodel::concrete(g.right)) == e;
    if (!left && !right) continue;
    using dsl::RelOp;
    if (ne_counts && g.op == RelOp::Ne) return true;
    bool gt = g.op == RelOp::Gt || g.op == RelOp::Ge;
    bool lt = g.op == RelOp::Lt || g.op == RelOp::Le;
    if (upper && ((left && gt) || (right && lt))) return true;
    if (!upper && ((left && lt) || (right && gt))) return true;
  }
  return false;
}

}  // namespace

std::vector<Issue> detect_unencrypted_output(const SourceModel& m, const FunctionClassification& fc) {
  std::vector<Issue> out;
  for (const auto& v : views(m, fc)) {
    const std::string& fn = v.fn->name;
    std::set<std::string> ciphers, deep, reads, shared;
    auto sensitive = [&](const std::string& expr) {
      std::string t = cmodel::strip_casts(text::trim(expr));
      if (t.empty() || t[0] == '"' || t[0] == '\'') return false;
      std::string b = base_ident(t);
      if (ciphers.count(norm(t)) || ciphers.count(b)) return false;
      if (fc.matches_input(t) || fc.matches_output(t) || fc.matches_shared(t)) return false;
      if (b.empty()) return false;
      if (reads.count(b)) return true;
      if (deep.count(b) || shared.count(b) || m.macros.count(b)) return false;
      const cmodel::Declaration* d = m.find_decl(b, fn);
      // Parameters are opaque here: their origin is not tracked across calls.
      return d && !d->is_param;
    };
    for (const auto& it : v.items) {
      const dsl::FuncCall* c = call_of(it.abs);
      if (!c) continue;
      switch (c->kind) {
        case dsl::CallKind::Enc:
          ciphers.insert(norm(arg(*c, 1)));
          break;
        case dsl::CallKind::Read:
          reads.insert(res(*c));
          break;
        case dsl::CallKind::Shallow:
          shared.insert(res(*c));
          break;
        case dsl::CallKind::Copy: {
          std::string dst = arg(*c, 0), src = arg(*c, 1);
          if (fc.matches_output(dst)) {
            if (sensitive(src))
              out.push_back(make_issue(IssueKind::UnencryptedOutput, "1.1", it, *it.abs,
                                       {{"out", dst}, {"plain", src}, {"len", arg(*c, 2)}}));
          } else if (fc.matches_input(src) || shared.count(base_ident(src))) {
            deep.insert(base_ident(dst));
          }
          break;
        }
        case dsl::CallKind::Snprint: {
          std::string dst = arg(*c, 0);
          if (!fc.matches_output(dst)) break;
          std::vector<std::string> args;
          bool leak = false;
          for (std::size_t i = 2; i < c->args.size(); ++i) {
            args.push_back(arg(*c, i));
            leak = leak || sensitive(args.back());
          }
          if (leak)
            out.push_back(make_issue(IssueKind::UnencryptedOutput, "1.2", it, *it.abs,
                                     {{"out", dst}, {"format", arg(*c, 1)}, {"args", text::join(args, ", ")}}));
          break;
        }
        default:
          break;
      }
    }
  }
  return out;
}

std::vector<Issue> detect_input_validation(const SourceModel& m, const FunctionClassification& fc) {
  std::vector<Issue> out;
  auto vs = views(m, fc);
  Taint taint(m, fc, vs);
  for (const auto& v : vs) {
    const std::string& fn = v.fn->name;
    for (std::size_t i = 0; i < v.items.size(); ++i) {
      const Item& it = v.items[i];
      if (it.stmt->kind != cmodel::StmtKind::Simple || is_guard_stmt(it)) continue;
      const dsl::FuncCall* c = call_of(it.abs);
      auto guards = guards_before(v, i);
      int depth = it.stmt->depth;
      if (c && c->kind == dsl::CallKind::Copy) {
        std::string dst = arg(*c, 0), src = arg(*c, 1), len = arg(*c, 2);
        if (!fc.matches_output(dst) && taint.is_input(src, fn) && taint.tainted(len, fn) &&
            !bounded(guards, depth, len, true, true)) {
          out.push_back(make_issue(IssueKind::InputValidationWeakness, "2.1", it, *it.abs,
                                   {{"dst", dst}, {"in", src}, {"len", len}}));
          continue;
        }
      }
      if (c && (c->kind == dsl::CallKind::Shallow || c->kind == dsl::CallKind::Mutate)) continue;
      for (const auto& acc : cmodel::array_accesses(*it.stmt, fc)) {
        bool idx_input = taint.tainted(acc.index, fn);
        bool base_input = taint.is_input(acc.base, fn);
        if (!idx_input && !base_input) continue;
        if (bounded(guards, depth, acc.index, true, false) && bounded(guards, depth, acc.index, false, false))
          continue;
        AbstractStmt a;
        a.stmt_index = it.stmt->index;
        a.span = it.stmt->span;
        a.text = it.stmt->text;
        a.node = dsl::FuncCall{dsl::CallKind::Array, {dsl::Literal{acc.base}, dsl::Literal{acc.index}}, std::nullopt};
        out.push_back(make_issue(IssueKind::InputValidationWeakness, "2.2", it, a,
                                 {{"base", acc.base}, {"index", acc.index}}));
        break;
      }
    }
  }
  return out;
}

std::vector<Issue> detect_shared_memory(const SourceModel& m, const FunctionClassification& fc) {
  std::vector<Issue> out;
  for (const auto& v : views(m, fc)) {
    std::vector<std::string> copied_from;
    bool hash_checked = false;
    for (const auto& it : v.items) {
      if (const dsl::Guard* g = guard_of(it.abs)) {
        if (std::holds_alternative<std::shared_ptr<dsl::EqualTerm>>(g->left)) hash_checked = true;
        continue;
      }
      const dsl::FuncCall* c = call_of(it.abs);
      if (!c) continue;
      std::string sm;
      if (c->kind == dsl::CallKind::Copy) {
        if (fc.matches_shared(arg(*c, 1))) copied_from.push_back(text::strip_ws(fc.find_shared(arg(*c, 1))));
        continue;
      }
      if (c->kind == dsl::CallKind::Shallow) sm = fc.find_shared(arg(*c, 0));
      else if (c->kind == dsl::CallKind::Mutate) sm = res(*c);
      else continue;
      bool verified = hash_checked && std::find(copied_from.begin(), copied_from.end(), text::strip_ws(sm)) !=
                                          copied_from.end();
      if (verified) continue;
      if (c->kind == dsl::CallKind::Shallow)
        out.push_back(make_issue(IssueKind::SharedMemoryUse, "3.1", it, *it.abs,
                                 {{"sm", arg(*c, 0)}, {"buf", res(*c)}}));
      else
        out.push_back(make_issue(IssueKind::SharedMemoryUse, "3.2", it, *it.abs,
                                 {{"value", arg(*c, 0)}, {"sm", sm}}));
    }
  }
  return out;
}

std::vector<Issue> detect(const SourceModel& m, const FunctionClassification& fc) {
  std::vector<Issue> all = detect_unencrypted_output(m, fc);
  for (auto* f : {&detect_input_validation, &detect_shared_memory}) {
    auto part = (*f)(m, fc);
    all.insert(all.end(), part.begin(), part.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const Issue& a, const Issue& b) {
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].id = "I" + std::to_string(i + 1);
  return all;
}

}  // namespace tarepair::detector
