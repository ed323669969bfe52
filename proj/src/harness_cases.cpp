#include <algorithm>
#include <regex>
#include <sstream>

#include "tarepair/harness.hpp"
#include "tarepair/text.hpp"

namespace tarepair::harness {

using cmodel::ParamType;
using templates::LineOp;

std::string_view to_string(Expected e) {
  switch (e) {
    case Expected::Success: return "Success";
    case Expected::ErrorBadParameters: return "ErrorBadParameters";
    case Expected::CiphertextOf: return "CiphertextOf";
  }
  return "Success";
}

namespace {

struct ParamRef {
  int slot = -1;
  std::string field;  // memref.buffer, memref.size, value.a, value.b
};

std::optional<ParamRef> param_ref(std::string_view expr) {
  static const std::regex re(R"(\[\s*(\d+)\s*\]\s*\.\s*(memref|value)\s*\.\s*(\w+))");
  std::string s(expr);
  std::smatch mt;
  if (!std::regex_search(s, mt, re)) return std::nullopt;
  return ParamRef{std::stoi(mt[1].str()), mt[2].str() + "." + mt[3].str()};
}

// `if (L > R) {` guards among the inserted lines, in order.
std::vector<std::pair<std::string, std::string>> upper_guards(const templates::ConcretePatch& p) {
  static const std::regex re(R"(^\s*if\s*\((.*\S)\s+>\s+(\S.*)\)\s*\{?\s*$)");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& l : p.lines) {
    std::smatch mt;
    if (l.op == LineOp::Insert && std::regex_match(l.text, mt, re)) out.emplace_back(mt[1].str(), mt[2].str());
  }
  return out;
}

std::string unescape_c_string(std::string_view lit) {
  std::string body(lit.substr(1, lit.size() - 2)), out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\' || i + 1 == body.size()) {
      out += body[i];
      continue;
    }
    char c = body[++i];
    switch (c) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '0': out += '\0'; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<std::string> string_init(const cmodel::SourceModel& m, std::string_view name, std::string_view fn) {
  const auto* d = m.find_decl(name, fn);
  if (!d) return std::nullopt;
  std::string init = text::trim(d->init);
  if (init.size() < 2 || init.front() != '"' || init.back() != '"') return std::nullopt;
  return unescape_c_string(init);
}

std::string base_name(std::string_view e) {
  std::string s = text::trim(cmodel::strip_casts(e));
  while (!s.empty() && (s[0] == '&' || s[0] == '*' || s[0] == '(')) s = text::trim(s.substr(1));
  std::size_t i = 0;
  while (i < s.size() && text::is_ident_char(s[i])) ++i;
  return s.substr(0, i);
}

ParamType slot_kind(const cmodel::Command& cmd, int slot, ParamType fallback) {
  if (slot < 0 || slot > 3) throw UnsupportedParamType("slot " + std::to_string(slot));
  ParamType t = cmd.params[static_cast<std::size_t>(slot)];
  return t == ParamType::None ? fallback : t;
}

// Third argument of an inserted copy naming `src` as source or destination.
std::optional<std::string> copy_len(const templates::ConcretePatch& p, const std::string& shared) {
  for (const auto& l : p.lines) {
    if (l.op != LineOp::Insert) continue;
    auto call = cmodel::find_call(l.text);
    if (!call || call->args.size() != 3) continue;
    std::string want = text::strip_ws(shared);
    if (text::strip_ws(call->args[0]) == want || text::strip_ws(call->args[1]) == want) return call->args[2];
  }
  return std::nullopt;
}

TestCase base_case(const detector::Issue& issue, const cmodel::Command& cmd, int n) {
  TestCase c;
  c.id = issue.id + "-" + std::to_string(n);
  c.issue_id = issue.id;
  c.command = cmd.id;
  c.command_value = cmd.value.value_or(0);
  return c;
}

}  // namespace

std::vector<TestCase> generate_cases(const detector::Issue& issue, const templates::ConcretePatch& patch,
                                     const cmodel::SourceModel& m, const cmodel::ClientSpec& spec,
                                     const CaseOptions& opt) {
  const cmodel::Command* cmd = spec.command_for_function(issue.function);
  if (!cmd) throw Error("NoCommand", "no command dispatches to " + issue.function);
  const std::string& fn = issue.function;
  auto ev = [&](const char* k) {
    auto it = issue.evidence.find(k);
    return it == issue.evidence.end() ? std::string{} : it->second;
  };
  std::vector<TestCase> out;

  if (issue.kind == detector::IssueKind::UnencryptedOutput) {
    TestCase c = base_case(issue, *cmd, 1);
    c.expected = Expected::CiphertextOf;
    c.row = "ENC(x)";
    auto ref = param_ref(ev("out"));
    if (!ref) throw UnsupportedParamType("output `" + ev("out") + "` is not a parameter");
    std::int64_t size = opt.default_out_size;
    if (patch.rule == "1.1") {
      auto len = m.resolve_int(ev("len"), fn);
      if (len) size = *len;
      if (auto s = string_init(m, base_name(ev("plain")), fn); s && len) {
        std::string x = s->substr(0, static_cast<std::size_t>(*len));
        x.resize(static_cast<std::size_t>(*len), '\0');
        c.plaintext = x;
        c.cipher.push_back(stub_cipher(x, opt.cipher_key));
      } else {
        c.note = "plaintext not statically known; only inequality is checked";
      }
    } else {
      // Formatted output: cipher pieces of each `%s` argument in order.
      std::string format = ev("format");
      std::vector<std::string> args = text::split_top_level(ev("args"), ',');
      bool known = format.size() >= 2 && format.front() == '"';
      std::string plain;
      if (known) {
        std::string f = unescape_c_string(format);
        std::size_t ai = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (f[i] != '%' || i + 1 == f.size()) {
            plain += f[i];
            continue;
          }
          char spec_c = f[++i];
          if (spec_c == '%') {
            plain += '%';
            continue;
          }
          auto s = spec_c == 's' && ai < args.size() ? string_init(m, base_name(args[ai]), fn) : std::nullopt;
          ++ai;
          if (!s) {
            known = false;
            break;
          }
          plain += *s;
          c.cipher.push_back(stub_cipher(*s, opt.cipher_key));
        }
      }
      if (known) {
        c.plaintext = plain;
      } else {
        c.cipher.clear();
        c.note = "format arguments not statically known; only inequality is checked";
      }
    }
    c.params.push_back({ref->slot, slot_kind(*cmd, ref->slot, ParamType::MemrefOut), size, "zero", false});
    out.push_back(c);
    return out;
  }

  if (issue.kind == detector::IssueKind::InputValidationWeakness) {
    auto guards = upper_guards(patch);
    if (guards.empty()) throw BoundNotExtractable("repair has no upper bound guard");
    auto [left, right] = guards.front();
    auto bound = m.resolve_int(right, fn);
    std::string note;
    if (!bound) note = BoundNotExtractable("bound `" + right + "` is not a literal; pass it at run time").what();

    struct Row {
      const char* text;
      std::int64_t delta;
      Expected expected;
    };
    if (patch.rule == "2.1") {
      auto ref = param_ref(left);
      if (!ref) throw UnsupportedParamType("length `" + left + "` is not a parameter");
      bool memref = ref->field.rfind("memref", 0) == 0;
      const Row rows[] = {{"len(x) < n", -1, Expected::Success},
                          {"len(x) = n", 0, Expected::Success},
                          {"len(x) > n", 1, Expected::ErrorBadParameters}};
      int n = 1;
      for (const auto& r : rows) {
        TestCase c = base_case(issue, *cmd, n++);
        c.row = r.text;
        c.expected = r.expected;
        c.bound = right;
        c.note = note;
        ParamType kind = slot_kind(*cmd, ref->slot, memref ? ParamType::MemrefIn : ParamType::ValueIn);
        c.params.push_back({ref->slot, kind, bound ? *bound + r.delta : r.delta, memref ? "fill:41" : "", !bound});
        out.push_back(c);
      }
      return out;
    }

    // Index form. With the guard `index > v` the accessible length is v + 1.
    std::string index = left;
    static const std::regex affine(R"(^(.*\.\s*value\s*\.\s*[ab])\s*(?:([+-])\s*(\w+))?$)");
    std::smatch mt;
    std::string idx = text::trim(index);
    if (std::regex_match(idx, mt, affine)) {
      auto ref = param_ref(mt[1].str());
      std::int64_t c0 = 0;
      if (mt[2].matched) {
        auto k = m.resolve_int(mt[3].str(), fn);
        if (!k) throw BoundNotExtractable("index offset `" + mt[3].str() + "` is not a literal");
        c0 = mt[2].str() == "+" ? *k : -*k;
      }
      const Row rows[] = {{"len(x) < n", 1, Expected::ErrorBadParameters},
                          {"len(x) = n", 0, Expected::Success},
                          {"len(x) > n", -1, Expected::Success}};
      int n = 1;
      for (const auto& r : rows) {
        TestCase c = base_case(issue, *cmd, n++);
        c.row = r.text;
        c.expected = r.expected;
        c.bound = right;
        c.note = note;
        // index i = v + delta, input P solves P + c0 = i modulo 2^32
        std::int64_t amount = bound ? (*bound + r.delta - c0) : (r.delta - c0);
        if (bound) amount = static_cast<std::int64_t>(static_cast<std::uint32_t>(amount));
        c.params.push_back({ref->slot, slot_kind(*cmd, ref->slot, ParamType::ValueIn), amount, "", !bound});
        out.push_back(c);
      }
      return out;
    }
    // Input buffer indexed by a fixed position: vary its size against n = index + 1.
    auto lit = m.resolve_int(idx, fn);
    const auto* d = m.find_decl(base_name(ev("base")), fn);
    auto ref = d ? param_ref(d->init) : param_ref(ev("base"));
    if (!lit || !ref) throw BoundNotExtractable("index `" + idx + "` is neither input-derived nor literal");
    const Row rows[] = {{"len(x) < n", -1, Expected::ErrorBadParameters},
                        {"len(x) = n", 0, Expected::Success},
                        {"len(x) > n", 1, Expected::Success}};
    int n = 1;
    for (const auto& r : rows) {
      TestCase c = base_case(issue, *cmd, n++);
      c.row = r.text;
      c.expected = r.expected;
      c.bound = std::to_string(*lit + 1);
      c.params.push_back({ref->slot, slot_kind(*cmd, ref->slot, ParamType::MemrefIn), *lit + 1 + r.delta, "fill:41",
                          false});
      out.push_back(c);
    }
    return out;
  }

  // Shared memory: untampered run, then one flipped byte before the invoke.
  std::string sm = ev("sm");
  auto ref = param_ref(sm);
  if (!ref) throw UnsupportedParamType("shared region `" + sm + "` is not a parameter");
  std::int64_t size = opt.default_out_size;
  std::string note;
  if (auto len = copy_len(patch, sm); len && m.resolve_int(*len, fn))
    size = *m.resolve_int(*len, fn);
  else
    note = "shared region size not statically known; default used";
  ParamType kind = slot_kind(*cmd, ref->slot, ParamType::MemrefIn);
  TestCase a = base_case(issue, *cmd, 1);
  a.row = "x";
  a.expected = Expected::Success;
  a.note = note;
  a.params.push_back({ref->slot, kind, size, "seq", false});
  TestCase b = a;
  b.id = issue.id + "-2";
  b.row = "x ~> y";
  b.expected = Expected::ErrorBadParameters;
  b.tamper = Tamper{ref->slot, 0};
  out.push_back(a);
  out.push_back(b);
  return out;
}

}  // namespace tarepair::harness
