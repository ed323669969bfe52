#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "tarepair/harness.hpp"
#include "tarepair/text.hpp"

namespace tarepair::harness {

using cmodel::ParamType;

namespace {

bool is_memref(ParamType t) { return t == ParamType::MemrefIn || t == ParamType::MemrefOut; }
bool is_output(ParamType t) { return t == ParamType::MemrefOut || t == ParamType::ValueOut; }

std::string teec_type(ParamType t, bool has_input) {
  switch (t) {
    case ParamType::None: return "TEEC_NONE";
    case ParamType::ValueIn: return "TEEC_VALUE_INPUT";
    case ParamType::ValueOut: return has_input ? "TEEC_VALUE_INOUT" : "TEEC_VALUE_OUTPUT";
    case ParamType::MemrefIn: return "TEEC_MEMREF_TEMP_INPUT";
    case ParamType::MemrefOut: return has_input ? "TEEC_MEMREF_TEMP_INOUT" : "TEEC_MEMREF_TEMP_OUTPUT";
  }
  return "TEEC_NONE";
}

std::string c_ident(std::string_view id) {
  std::string out;
  for (char c : id) out += text::is_ident_char(c) ? c : '_';
  return out;
}

std::string amount_expr(const ParamSetup& p) {
  if (!p.symbolic) return std::to_string(p.amount);
  if (p.amount == 0) return "bound";
  return "bound " + std::string(p.amount < 0 ? "- " : "+ ") + std::to_string(p.amount < 0 ? -p.amount : p.amount);
}

std::string payload_args(const std::string& payload) {
  if (payload.rfind("fill:", 0) == 0) return "PAYLOAD_FILL, 0x" + payload.substr(5);
  if (payload == "seq") return "PAYLOAD_SEQ, 0";
  return "PAYLOAD_ZERO, 0";
}

bool symbolic(const TestCase& c) {
  return std::any_of(c.params.begin(), c.params.end(), [](const ParamSetup& p) { return p.symbolic; });
}

// Literal bound of a case whose buffer lengths may be resized from argv.
std::optional<std::int64_t> literal_bound(const TestCase& c) {
  if (c.bound.empty() || !std::all_of(c.bound.begin(), c.bound.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    return std::nullopt;
  for (const auto& p : c.params)
    if (is_memref(p.kind) && !p.symbolic) return std::stoll(c.bound);
  return std::nullopt;
}

bool takes_bound(const TestCase& c) { return symbolic(c) || literal_bound(c).has_value(); }

std::string length_expr(const TestCase& c, const ParamSetup& p) {
  auto n = literal_bound(c);
  if (p.symbolic || !n) return amount_expr(p);
  ParamSetup rel = p;
  rel.amount = p.amount - *n;
  rel.symbolic = true;
  return amount_expr(rel);
}

void emit_case(std::ostringstream& o, const cmodel::ClientSpec& spec, const TestCase& c) {
  const cmodel::Command* cmd = nullptr;
  for (const auto& k : spec.commands)
    if (k.id == c.command) cmd = &k;
  std::array<ParamType, 4> types = cmd ? cmd->params : std::array<ParamType, 4>{};
  std::array<const ParamSetup*, 4> set{};
  for (const auto& p : c.params) {
    if (p.kind == ParamType::None || p.slot < 0 || p.slot > 3)
      throw UnsupportedParamType("case " + c.id + " slot " + std::to_string(p.slot));
    types[static_cast<std::size_t>(p.slot)] = p.kind;
    set[static_cast<std::size_t>(p.slot)] = &p;
  }

  std::string fn = "run_" + c_ident(c.id);
  bool sym = takes_bound(c);
  o << "/* " << c.id << ": " << c.row << ", expect " << to_string(c.expected) << " */\n";
  o << "static void " << fn << "(TEEC_Session *sess" << (sym ? ", long bound" : "") << ")\n{\n";
  o << "\tTEEC_Operation op;\n\tTEEC_Result res;\n\tuint32_t origin = 0;\n";
  for (std::size_t i = 0; i < 4; ++i) {
    if (!is_memref(types[i])) continue;
    const ParamSetup* p = set[i];
    std::string len = p ? length_expr(c, *p) : "DEFAULT_LEN";
    if (len.rfind("bound", 0) == 0) len = "(size_t)(" + len + ")";
    o << "\tsize_t len" << i << " = " << len << ";\n";
    o << "\tuint8_t *buf" << i << " = alloc_payload(len" << i << ", " << payload_args(p ? p->payload : "zero")
      << ");\n";
  }
  o << "\n\tmemset(&op, 0, sizeof(op));\n";
  o << "\top.paramTypes = TEEC_PARAM_TYPES(";
  for (std::size_t i = 0; i < 4; ++i) {
    bool has_input = set[i] && (!is_memref(types[i]) || set[i]->payload != "zero");
    o << (i ? ", " : "") << teec_type(types[i], has_input);
  }
  o << ");\n";
  for (std::size_t i = 0; i < 4; ++i) {
    if (is_memref(types[i])) {
      o << "\top.params[" << i << "].tmpref.buffer = buf" << i << ";\n";
      o << "\top.params[" << i << "].tmpref.size = len" << i << ";\n";
    } else if (types[i] != ParamType::None) {
      o << "\top.params[" << i << "].value.a = (uint32_t)(" << (set[i] ? amount_expr(*set[i]) : "0") << ");\n";
      o << "\top.params[" << i << "].value.b = 0;\n";
    }
  }
  if (c.tamper) o << "\tbuf" << c.tamper->slot << "[" << c.tamper->offset << "] ^= 0xff;\n";
  o << "\tres = TEEC_InvokeCommand(sess, " << c.command_value << ", &op, &origin);\n";

  int out_slot = -1;
  for (std::size_t i = 0; i < 4 && out_slot < 0; ++i)
    if (is_output(types[i])) out_slot = static_cast<int>(i);
  if (out_slot < 0)
    o << "\treport(\"" << c.id << "\", res, NULL, 0);\n";
  else if (is_memref(types[static_cast<std::size_t>(out_slot)]))
    o << "\treport(\"" << c.id << "\", res, buf" << out_slot << ", op.params[" << out_slot << "].tmpref.size);\n";
  else
    o << "\treport(\"" << c.id << "\", res, &op.params[" << out_slot << "].value, sizeof(op.params[" << out_slot
      << "].value));\n";
  for (std::size_t i = 0; i < 4; ++i)
    if (is_memref(types[i])) o << "\tfree(buf" << i << ");\n";
  o << "}\n\n";
}

}  // namespace

std::string client_file_name(const cmodel::ClientSpec& spec) { return "client_" + spec.uuid + ".c"; }

std::string generate_client(const cmodel::ClientSpec& spec, const std::vector<TestCase>& cases) {
  if (spec.commands.empty()) throw cmodel::NoCases();
  std::ostringstream o;
  o << "/*\n * Test client for TA " << spec.uuid << ".\n"
    << " * Prints one line per case: RESULT <case-id> <status> <output hex>\n";
  bool any_symbolic = std::any_of(cases.begin(), cases.end(), symbolic);
  bool any_bound = std::any_of(cases.begin(), cases.end(), takes_bound);
  if (any_symbolic)
    o << " * Usage: client <bound>\n";
  else if (any_bound)
    o << " * Usage: client [bound], where bound resizes the length-checked buffers\n";
  o << " */\n\n";
  o << "#include <err.h>\n#include <stdint.h>\n#include <stdio.h>\n#include <stdlib.h>\n#include <string.h>\n\n"
    << "#include <tee_client_api.h>\n\n";
  o << "#define DEFAULT_LEN 256\n\n";
  o << "enum payload { PAYLOAD_ZERO, PAYLOAD_FILL, PAYLOAD_SEQ };\n\n";
  o << "static const TEEC_UUID ta_uuid = " << spec.uuid_initializer << ";\n\n";
  if (!cases.empty()) {
    o << "static uint8_t *alloc_payload(size_t len, enum payload kind, uint8_t fill)\n{\n"
      << "\tuint8_t *p = calloc(len ? len : 1, 1);\n"
      << "\tsize_t i;\n\n"
      << "\tif (!p)\n\t\terr(1, \"calloc\");\n"
      << "\tfor (i = 0; i < len; i++)\n"
      << "\t\tp[i] = kind == PAYLOAD_FILL ? fill : kind == PAYLOAD_SEQ ? (uint8_t)i : 0;\n"
      << "\treturn p;\n}\n\n";
    o << "static void report(const char *id, TEEC_Result res, const void *out, size_t len)\n{\n"
      << "\tconst uint8_t *b = out;\n\tsize_t i;\n\n"
      << "\tprintf(\"RESULT %s 0x%08x \", id, res);\n"
      << "\tif (!out || !len)\n\t\tprintf(\"-\");\n"
      << "\tfor (i = 0; out && i < len; i++)\n\t\tprintf(\"%02x\", b[i]);\n"
      << "\tprintf(\"\\n\");\n}\n\n";
  }
  for (const auto& c : cases) emit_case(o, spec, c);

  o << "int main(int argc, char *argv[])\n{\n"
    << "\tTEEC_Context ctx;\n\tTEEC_Session sess;\n\tTEEC_Result res;\n\tuint32_t origin = 0;\n";
  if (any_symbolic) {
    o << "\tlong bound;\n\n"
      << "\tif (argc < 2)\n\t\terrx(2, \"usage: %s <bound>\", argv[0]);\n"
      << "\tbound = strtol(argv[1], NULL, 0);\n";
  } else if (any_bound) {
    o << "\tlong bound = argc > 1 ? strtol(argv[1], NULL, 0) : -1;\n\n";
  } else {
    o << "\n\t(void)argc;\n\t(void)argv;\n";
  }
  o << "\tres = TEEC_InitializeContext(NULL, &ctx);\n"
    << "\tif (res != TEEC_SUCCESS)\n\t\terrx(1, \"TEEC_InitializeContext: 0x%x\", res);\n"
    << "\tres = TEEC_OpenSession(&ctx, &sess, &ta_uuid, TEEC_LOGIN_PUBLIC, NULL, NULL, &origin);\n"
    << "\tif (res != TEEC_SUCCESS)\n\t\terrx(1, \"TEEC_OpenSession: 0x%x origin 0x%x\", res, origin);\n\n";
  for (const auto& c : cases) {
    o << "\trun_" << c_ident(c.id) << "(&sess";
    if (symbolic(c))
      o << ", bound";
    else if (auto n = literal_bound(c))
      o << ", bound < 0 ? " << *n << " : bound";
    o << ");\n";
  }
  if (!cases.empty()) o << "\n";
  o << "\tTEEC_CloseSession(&sess);\n\tTEEC_FinalizeContext(&ctx);\n\treturn 0;\n}\n";
  return o.str();
}

std::vector<Observation> parse_observations(std::string_view text) {
  std::vector<Observation> out;
  for (const auto& line : text::split_lines(text)) {
    std::istringstream in(line);
    std::string tag, id, code, hex;
    if (!(in >> tag >> id >> code) || tag != "RESULT") continue;
    in >> hex;
    Observation o;
    o.case_id = id;
    try {
      o.code = static_cast<std::uint32_t>(std::stoul(code, nullptr, 16));
    } catch (const std::exception&) {
      throw Error("MalformedObservation", "bad status in `" + line + "`");
    }
    if (!hex.empty() && hex != "-") {
      auto bytes = text::from_hex(hex);
      if (!bytes) throw Error("MalformedObservation", "bad output hex in `" + line + "`");
      o.output = *bytes;
    }
    out.push_back(std::move(o));
  }
  return out;
}

FunctionalVerdict evaluate_outcomes(const std::vector<TestCase>& cases, const std::vector<Observation>& observed) {
  std::map<std::string, const Observation*> by_id;
  for (const auto& o : observed) by_id[o.case_id] = &o;
  FunctionalVerdict v;
  v.state = FunctionalState::Pass;
  for (const auto& c : cases) {
    auto it = by_id.find(c.id);
    if (it == by_id.end()) throw MissingObservation(c.id);
    const Observation& o = *it->second;
    bool ok = false;
    switch (c.expected) {
      case Expected::Success: ok = o.code == kTeeSuccess; break;
      case Expected::ErrorBadParameters: ok = o.code == kTeeErrorBadParameters; break;
      case Expected::CiphertextOf: {
        ok = o.code == kTeeSuccess && !o.output.empty() && o.output != c.plaintext;
        if (!c.plaintext.empty() && o.output.size() >= c.plaintext.size())
          ok = ok && o.output.compare(0, c.plaintext.size(), c.plaintext) != 0;
        std::size_t pos = 0;
        for (const auto& piece : c.cipher) {
          if (!ok) break;
          auto found = o.output.find(piece, pos);
          ok = found != std::string::npos;
          pos = ok ? found + piece.size() : pos;
        }
        break;
      }
    }
    if (!ok) v.failed.push_back(c.id);
  }
  if (!v.failed.empty()) v.state = FunctionalState::Fail;
  return v;
}

nlohmann::json to_json(const TestCase& c) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : c.params)
    params.push_back({{"slot", p.slot},
                      {"kind", std::string(cmodel::to_string(p.kind))},
                      {"amount", p.amount},
                      {"payload", p.payload},
                      {"symbolic", p.symbolic}});
  nlohmann::json cipher = nlohmann::json::array();
  for (const auto& s : c.cipher) cipher.push_back(text::to_hex(s));
  nlohmann::json j = {{"id", c.id},
                      {"issue", c.issue_id},
                      {"command", c.command},
                      {"command_value", c.command_value},
                      {"params", params},
                      {"tamper", nullptr},
                      {"expected", std::string(to_string(c.expected))},
                      {"row", c.row},
                      {"plaintext", text::to_hex(c.plaintext)},
                      {"cipher", cipher},
                      {"bound", c.bound},
                      {"note", c.note}};
  if (c.tamper) j["tamper"] = {{"slot", c.tamper->slot}, {"offset", c.tamper->offset}};
  return j;
}

nlohmann::json manifest(const cmodel::ClientSpec& spec, const std::vector<TestCase>& cases) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : cases) list.push_back(to_json(c));
  return {{"uuid", spec.uuid}, {"client", client_file_name(spec)}, {"cases", list}};
}

std::vector<TestCase> cases_from_manifest(const nlohmann::json& j) {
  static const std::map<std::string, ParamType> kinds{{"none", ParamType::None},
                                                      {"value-in", ParamType::ValueIn},
                                                      {"value-out", ParamType::ValueOut},
                                                      {"memref-in", ParamType::MemrefIn},
                                                      {"memref-out", ParamType::MemrefOut}};
  static const std::map<std::string, Expected> expects{{"Success", Expected::Success},
                                                       {"ErrorBadParameters", Expected::ErrorBadParameters},
                                                       {"CiphertextOf", Expected::CiphertextOf}};
  std::vector<TestCase> out;
  try {
    for (const auto& jc : j.at("cases")) {
      TestCase c;
      c.id = jc.at("id").get<std::string>();
      c.issue_id = jc.value("issue", "");
      c.command = jc.value("command", "");
      c.command_value = jc.value("command_value", 0);
      for (const auto& jp : jc.at("params"))
        c.params.push_back({jp.at("slot").get<int>(), kinds.at(jp.at("kind").get<std::string>()),
                            jp.at("amount").get<std::int64_t>(), jp.value("payload", ""), jp.value("symbolic", false)});
      if (jc.contains("tamper") && !jc["tamper"].is_null())
        c.tamper = Tamper{jc["tamper"].at("slot").get<int>(), jc["tamper"].at("offset").get<std::int64_t>()};
      c.expected = expects.at(jc.at("expected").get<std::string>());
      c.row = jc.value("row", "");
      c.plaintext = text::from_hex(jc.value("plaintext", "")).value_or("");
      for (const auto& h : jc.value("cipher", nlohmann::json::array()))
        c.cipher.push_back(text::from_hex(h.get<std::string>()).value_or(""));
      c.bound = jc.value("bound", "");
      c.note = jc.value("note", "");
      out.push_back(std::move(c));
    }
  } catch (const std::exception& e) {
    throw Error("MalformedManifest", e.what());
  }
  return out;
}

}  // namespace tarepair::harness
