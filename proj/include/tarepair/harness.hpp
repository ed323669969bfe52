#pragma once

// Two-stage validation: static re-detection inside the repair loop, then
// generated normal-side test clients whose observations are evaluated
// against the expected outcome table.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tarepair/cmodel.hpp"
#include "tarepair/config.hpp"
#include "tarepair/detector.hpp"
#include "tarepair/dsl.hpp"
#include "tarepair/error.hpp"
#include "tarepair/model_client.hpp"
#include "tarepair/synth.hpp"
#include "tarepair/templates.hpp"

namespace tarepair::harness {

inline constexpr std::uint32_t kTeeSuccess = 0x00000000;
inline constexpr std::uint32_t kTeeErrorBadParameters = 0xFFFF0006;

// Byte-wise involution standing in for the trusted application's `enc`.
std::string stub_cipher(std::string_view bytes, std::uint8_t key = 0x5A);

// ---- stage 1 -------------------------------------------------------------

std::vector<detector::Issue> verify_static(const cmodel::SourceModel& m, const FunctionClassification& fc);

enum class ResolverMode { Heuristic, External, Replay };
std::string_view to_string(ResolverMode m);

struct Resolver {
  ResolverMode mode = ResolverMode::Heuristic;
  synth::ModelClient* client = nullptr;  // required unless heuristic
};

// A file under repair. `text` and `model` advance as repairs are committed.
struct Session {
  std::string path;
  std::string original;
  std::string text;
  cmodel::SourceModel model;
  FunctionClassification fc;
  std::vector<dsl::Rule> rules;
  synth::History history;
  std::vector<templates::ConcretePatch> committed;

  static Session open(std::string path, std::string text, FunctionClassification fc, std::vector<dsl::Rule> rules);
};

enum class FunctionalState { NotRun, Pass, Fail };

struct FunctionalVerdict {
  FunctionalState state = FunctionalState::NotRun;
  std::vector<std::string> failed;  // case ids
};

struct RepairResult {
  std::string issue_id;
  detector::Issue issue;
  std::string rule;
  int iterations = 0;
  std::optional<templates::ConcretePatch> patch;
  bool generated = false;  // a template was instantiated
  bool clean = false;
  std::vector<detector::Issue> residual;
  FunctionalVerdict functional;
  std::string error;  // error code of the last failure, e.g. ExhaustedIterations
  std::string message;
  std::vector<std::string> notes;
};

// Repairs one issue of the session's current model. On success the patch is
// committed to the session. Each model request counts as one iteration.
RepairResult repair_loop(Session& s, const detector::Issue& issue, Resolver& resolver, int max_iters = 3);

// Repairs every issue of the session bottom-up.
std::vector<RepairResult> repair_file(Session& s, Resolver& resolver, int max_iters = 3);

// ---- stage 2 -------------------------------------------------------------

enum class Expected { Success, ErrorBadParameters, CiphertextOf };
std::string_view to_string(Expected e);

struct ParamSetup {
  int slot = 0;
  cmodel::ParamType kind = cmodel::ParamType::None;
  std::int64_t amount = 0;  // memref byte length or value.a
  std::string payload;      // "zero", "fill:XX" or "seq"
  bool symbolic = false;    // amount is an offset from the runtime bound
};

struct Tamper {
  int slot = 0;
  std::int64_t offset = 0;
};

struct TestCase {
  std::string id;
  std::string issue_id;
  std::string command;  // command id as written in the TA
  std::int64_t command_value = 0;
  std::vector<ParamSetup> params;
  std::optional<Tamper> tamper;
  Expected expected = Expected::Success;
  std::string plaintext;  // CiphertextOf: bytes of x
  std::vector<std::string> cipher;  // CiphertextOf: reference ciphertext pieces, in output order
  std::string row;        // outcome-table row, e.g. "len(x) > n"
  std::string bound;      // bound text for symbolic cases
  std::string note;
};

class BoundNotExtractable : public Error {
 public:
  explicit BoundNotExtractable(const std::string& what) : Error("BoundNotExtractable", what) {}
};
class UnsupportedParamType : public Error {
 public:
  explicit UnsupportedParamType(const std::string& what) : Error("UnsupportedParamType", what) {}
};
class MissingObservation : public Error {
 public:
  explicit MissingObservation(const std::string& id)
      : Error("MissingObservation", "no observation for case " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

struct CaseOptions {
  std::uint8_t cipher_key = 0x5A;
  std::int64_t default_out_size = 256;
};

// Cases for a stage-1 clean repair. `repaired` resolves bounds and payloads.
std::vector<TestCase> generate_cases(const detector::Issue& issue, const templates::ConcretePatch& patch,
                                     const cmodel::SourceModel& repaired, const cmodel::ClientSpec& spec,
                                     const CaseOptions& opt = {});

std::string generate_client(const cmodel::ClientSpec& spec, const std::vector<TestCase>& cases);

// File name of the generated client for a spec.
std::string client_file_name(const cmodel::ClientSpec& spec);

struct Observation {
  std::string case_id;
  std::uint32_t code = 0;
  std::string output;  // raw bytes
};

// `RESULT <case-id> <hex status> <hex output|->` lines; other lines ignored.
std::vector<Observation> parse_observations(std::string_view text);

FunctionalVerdict evaluate_outcomes(const std::vector<TestCase>& cases, const std::vector<Observation>& observed);

nlohmann::json to_json(const TestCase& c);
nlohmann::json manifest(const cmodel::ClientSpec& spec, const std::vector<TestCase>& cases);
std::vector<TestCase> cases_from_manifest(const nlohmann::json& j);

}  // namespace tarepair::harness
