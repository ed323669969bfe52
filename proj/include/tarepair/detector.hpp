#pragma once

// Static detection of the three bad-partitioning classes over a SourceModel.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tarepair/cmodel.hpp"
#include "tarepair/config.hpp"

namespace tarepair::detector {

enum class IssueKind { UnencryptedOutput, InputValidationWeakness, SharedMemoryUse };

std::string_view to_string(IssueKind k);
// Human-readable class name used in prompts and reports.
std::string_view class_name(IssueKind k);

struct Issue {
  std::string id;  // I1, I2, ... in file order
  IssueKind kind = IssueKind::UnencryptedOutput;
  cmodel::Span span;
  std::string statement;  // exact source text
  std::string function;
  std::map<std::string, std::string> evidence;  // trigger placeholder -> concrete text
  std::string rule_hint;                        // "1.1", "2.2", ...
  cmodel::AbstractStmt abs;                     // node matching the hinted rule's trigger
};

std::vector<Issue> detect_unencrypted_output(const cmodel::SourceModel& m, const FunctionClassification& fc);
std::vector<Issue> detect_input_validation(const cmodel::SourceModel& m, const FunctionClassification& fc);
std::vector<Issue> detect_shared_memory(const cmodel::SourceModel& m, const FunctionClassification& fc);

// Union of the three analyses ordered by span, ids assigned in that order.
std::vector<Issue> detect(const cmodel::SourceModel& m, const FunctionClassification& fc);

}  // namespace tarepair::detector
