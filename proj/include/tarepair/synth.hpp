#pragma once

// Placeholder resolution: deterministic heuristics first, then a language
// model prompted with the file, the issue, the template and prior repairs.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tarepair/cmodel.hpp"
#include "tarepair/config.hpp"
#include "tarepair/detector.hpp"
#include "tarepair/error.hpp"
#include "tarepair/model_client.hpp"
#include "tarepair/templates.hpp"

namespace tarepair::synth {

using Bindings = std::map<std::string, std::string>;

struct QA {
  std::string question;
  std::string answer;
};

// Per-file repair history threaded through every prompt of a session.
struct History {
  std::vector<QA> pairs;
  std::set<std::string> assigned;  // fresh names handed out so far
};

inline constexpr const char* kInstruction = "Only output the repaired template code.";

struct Prompt {
  std::string code;
  std::string textual;
  std::vector<QA> history;

  // Code, textual and history sections in that order; history omitted when empty.
  std::string serialize() const;
};

enum class ResolverSource { Heuristic, External, Replay };
std::string_view to_string(ResolverSource s);

struct ResolverOutcome {
  Bindings bindings;
  ResolverSource source = ResolverSource::Heuristic;
  std::optional<std::string> raw_reply;
  int requests = 0;  // model round trips spent
};

class UnparseableReply : public Error {
 public:
  explicit UnparseableReply(const std::string& excerpt)
      : Error("UnparseableReply", "reply does not follow the template: " + excerpt) {}
};

class CollisionAfterRetry : public Error {
 public:
  explicit CollisionAfterRetry(const std::string& name)
      : Error("CollisionAfterRetry", "name `" + name + "` still collides after retry"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class IncompleteBindings : public Error {
 public:
  explicit IncompleteBindings(const std::vector<std::string>& missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// Placeholders the template declares (fresh identifiers). Only these are
// subject to the no-collision invariant; other name placeholders refer to
// existing objects.
std::set<std::string> declared_placeholders(const templates::PatchTemplate& t);

// Identifiers a fresh name must avoid at the template's site: visible
// declarations, every identifier in the file, function names, C keywords and
// the session's assigned names.
std::set<std::string> forbidden_names(const templates::PatchTemplate& t, const cmodel::SourceModel& m,
                                      const History& history);

Bindings resolve_heuristic(const templates::PatchTemplate& t, const cmodel::SourceModel& m, const History& history,
                           const FunctionClassification& fc = {});

// Template text with the given bindings already substituted.
std::string partial_render(const templates::PatchTemplate& t, const Bindings& b);

Prompt build_prompt(const cmodel::SourceModel& m, const detector::Issue& issue, const templates::PatchTemplate& t,
                    const History& history, const Bindings& partial = {});

// Bindings read off a reply that echoes the template with substitutions.
Bindings parse_reply(const std::string& reply, const templates::PatchTemplate& t, const Bindings& partial = {});

// Sends the prompt, parses the reply and checks fresh names against
// `forbidden`. A collision triggers one retry with a constraint note when
// `max_requests` allows it.
ResolverOutcome resolve_external(const Prompt& p, const templates::PatchTemplate& t, ModelClient& client,
                                 const std::set<std::string>& forbidden, const Bindings& partial = {},
                                 ResolverSource source = ResolverSource::External, int max_requests = 2);

templates::ConcretePatch apply_bindings(const templates::PatchTemplate& t, const Bindings& b);

// Record a finished repair in the session history.
void remember(History& h, const Prompt& p, const std::string& answer, const templates::PatchTemplate& t,
              const Bindings& b);

}  // namespace tarepair::synth
