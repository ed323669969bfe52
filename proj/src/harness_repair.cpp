#include <algorithm>

#include "tarepair/harness.hpp"
#include "tarepair/patcher.hpp"
#include "tarepair/text.hpp"

namespace tarepair::harness {

using templates::LineOp;

std::string stub_cipher(std::string_view bytes, std::uint8_t key) {
  std::string out(bytes);
  for (auto& c : out) c = static_cast<char>(static_cast<std::uint8_t>(c) ^ key);
  return out;
}

std::vector<detector::Issue> verify_static(const cmodel::SourceModel& m, const FunctionClassification& fc) {
  return detector::detect(m, fc);
}

std::string_view to_string(ResolverMode m) {
  switch (m) {
    case ResolverMode::Heuristic: return "heuristic";
    case ResolverMode::External: return "external";
    case ResolverMode::Replay: return "replay";
  }
  return "heuristic";
}

Session Session::open(std::string path, std::string text, FunctionClassification fc, std::vector<dsl::Rule> rules) {
  Session s;
  s.path = std::move(path);
  s.original = text;
  s.model = cmodel::load_source(text);
  s.text = std::move(text);
  s.fc = std::move(fc);
  s.rules = std::move(rules);
  return s;
}

namespace {

// The issue as it appears in the current model: same kind and statement,
// nearest at or below its original line.
std::optional<detector::Issue> relocate(const Session& s, const detector::Issue& issue) {
  std::optional<detector::Issue> best;
  std::string want = text::normalize_ws(issue.statement);
  for (auto& i : detector::detect(s.model, s.fc)) {
    if (i.kind != issue.kind || text::normalize_ws(i.statement) != want) continue;
    if (i.span.begin.line < issue.span.begin.line) continue;
    if (!best || i.span.begin < best->span.begin) best = i;
  }
  return best;
}

std::string describe(const std::vector<detector::Issue>& issues) {
  std::vector<std::string> parts;
  for (const auto& i : issues)
    parts.push_back("line " + std::to_string(i.span.begin.line) + ": " + std::string(detector::class_name(i.kind)) +
                    " at `" + text::trim(i.statement) + "`");
  return text::join(parts, "; ");
}

std::string render_answer(const templates::ConcretePatch& p) {
  std::string out = templates::render(p.lines);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace

RepairResult repair_loop(Session& s, const detector::Issue& original, Resolver& resolver, int max_iters) {
  if (max_iters < 1) throw ConfigError("max iterations must be at least 1");
  RepairResult res;
  res.issue_id = original.id;
  res.issue = original;

  auto located = relocate(s, original);
  if (!located) {
    res.clean = true;
    res.notes.push_back("issue no longer present before repair");
    return res;
  }
  detector::Issue issue = *located;
  issue.id = original.id;

  templates::PatchTemplate t;
  try {
    const auto& rule = templates::select_rule(issue, s.rules);
    auto b = templates::match_trigger(rule, issue.abs);
    if (!b) throw templates::NoApplicableRule(std::string(detector::to_string(issue.kind)));
    t = templates::instantiate(rule, *b, s.model, s.fc);
  } catch (const Error& e) {
    res.error = e.code();
    res.message = e.what();
    return res;
  }
  res.generated = true;
  res.rule = t.rule;
  res.notes = t.notes;

  synth::Bindings heur = synth::resolve_heuristic(t, s.model, s.history, s.fc);
  bool complete = std::all_of(t.placeholders.begin(), t.placeholders.end(),
                              [&](const std::string& p) { return heur.count(p) > 0; });
  synth::History local = s.history;
  synth::ResolverSource source =
      resolver.mode == ResolverMode::Replay ? synth::ResolverSource::Replay : synth::ResolverSource::External;

  while (res.iterations < max_iters) {
    synth::Bindings b = heur;
    synth::Prompt prompt = synth::build_prompt(s.model, issue, t, local, heur);
    std::string answer;
    if (complete) {
      ++res.iterations;
    } else {
      if (resolver.mode == ResolverMode::Heuristic || !resolver.client) {
        std::vector<std::string> missing;
        for (const auto& p : t.placeholders)
          if (!heur.count(p)) missing.push_back(p);
        synth::IncompleteBindings e(missing);
        res.iterations = std::max(res.iterations, 1);
        res.error = e.code();
        res.message = e.what();
        return res;
      }
      try {
        auto out = synth::resolve_external(prompt, t, *resolver.client, synth::forbidden_names(t, s.model, local), heur,
                                           source, std::min(2, max_iters - res.iterations));
        res.iterations += out.requests;
        b = out.bindings;
        answer = out.raw_reply.value_or("");
      } catch (const synth::TransportError& e) {
        ++res.iterations;
        res.error = e.code();
        res.message = e.what();
        return res;
      } catch (const synth::CollisionAfterRetry& e) {
        res.iterations += std::min(2, max_iters - res.iterations);
        res.error = e.code();
        res.message = e.what();
        local.pairs.push_back({prompt.textual, "Rejected: " + std::string(e.what())});
        continue;
      } catch (const Error& e) {
        ++res.iterations;
        res.error = e.code();
        res.message = e.what();
        local.pairs.push_back({prompt.textual, "Rejected: " + std::string(e.what())});
        continue;
      }
    }

    templates::ConcretePatch patch;
    std::string repaired;
    try {
      patch = synth::apply_bindings(t, b);
      patch.issue_id = issue.id;
      patch.resolver = complete ? "heuristic" : std::string(synth::to_string(source));
      repaired = patcher::apply_patch(s.text, patch);
    } catch (const Error& e) {
      res.error = e.code();
      res.message = e.what();
      return res;
    }
    res.patch = patch;
    if (answer.empty()) answer = render_answer(patch);

    cmodel::SourceModel m2 = cmodel::load_source(repaired);
    int first = patch.span.begin.line;
    int last = first - 1;
    for (const auto& l : patch.lines)
      if (l.op != LineOp::Delete) ++last;
    res.residual.clear();
    for (auto& i : verify_static(m2, s.fc))
      if (i.kind == issue.kind && i.span.begin.line >= first && i.span.begin.line <= std::max(first, last))
        res.residual.push_back(i);

    if (res.residual.empty()) {
      s.text = std::move(repaired);
      s.model = std::move(m2);
      s.committed.push_back(patch);
      synth::remember(local, prompt, answer, t, b);
      s.history = std::move(local);
      res.clean = true;
      res.error.clear();
      res.message.clear();
      return res;
    }
    res.error = "Residual";
    res.message = describe(res.residual);
    if (complete) return res;  // a deterministic fill cannot improve on retry
    local.pairs.push_back({prompt.textual, answer + "\nResidual issues remain: " + res.message});
  }
  res.error = "ExhaustedIterations";
  if (res.message.empty()) res.message = "no clean repair within " + std::to_string(max_iters) + " iterations";
  return res;
}

std::vector<RepairResult> repair_file(Session& s, Resolver& resolver, int max_iters) {
  auto issues = detector::detect(s.model, s.fc);
  std::vector<RepairResult> out;
  for (auto it = issues.rbegin(); it != issues.rend(); ++it) out.push_back(repair_loop(s, *it, resolver, max_iters));
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace tarepair::harness
