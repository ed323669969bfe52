#include "tarepair/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include "tarepair/metrics.hpp"
#include "tarepair/patcher.hpp"
#include "tarepair/report.hpp"
#include "tarepair/text.hpp"

namespace tarepair::cli {

namespace fs = std::filesystem;

std::vector<InputFile> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<InputFile> out;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".c") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      for (const auto& f : found) out.push_back({f.string(), fs::relative(f, p).generic_string()});
    } else if (fs::is_regular_file(p)) {
      out.push_back({p.string(), p.filename().generic_string()});
    } else {
      throw IoError("input not found: " + in);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const InputFile& a, const InputFile& b) { return a.rel < b.rel; });
  return out;
}

std::string default_rules_dir() {
  if (const char* env = std::getenv("TAREPAIR_RULES"); env && *env) return env;
  return std::string(TAREPAIR_SOURCE_DIR) + "/rules";
}

namespace {

FunctionClassification classification(const RunConfig& cfg) {
  FunctionClassification fc = cfg.classify.empty() ? FunctionClassification{} : load_classification(cfg.classify);
  fc.check_disjoint();
  return fc;
}

std::vector<cmodel::SourceModel> sibling_headers(const std::string& path) {
  std::vector<fs::path> hs;
  fs::path dir = fs::path(path).parent_path();
  if (dir.empty()) dir = ".";
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".h") hs.push_back(e.path());
  std::sort(hs.begin(), hs.end());
  std::vector<cmodel::SourceModel> out;
  for (const auto& h : hs) out.push_back(cmodel::load_source(text::read_file(h.string())));
  return out;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  text::write_file(p.string(), j.dump(2) + "\n");
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  text::write_file(p.string(), s);
}

int cmd_eval(const std::string& manifest_path, const std::string& obs_path, const std::string& out_path,
             std::ostream& out) {
  auto cases = harness::cases_from_manifest(nlohmann::json::parse(text::read_file(manifest_path)));
  auto observed = harness::parse_observations(text::read_file(obs_path));
  auto v = harness::evaluate_outcomes(cases, observed);
  nlohmann::json j = {{"functional", v.state == harness::FunctionalState::Pass ? "pass" : "fail"},
                      {"failed", v.failed},
                      {"cases", cases.size()}};
  if (!out_path.empty()) write_json(out_path, j);
  out << (v.state == harness::FunctionalState::Pass ? "pass" : "fail");
  if (!v.failed.empty()) out << ": " << text::join(v.failed, ", ");
  out << "\n";
  return v.state == harness::FunctionalState::Pass ? 0 : 1;
}

int cmd_metrics_cli(const std::string& counts_path, const std::vector<long>& triple, const std::string& out_path,
                    bool json, std::ostream& out) {
  std::vector<std::pair<std::string, metrics::Counts>> counts;
  if (!counts_path.empty()) {
    counts = metrics::parse_counts(nlohmann::ordered_json::parse(text::read_file(counts_path)));
  } else if (triple.size() == 3) {
    counts.push_back({"all", {triple[0], triple[1], triple[2]}});
  } else {
    throw ConfigError("metrics needs --counts FILE or --ni/--n/--tp");
  }
  auto rep = metrics::cmd_metrics(counts);
  if (!out_path.empty()) write_json(out_path, metrics::to_json(rep));
  out << (json ? metrics::to_json(rep).dump(2) + "\n" : metrics::to_text(rep));
  return 0;
}

}  // namespace

int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  dsl::load_rule_dir(cfg.rules_dir.empty() ? default_rules_dir() : cfg.rules_dir);
  FunctionClassification fc = classification(cfg);
  std::vector<report::FileDetection> files;
  bool found = false;
  for (const auto& in : expand_inputs(cfg.inputs)) {
    report::FileDetection f;
    f.file = in.rel;
    f.issues = detector::detect(cmodel::load_source(text::read_file(in.path)), fc);
    found = found || !f.issues.empty();
    files.push_back(std::move(f));
  }
  auto j = report::detection_report(files);
  if (!cfg.out_dir.empty()) write_json(fs::path(cfg.out_dir) / "detect.json", j);
  out << (cfg.json ? j.dump(2) + "\n" : report::detection_text(files));
  return found ? 1 : 0;
}

int cmd_repair(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool write_sources) {
  if (cfg.max_iters < 1) throw ConfigError("--max-iters must be at least 1");
  auto rules = dsl::load_rule_dir(cfg.rules_dir.empty() ? default_rules_dir() : cfg.rules_dir);
  FunctionClassification fc = classification(cfg);

  std::unique_ptr<synth::ModelClient> live, replay, recorder;
  harness::Resolver resolver;
  resolver.mode = cfg.mode;
  if (cfg.mode == harness::ResolverMode::External) {
    live = synth::HttpModelClient::from_env();
    resolver.client = live.get();
    if (cfg.record) {
      if (cfg.fixtures.empty()) throw ConfigError("--record needs --fixtures");
      recorder = std::make_unique<synth::RecordingClient>(*live, cfg.fixtures);
      resolver.client = recorder.get();
    }
  } else if (cfg.mode == harness::ResolverMode::Replay) {
    if (cfg.fixtures.empty() || !fs::is_directory(cfg.fixtures))
      throw ConfigError("replay resolver needs an existing --fixtures directory");
    replay = std::make_unique<synth::ReplayClient>(cfg.fixtures, cfg.dump_prompts);
    resolver.client = replay.get();
  }

  std::vector<report::FileRepair> files;
  for (const auto& in : expand_inputs(cfg.inputs)) {
    report::FileRepair fr;
    fr.file = in.rel;
    try {
      auto s = harness::Session::open(in.rel, text::read_file(in.path), fc, rules);
      fr.results = harness::repair_file(s, resolver, cfg.max_iters);

      fs::path target = cfg.in_place ? fs::path(in.path) : fs::path(cfg.out_dir) / in.rel;
      if (write_sources) {
        write_text(target, s.text);
        write_text(target.string() + ".patch",
                   patcher::emit_file_diff(s.original, s.committed, fs::path(in.rel).filename().string()));
      }

      std::vector<harness::TestCase> cases;
      try {
        auto hs = sibling_headers(in.path);
        std::vector<const cmodel::SourceModel*> hp;
        for (const auto& h : hs) hp.push_back(&h);
        auto spec = cmodel::extract_client_spec(s.model, fc, hp);
        for (auto& r : fr.results) {
          if (!r.clean || !r.patch) continue;
          try {
            auto cs = harness::generate_cases(r.issue, *r.patch, s.model, spec);
            cases.insert(cases.end(), cs.begin(), cs.end());
          } catch (const Error& e) {
            r.notes.push_back(e.code() + ": " + e.what());
          }
        }
        if (!cases.empty()) {
          fs::path dir = (cfg.in_place ? fs::path(in.path) : fs::path(cfg.out_dir) / in.rel).parent_path();
          fr.client = harness::client_file_name(spec);
          write_text(dir / fr.client, harness::generate_client(spec, cases));
          write_json(dir / (fs::path(fr.client).stem().string() + ".manifest.json"), harness::manifest(spec, cases));
        }
      } catch (const Error& e) {
        fr.error = e.code() + ": " + e.what();
      }
      fr.cases = cases.size();
    } catch (const Error& e) {
      fr.error = e.code() + ": " + e.what();
      err << in.rel << ": " << e.what() << "\n";
    }
    files.push_back(std::move(fr));
  }

  auto j = report::repair_report(files, harness::to_string(cfg.mode), cfg.max_iters);
  write_json(fs::path(cfg.out_dir) / "report.json", j);
  out << (cfg.json ? j.dump(2) + "\n" : report::repair_text(files));
  auto sum = report::summarize(files);
  bool failed = sum.residual > 0 ||
                std::any_of(files.begin(), files.end(), [](const report::FileRepair& f) { return !f.error.empty(); });
  return failed ? 1 : 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repair bad partitioning in trusted applications"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string resolver = "heuristic";

  auto common = [&](CLI::App* sub) {
    sub->add_option("inputs", cfg.inputs, "C files or directories")->required();
    sub->add_option("--rules", cfg.rules_dir, "rules directory");
    sub->add_option("--classify", cfg.classify, "function classification file");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_flag("--json", cfg.json, "print the JSON report");
  };
  auto repair_opts = [&](CLI::App* sub) {
    sub->add_option("--resolver", resolver, "placeholder resolver")
        ->check(CLI::IsMember({"heuristic", "external", "replay"}));
    sub->add_option("--max-iters", cfg.max_iters, "iterations per issue");
    sub->add_option("--fixtures", cfg.fixtures, "replay fixture directory");
    sub->add_flag("--record", cfg.record, "record external exchanges as fixtures");
    sub->add_flag("--dump-prompts", cfg.dump_prompts, "write prompts of missing fixtures");
  };

  auto* detect = app.add_subcommand("detect", "report bad-partitioning issues");
  common(detect);
  detect->get_option("--out")->default_str("");
  auto* repair = app.add_subcommand("repair", "repair issues and write patches, clients and a report");
  common(repair);
  repair_opts(repair);
  repair->add_flag("--in-place", cfg.in_place, "overwrite the input files");
  auto* gen = app.add_subcommand("gen-client", "repair in memory and write test clients and manifests");
  common(gen);
  repair_opts(gen);

  std::string manifest, observations, eval_out;
  auto* eval = app.add_subcommand("eval", "check client observations against a manifest");
  eval->add_option("--manifest", manifest, "case manifest")->required();
  eval->add_option("--observations", observations, "RESULT lines from the client")->required();
  eval->add_option("--out", eval_out, "write the verdict as JSON");

  std::string counts, metrics_out;
  long ni = -1, n = -1, tp = -1;
  bool metrics_json = false;
  auto* met = app.add_subcommand("metrics", "precision, recall and F1 from issue counts");
  met->add_option("--counts", counts, "JSON counts file");
  met->add_option("--ni", ni, "issues present");
  met->add_option("--n", n, "issues reported");
  met->add_option("--tp", tp, "true positives");
  met->add_option("--out", metrics_out, "write the report as JSON");
  met->add_flag("--json", metrics_json, "print JSON");

  std::vector<std::string> storage{"tarepair"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  bool detect_out_given = false;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    detect_out_given = detect->count("--out") > 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.mode = resolver == "external" ? harness::ResolverMode::External
               : resolver == "replay" ? harness::ResolverMode::Replay
                                      : harness::ResolverMode::Heuristic;
    if (*detect) {
      if (!detect_out_given) cfg.out_dir.clear();
      return cmd_detect(cfg, out, err);
    }
    if (*repair) return cmd_repair(cfg, out, err, true);
    if (*gen) return cmd_repair(cfg, out, err, false);
    if (*eval) return cmd_eval(manifest, observations, eval_out, out);
    if (*met) {
      std::vector<long> triple;
      if (ni >= 0 || n >= 0 || tp >= 0) triple = {ni, n, tp};
      return cmd_metrics_cli(counts, triple, metrics_out, metrics_json, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace tarepair::cli
