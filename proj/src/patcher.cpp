#include "tarepair/patcher.hpp"

#include <algorithm>
#include <sstream>

#include "tarepair/text.hpp"

namespace tarepair::patcher {

using templates::LineOp;

namespace {

struct Line {
  std::string body;  // without the newline
  bool newline = true;
};

std::vector<Line> split(const std::string& text) {
  std::vector<Line> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      out.push_back({text.substr(pos), false});
      break;
    }
    out.push_back({text.substr(pos, nl - pos), true});
    pos = nl + 1;
  }
  return out;
}

std::string join(const std::vector<Line>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.body;
    if (l.newline) out += '\n';
  }
  return out;
}

struct HunkLine {
  char op;  // ' ', '-', '+'
  std::string text;
};

struct Hunk {
  std::size_t start = 0;     // first source line, 0-based
  std::size_t consumed = 0;  // source lines covered
  std::vector<HunkLine> lines;
};

Hunk plan(const std::vector<Line>& src, const ConcretePatch& p) {
  Hunk h;
  h.start = p.span.begin.line > 0 ? static_cast<std::size_t>(p.span.begin.line - 1) : 0;
  std::size_t cursor = h.start;
  std::string indent;
  bool have_indent = false;
  std::vector<std::size_t> pending;  // inserts emitted before the indent is known
  for (const auto& tl : p.lines) {
    if (tl.op == LineOp::Insert) {
      pending.push_back(h.lines.size());
      h.lines.push_back({'+', tl.text});
      continue;
    }
    std::string want = text::normalize_ws(tl.text), acc;
    std::size_t first = cursor;
    while (cursor < src.size()) {
      acc = text::normalize_ws(acc.empty() ? src[cursor].body : acc + " " + src[cursor].body);
      ++cursor;
      if (acc == want || want.rfind(acc, 0) != 0) break;
    }
    if (acc != want) throw SpanMismatch(want, acc);
    if (!have_indent) {
      indent = text::leading_ws(src[first].body);
      have_indent = true;
    }
    for (std::size_t i = first; i < cursor; ++i)
      h.lines.push_back({tl.op == LineOp::Keep ? ' ' : '-', src[i].body});
  }
  if (!have_indent && h.start < src.size()) indent = text::leading_ws(src[h.start].body);
  bool tabs = indent.find('\t') != std::string::npos;
  for (auto i : pending) {
    std::string& t = h.lines[i].text;
    std::string nested;
    std::size_t k = 0;
    // Template nesting is written in 4-space steps; follow the file's tabs.
    while (tabs && t.compare(k, 4, "    ") == 0) {
      nested += '\t';
      k += 4;
    }
    t = indent + nested + t.substr(k);
  }
  h.consumed = cursor - h.start;
  return h;
}

bool identity(const Hunk& h) {
  return std::all_of(h.lines.begin(), h.lines.end(), [](const HunkLine& l) { return l.op == ' '; });
}

std::string header(const std::string& filename) { return "--- a/" + filename + "\n+++ b/" + filename + "\n"; }

std::string range(std::size_t start, std::size_t count) {
  // Unified diffs number an empty range by the line before it.
  std::size_t first = count == 0 ? start : start + 1;
  return std::to_string(first) + "," + std::to_string(count);
}

void write_hunk(std::ostringstream& out, const Hunk& h, long offset) {
  std::size_t added = 0;
  for (const auto& l : h.lines)
    if (l.op != '-') ++added;
  out << "@@ -" << range(h.start, h.consumed) << " +"
      << range(static_cast<std::size_t>(static_cast<long>(h.start) + offset), added) << " @@\n";
  for (const auto& l : h.lines) out << l.op << l.text << "\n";
}

}  // namespace

OverlappingPatches::OverlappingPatches(const ConcretePatch& a, const ConcretePatch& b)
    : Error("OverlappingPatches", "patches " + (a.issue_id.empty() ? a.rule : a.issue_id) + " and " +
                                      (b.issue_id.empty() ? b.rule : b.issue_id) + " overlap at line " +
                                      std::to_string(std::max(a.span.begin.line, b.span.begin.line))) {}

std::string apply_patch(const std::string& text, const ConcretePatch& p) {
  auto src = split(text);
  Hunk h = plan(src, p);
  std::vector<Line> out(src.begin(), src.begin() + static_cast<long>(h.start));
  for (const auto& l : h.lines)
    if (l.op != '-') out.push_back({l.text, true});
  std::size_t rest = h.start + h.consumed;
  if (rest == src.size() && h.consumed > 0 && !src.back().newline && !out.empty()) out.back().newline = false;
  out.insert(out.end(), src.begin() + static_cast<long>(rest), src.end());
  return join(out);
}

std::vector<ConcretePatch> order_patches(std::vector<ConcretePatch> ps) {
  std::stable_sort(ps.begin(), ps.end(),
                   [](const ConcretePatch& a, const ConcretePatch& b) { return b.span.begin < a.span.begin; });
  for (std::size_t i = 1; i < ps.size(); ++i) {
    // ps[i] starts no later than ps[i-1]; they overlap when ps[i] reaches it.
    if (ps[i].span.end.line >= ps[i - 1].span.begin.line) throw OverlappingPatches(ps[i], ps[i - 1]);
  }
  return ps;
}

std::string apply_all(const std::string& text, const std::vector<ConcretePatch>& ps) {
  std::string out = text;
  for (const auto& p : order_patches(ps)) out = apply_patch(out, p);
  return out;
}

std::string emit_diff(const std::string& source, const ConcretePatch& p, const std::string& filename) {
  return emit_file_diff(source, {p}, filename);
}

std::string emit_file_diff(const std::string& source, const std::vector<ConcretePatch>& ps,
                           const std::string& filename) {
  auto src = split(source);
  auto ordered = order_patches(ps);
  std::reverse(ordered.begin(), ordered.end());
  std::ostringstream out;
  out << header(filename);
  long offset = 0;
  for (const auto& p : ordered) {
    Hunk h = plan(src, p);
    if (identity(h)) continue;
    write_hunk(out, h, offset);
    long added = 0;
    for (const auto& l : h.lines) added += l.op == '+' ? 1 : l.op == '-' ? -1 : 0;
    offset += added;
  }
  return out.str();
}

}  // namespace tarepair::patcher
