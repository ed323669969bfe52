#pragma once

// Applying concrete patches to source text and rendering them as unified diffs.

#include <string>
#include <vector>

#include "tarepair/error.hpp"
#include "tarepair/templates.hpp"

namespace tarepair::patcher {

using templates::ConcretePatch;

class SpanMismatch : public Error {
 public:
  SpanMismatch(const std::string& expected, const std::string& found)
      : Error("SpanMismatch", "expected `" + expected + "`, found `" + found + "`"), expected_(expected), found_(found) {}
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::string expected_, found_;
};

class OverlappingPatches : public Error {
 public:
  OverlappingPatches(const ConcretePatch& a, const ConcretePatch& b);
};

// Kept and deleted lines are matched against the source starting at the
// patch's first line, whitespace-normalized. Inserted lines take the
// indentation of the first kept or deleted line.
std::string apply_patch(const std::string& text, const ConcretePatch& p);

// Bottom-up order: later spans first. Throws OverlappingPatches.
std::vector<ConcretePatch> order_patches(std::vector<ConcretePatch> ps);

// Applies patches in bottom-up order.
std::string apply_all(const std::string& text, const std::vector<ConcretePatch>& ps);

// One-hunk unified diff of `p` against `source`, with a file header. An
// identity patch yields the header only.
std::string emit_diff(const std::string& source, const ConcretePatch& p, const std::string& filename);

// Unified diff of several disjoint patches against the same original source.
std::string emit_file_diff(const std::string& source, const std::vector<ConcretePatch>& ps,
                           const std::string& filename);

}  // namespace tarepair::patcher
