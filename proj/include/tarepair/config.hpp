#pragma once

#include <set>
#include <string>
#include <string_view>

namespace tarepair {

// Which C functions map to which DSL call kinds, plus the textual patterns
// that identify normal-side parameters and shared memory.
//
// Config files are `key = value` lines; `#` starts a comment. Keys:
//   copy, snprint, enc, hash, read, write, malloc, compare : comma-separated names
//   output_param_pattern, input_param_pattern, shared_mem_pattern : patterns
//   entry_point : name of the command dispatcher (TA_InvokeCommandEntryPoint)
//   uuid : UUID override in canonical 8-4-4-4-12 form
//   lower.copy, lower.enc, lower.hash, lower.read, lower.write, lower.compare,
//   lower.ecode, lower.hash_len, lower.buffer_type : lowering table
// Patterns are C expressions where `*` matches any decimal index, compared
// with whitespace removed, e.g. `params[*].memref.buffer`.
struct FunctionClassification {
  std::set<std::string> copy_fns{"TEE_MemMove", "memcpy", "memmove"};
  std::set<std::string> snprint_fns{"snprintf"};
  std::set<std::string> enc_fns{"enc"};
  std::set<std::string> hash_fns{"hash"};
  std::set<std::string> read_fns{"read"};
  std::set<std::string> write_fns{"write"};
  std::set<std::string> malloc_fns{"TEE_Malloc", "malloc"};
  // Backs the reserved `equal` term of guards.
  std::set<std::string> compare_fns{"TEE_MemCompare", "memcmp"};

  std::string output_param_pattern = "params[*].memref.buffer";
  std::string input_param_pattern = "params[*]";
  std::string shared_mem_pattern = "params[*].memref.buffer";
  std::string entry_point = "TA_InvokeCommandEntryPoint";
  std::string uuid_override;

  // Lowering table, DSL kind -> C text.
  std::string lower_copy = "TEE_MemMove";
  std::string lower_enc = "enc";
  std::string lower_hash = "hash";
  std::string lower_read = "read";
  std::string lower_write = "write";
  std::string lower_compare = "TEE_MemCompare";
  std::string lower_ecode = "TEE_ERROR_BAD_PARAMETERS";
  std::string lower_buffer_type = "char";
  int hash_len = 256;

  // Throws ConfigError when the function sets overlap.
  void check_disjoint() const;

  bool matches_output(std::string_view expr) const;
  bool matches_input(std::string_view expr) const;
  bool matches_shared(std::string_view expr) const;

  // First substring of `expr` matching the shared-memory pattern, as written
  // in the source (whitespace preserved), or empty.
  std::string find_shared(std::string_view expr) const;
  std::string find_output(std::string_view expr) const;
  std::string find_input(std::string_view expr) const;

  // Classification of a callee name, "" when unclassified.
  std::string_view category(std::string_view fn) const;
};

FunctionClassification parse_classification(std::string_view text);
FunctionClassification load_classification(const std::string& path);

}  // namespace tarepair
