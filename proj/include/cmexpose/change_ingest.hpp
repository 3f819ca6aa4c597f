#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmexpose/exposure.hpp"

namespace cmexpose {

enum class FileStatus { modified, added, deleted, renamed };

std::string to_string(FileStatus status);

/// One file section of a diff. `old_path` is empty for added files and
/// `new_path` for deleted ones.
struct DiffEntry {
  std::string old_path;
  std::string new_path;
  FileStatus status = FileStatus::modified;

  bool operator==(const DiffEntry&) const = default;
};

struct DiffDocument {
  std::vector<DiffEntry> entries;
};

struct DiffOptions {
  /// Leading path components removed from every path, like `patch -pN`.
  /// nullopt removes a single `a/` or `b/` prefix when present.
  std::optional<int> strip;
};

/// Parses git-style or plain unified diffs. Hunk bodies are skipped. Throws
/// Error("MalformedDiff") with the offending 1-based line number in the span.
DiffDocument parse_unified_diff(std::string_view text, const DiffOptions& options = {});

/// New path for added and modified entries, old path for deleted ones, both
/// for renames.
ChangeSet to_changeset(const DiffDocument& doc, const std::string& id);

/// Newline-separated paths; blank lines and `#` comments are skipped.
std::vector<std::string> parse_file_list(std::string_view text);

}  // namespace cmexpose
