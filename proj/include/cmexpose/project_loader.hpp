#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmexpose/ast.hpp"
#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

inline constexpr std::size_t kIncludeDepthCap = 32;

/// Where listfile text comes from. Paths are absolute and normalized.
class FileSource {
 public:
  virtual ~FileSource() = default;
  virtual std::optional<std::string> read(const std::string& path) const = 0;
};

std::shared_ptr<const FileSource> make_disk_source();

/// In-memory tree; keys are absolute normalized paths.
std::shared_ptr<const FileSource> make_memory_source(std::map<std::string, std::string> files);

/// Every listfile reachable from a project's root CMakeLists.txt, parsed.
/// Keys are absolute normalized paths.
struct ParsedProject {
  std::string root_dir;
  std::map<std::string, AstNodeList> files;
  std::vector<std::string> load_order;
  WarningList warnings;
  std::shared_ptr<const FileSource> source;

  std::string root_listfile() const { return root_dir + "/CMakeLists.txt"; }
  const AstNodeList* find(const std::string& path) const;
};

/// Parses listfile text. Invalid UTF-8 is repaired and reported through
/// `warnings`. Throws ParseError when malformed.
AstNodeList parse_text(std::string text, const std::string& path, WarningList& warnings);

/// Loads `root_dir/CMakeLists.txt` and, recursively, every include() and
/// add_subdirectory() target that can be resolved without evaluation
/// (literals and variables holding one unconditional value). Unresolvable
/// references become warnings.
///
/// Throws LoadError(MissingRootListfile) when the root listfile is absent,
/// and ParseError when the root listfile itself does not parse. Parse errors
/// in other files are downgraded to PARSE_ERROR warnings.
ParsedProject load_project(const std::string& root_dir);

/// Same as load_project over an arbitrary file source. `root_dir` must be
/// absolute.
ParsedProject load_project(const std::string& root_dir, std::shared_ptr<const FileSource> source);

/// Convenience for tests and generated fixtures: `sources` keys are paths
/// relative to the virtual absolute `root_dir`.
ParsedProject load_project_from_memory(const std::string& root_dir,
                                       const std::map<std::string, std::string>& sources);

}  // namespace cmexpose
