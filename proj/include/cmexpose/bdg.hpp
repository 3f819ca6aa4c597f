#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmexpose/condition.hpp"
#include "cmexpose/config.hpp"
#include "cmexpose/diagnostics.hpp"
#include "cmexpose/evaluator.hpp"

namespace cmexpose {

inline constexpr int kBdgSchemaVersion = 1;

enum class NodeKind { deliverable, external_library, source_file };
enum class EdgeKind { compiles, links };

std::string to_string(NodeKind kind);
std::string to_string(EdgeKind kind);

struct BdgNode {
  std::string id;
  NodeKind kind = NodeKind::source_file;
  std::optional<DeliverableKind> deliverable_kind;  // deliverables only
  std::string display_name;
  Condition exists_guard;

  bool operator==(const BdgNode&) const = default;
};

/// `from` depends on `to`: a deliverable compiles a source file, or links
/// another deliverable or an external library.
struct BdgEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::compiles;
  Condition guard;
  std::vector<SourceSpan> spans;  // file paths relative to the project root

  bool operator==(const BdgEdge&) const = default;
};

struct OpaqueAtomInfo {
  std::string source_text;
  std::optional<SourceSpan> span;

  bool operator==(const OpaqueAtomInfo&) const = default;
};

struct BdgMetadata {
  std::string root;
  std::string analyzer_version;
  std::map<std::string, std::size_t> warning_summary;
  std::map<std::uint32_t, OpaqueAtomInfo> opaque_atoms;

  bool operator==(const BdgMetadata&) const = default;
};

/// Nodes are sorted by id, edges by (from, to, kind).
struct Bdg {
  std::vector<BdgNode> nodes;
  std::vector<BdgEdge> edges;
  OptionTable options;
  BdgMetadata metadata;

  const BdgNode* find(const std::string& id) const;
  std::vector<const BdgNode*> deliverables() const;

  bool operator==(const Bdg& other) const {
    return nodes == other.nodes && edges == other.edges && options == other.options &&
           metadata == other.metadata;
  }
};

/// Materializes the graph. Warnings found while building (dangling
/// references, id collisions, link cycles) are appended to `warnings`; the
/// metadata summary counts every warning in `warnings` after that.
Bdg build_bdg(const DeclarationTrace& trace, const SymbolicEnv& env, const std::string& root,
              WarningList& warnings);

/// load_project + evaluate_project + build_bdg. Warnings of every stage are
/// collected in `warnings`.
Bdg analyze_project(const std::string& root_dir, WarningList& warnings);
Bdg analyze_parsed_project(const ParsedProject& project, WarningList& warnings);

/// Canonical JSON text with sorted keys and a content digest.
std::string save_bdg_string(const Bdg& bdg);
/// Writes the JSON to `path`; returns the number of bytes written. Throws
/// Error("IoError") on failure.
std::size_t save_bdg(const Bdg& bdg, const std::string& path);

/// Throws Error("SchemaVersionMismatch") or Error("CorruptPayload").
Bdg load_bdg_string(const std::string& text);
/// Also throws Error("IoError") when the file cannot be read.
Bdg load_bdg(const std::string& path);

std::string export_dot(const Bdg& bdg);

/// Condition parsing that resolves opaque ids against the graph's metadata.
/// Throws Error("CorruptPayload") for an id the metadata does not list.
Condition parse_bdg_condition(const Bdg& bdg, const std::string& text);

}  // namespace cmexpose
