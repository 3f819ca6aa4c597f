#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cmexpose/ast.hpp"
#include "cmexpose/condition.hpp"
#include "cmexpose/config.hpp"
#include "cmexpose/diagnostics.hpp"
#include "cmexpose/project_loader.hpp"
#include "cmexpose/symbolic_env.hpp"

namespace cmexpose {

enum class DeliverableKind {
  executable,
  static_library,
  shared_library,
  module_library,
  object_library,
  interface_library,
  default_library,  // add_library without a type; BUILD_SHARED_LIBS decides
};

/// "executable", "library(static)", "library(shared)", ...
std::string to_string(DeliverableKind kind);
std::optional<DeliverableKind> parse_deliverable_kind(std::string_view text);

struct DeclareDeliverable {
  std::string name;
  DeliverableKind kind = DeliverableKind::executable;
  Condition guard;
  SourceSpan span;
  bool imported = false;  // IMPORTED targets are prebuilt, hence external
};

/// Source paths are relative to the project root when they lie inside it.
struct AttachSources {
  std::string target;
  Condition guard;
  std::vector<std::string> source_paths;
  SourceSpan span;
};

struct LinkDependency {
  std::string from_target;
  std::string to;
  Condition guard;
  SourceSpan span;
};

struct DeclareAlias {
  std::string alias;
  std::string target;
  Condition guard;
  SourceSpan span;
};

using TraceEvent = std::variant<DeclareDeliverable, AttachSources, LinkDependency, DeclareAlias>;

struct DeclarationTrace {
  std::vector<TraceEvent> events;
};

struct EvaluatorLimits {
  std::size_t branch_cap = 64;
  std::size_t unroll_cap = 10000;
  std::size_t call_depth_cap = 16;
  std::size_t include_depth_cap = kIncludeDepthCap;
  std::size_t atom_cap = 20;
};

struct EvaluatorOptions {
  EvaluatorLimits limits;
  /// Invoked after every command of the root listfile, for invariant checks.
  std::function<void(const SymbolicEnv&)> after_top_level_command;
};

struct EvaluationResult {
  SymbolicEnv env;
  DeclarationTrace trace;
  WarningList warnings;
  /// Root-directory bindings at the end of the root listfile.
  std::map<std::string, VariableValue> root_variables;
};

/// Symbolically interprets the project. With empty overrides every option is
/// free; options pinned by `overrides` take their concrete value, and with
/// `overrides.total` unpinned options take their defaults.
EvaluationResult evaluate_project(const ParsedProject& project,
                                  const ConfigurationAssignment& overrides = {},
                                  const EvaluatorOptions& options = {});

/// Every (guard, values) alternative of a variable. The guards partition
/// True. nullopt when more than `cap` alternatives would be needed.
std::optional<FlattenedVariable> flatten(const std::string& name, const VariableValue& value,
                                         const OptionTable& options, std::size_t cap = 64);

struct ExpansionBranch {
  Condition guard;
  std::vector<std::string> strings;

  bool operator==(const ExpansionBranch&) const = default;
};

/// Expands one argument against `env` under path condition `pc`. The result
/// has one branch per combination of variable alternatives, each guard
/// conjoined with pc; unsatisfiable combinations are dropped. Undefined
/// variables expand to the empty string with a warning.
std::vector<ExpansionBranch> expand(const Argument& argument, const SymbolicEnv& env,
                                    const Condition& pc, WarningList& warnings,
                                    const EvaluatorLimits& limits = {});

}  // namespace cmexpose
