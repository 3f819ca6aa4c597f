#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmexpose/condition.hpp"
#include "cmexpose/condition_analysis.hpp"
#include "cmexpose/evaluator.hpp"
#include "cmexpose/symbolic_env.hpp"

namespace cmexpose::detail {

/// Memoized satisfiability against a mutable option table.
class Solver {
 public:
  Solver(const OptionTable& options, std::size_t atom_cap) : options_(options), atom_cap_(atom_cap) {}

  /// False only when `c` is definitely unsatisfiable.
  bool possible(const Condition& c);
  /// Must be called whenever the option table changes.
  void invalidate() { cache_.clear(); }

 private:
  const OptionTable& options_;
  std::size_t atom_cap_;
  std::unordered_map<std::string, bool> cache_;
};

enum class LookupMode {
  value,       // ${X} and comparison operands
  truthiness,  // bare word in if(X)
  defined,     // if(DEFINED X)
};

using VariableLookup = std::function<const VariableValue*(const std::string& name, LookupMode mode)>;

/// Placeholder for an escaped semicolon until list splitting is done.
inline constexpr char kEscapedSemicolon = '\x1F';

struct Segment {
  enum class Kind { literal, ref, env_ref, cache_ref };
  Kind kind = Kind::literal;
  std::string text;             // literal
  std::vector<Segment> name;    // references
};

std::vector<Segment> parse_segments(const Argument& argument);

/// Splits on `;`, dropping empty elements, and restores escaped semicolons.
std::vector<std::string> split_list(std::string_view text);
std::string join_list(const std::vector<std::string>& values);

class Expander {
 public:
  Expander(VariableLookup lookup, Solver& solver, const OptionTable& options,
           WarningList& warnings, const EvaluatorLimits& limits)
      : lookup_(std::move(lookup)), solver_(solver), options_(options),
        warnings_(warnings), limits_(limits) {}

  /// Branch guards include pc.
  std::vector<ExpansionBranch> expand(const Argument& argument, const Condition& pc);
  /// Branch guards exclude `context`; combinations inconsistent with it are
  /// dropped.
  std::vector<ExpansionBranch> expand_relative(const Argument& argument, const Condition& context);
  /// Element-wise expansion for list contexts: every element carries its
  /// own guard (including pc), so conditional appends do not multiply.
  std::vector<GuardedItem> expand_items(const Argument& argument, const Condition& pc);

  std::optional<FlattenedVariable> flatten(const std::string& name, const VariableValue& value);

  Solver& solver() { return solver_; }
  const EvaluatorLimits& limits() const { return limits_; }
  void warn(const char* code, std::string message, const SourceSpan& span);

 private:
  using Partials = std::vector<std::pair<Condition, std::string>>;

  std::vector<ExpansionBranch> expand_impl(const Argument& argument, const Condition& start,
                                           const Condition& context);
  bool expand_segments(const std::vector<Segment>& segments, Partials& partials,
                       const Condition& context, const SourceSpan& span);
  std::optional<std::vector<std::pair<Condition, std::string>>> reference_values(
      Segment::Kind kind, const std::string& name, const SourceSpan& span);

  VariableLookup lookup_;
  Solver& solver_;
  const OptionTable& options_;
  WarningList& warnings_;
  const EvaluatorLimits& limits_;
};

/// Services the if() translator needs from the interpreter.
class ConditionHost {
 public:
  virtual ~ConditionHost() = default;
  virtual Expander& expander() = 0;
  virtual const VariableValue* lookup(const std::string& name, LookupMode mode) = 0;
  virtual Atom opaque_atom(const std::string& text, const SourceSpan& span) = 0;
};

/// Translates an if()/elseif() argument list into a Condition. The result
/// does not include `context`, which only prunes impossible combinations.
Condition interpret_condition(const std::vector<Argument>& args, const SourceSpan& span,
                              const Condition& context, ConditionHost& host);

std::string render_arguments(const std::vector<Argument>& args);

}  // namespace cmexpose::detail
