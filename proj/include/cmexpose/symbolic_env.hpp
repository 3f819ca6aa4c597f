#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmexpose/condition.hpp"
#include "cmexpose/config.hpp"
#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

/// One list element together with the condition under which it is present.
struct GuardedItem {
  Condition guard;
  std::string value;

  bool operator==(const GuardedItem&) const = default;
};

/// Storage form of a variable: under a configuration c the variable is
/// defined iff `defined` holds, and its list value is the items whose guard
/// holds, in order. Every item guard implies `defined`.
///
/// This form grows linearly with conditional appends, where the alternatives
/// form below grows exponentially.
struct VariableValue {
  std::vector<GuardedItem> items;
  Condition defined = Condition::falsity();

  static VariableValue undefined() { return {}; }
  static VariableValue of(std::vector<std::string> values, const Condition& guard = {});
};

/// One alternative of a flattened variable. `defined` distinguishes an unset
/// variable from one set to the empty list.
struct ValueAlternative {
  Condition guard;
  std::vector<std::string> values;
  bool defined = true;

  bool operator==(const ValueAlternative&) const = default;
};

/// Every value a variable can take across all configurations. The guards
/// are pairwise exclusive and their disjunction is True.
struct FlattenedVariable {
  std::string name;
  std::vector<ValueAlternative> alternatives;
};

/// Marker for the unknown runtime value of a configuration option. It only
/// ever appears as a whole list element.
std::string symbolic_value(std::string_view option);
std::optional<std::string> symbolic_option(std::string_view value);
bool contains_symbolic(std::string_view value);
/// Replaces markers by `${option}` for display.
std::string render_symbolic(std::string_view value);

/// Registry of opaque atoms. Identical source text within one listfile maps
/// to one id.
class OpaqueRegistry {
 public:
  Atom intern(const std::string& file, const std::string& text, const SourceSpan& span);
  const std::map<std::uint32_t, Atom>& atoms() const { return by_id_; }

 private:
  std::map<std::pair<std::string, std::string>, std::uint32_t> ids_;
  std::map<std::uint32_t, Atom> by_id_;
};

/// Scoped variable bindings, the option table and opaque atoms of one
/// evaluation.
///
/// Scopes follow CMake: add_subdirectory and function calls start from a
/// copy of the enclosing scope, and leaving a scope discards its bindings
/// except for PARENT_SCOPE writes. Cache variables are global.
class SymbolicEnv {
 public:
  SymbolicEnv();

  void push_scope();
  void pop_scope();
  std::size_t scope_depth() const { return scopes_.size(); }

  /// Normal binding in the innermost scope, else cache binding.
  const VariableValue* find(const std::string& name) const;
  const VariableValue* find_normal(const std::string& name) const;
  const VariableValue* find_cache(const std::string& name) const;
  /// Normal binding in the enclosing scope (nullptr at the top).
  const VariableValue* find_parent(const std::string& name) const;

  void bind(const std::string& name, VariableValue value);
  void bind_parent(const std::string& name, VariableValue value);
  void bind_cache(const std::string& name, VariableValue value);
  void erase_cache(const std::string& name);

  OptionTable& options() { return options_; }
  const OptionTable& options() const { return options_; }

  OpaqueRegistry& opaque() { return opaque_; }
  const OpaqueRegistry& opaque() const { return opaque_; }

  /// Bindings visible in the innermost scope (normal shadowing cache).
  std::map<std::string, VariableValue> visible() const;

 private:
  std::vector<std::map<std::string, VariableValue>> scopes_;
  std::map<std::string, VariableValue> cache_;
  OptionTable options_;
  OpaqueRegistry opaque_;
};

}  // namespace cmexpose
