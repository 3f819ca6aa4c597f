#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmexpose {

enum class DomainKind { boolean, enumerated, opaque };
enum class OptionOrigin { option_command, cache_override, environment };

struct OptionDomain {
  DomainKind kind = DomainKind::boolean;
  std::vector<std::string> values;  // enumerated only

  bool operator==(const OptionDomain&) const = default;
};

/// A user-overridable build-time setting.
struct ConfigOption {
  std::string name;
  OptionDomain domain;
  std::optional<std::string> default_value;
  OptionOrigin origin = OptionOrigin::option_command;

  bool operator==(const ConfigOption&) const = default;
};

/// Options keyed by name.
using OptionTable = std::map<std::string, ConfigOption>;

/// A (possibly partial) assignment of option values. With `total` set,
/// options missing from `values` take their declared default.
struct ConfigurationAssignment {
  std::map<std::string, std::string> values;
  bool total = false;

  bool operator==(const ConfigurationAssignment&) const = default;
};

/// CMake's false constants: 0, OFF, NO, FALSE, N, IGNORE, NOTFOUND, the
/// empty string, anything ending in -NOTFOUND, and numbers equal to zero.
bool is_false_constant(std::string_view value);

/// CMake's true constants: 1, ON, YES, TRUE, Y and non-zero numbers.
bool is_true_constant(std::string_view value);

/// Truthiness of a variable's value in if(<variable>): any value that is not
/// a false constant.
inline bool cmake_truthy(std::string_view value) { return !is_false_constant(value); }

std::string to_string(DomainKind kind);
std::string to_string(OptionOrigin origin);
std::optional<DomainKind> parse_domain_kind(std::string_view text);
std::optional<OptionOrigin> parse_option_origin(std::string_view text);

}  // namespace cmexpose
