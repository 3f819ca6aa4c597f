#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmexpose {

/// Position of a construct inside a listfile. Lines and columns are 1-based.
struct SourceSpan {
  std::string file_path;
  std::size_t line = 1;
  std::size_t column = 1;

  bool operator==(const SourceSpan&) const = default;
  auto operator<=>(const SourceSpan&) const = default;

  std::string to_string() const;
};

/// Machine-readable warning codes surfaced by the CLI.
namespace warn {
inline constexpr const char* kUnsupportedCommand = "UNSUPPORTED_COMMAND";
inline constexpr const char* kUnsupportedPredicate = "UNSUPPORTED_PREDICATE";
inline constexpr const char* kUnresolvedInclude = "UNRESOLVED_INCLUDE";
inline constexpr const char* kBuiltinModule = "BUILTIN_MODULE";
inline constexpr const char* kIncludeCycle = "INCLUDE_CYCLE";
inline constexpr const char* kIncludeDepthExceeded = "INCLUDE_DEPTH_EXCEEDED";
inline constexpr const char* kParseError = "PARSE_ERROR";
inline constexpr const char* kInvalidUtf8 = "INVALID_UTF8";
inline constexpr const char* kBranchOverflow = "BRANCH_OVERFLOW";
inline constexpr const char* kUnrollCapExceeded = "UNROLL_CAP_EXCEEDED";
inline constexpr const char* kCallDepthExceeded = "CALL_DEPTH_EXCEEDED";
inline constexpr const char* kUndefinedVariable = "UNDEFINED_VARIABLE";
inline constexpr const char* kGeneratorExpression = "GENERATOR_EXPRESSION";
inline constexpr const char* kSymbolicPath = "SYMBOLIC_PATH";
inline constexpr const char* kDanglingReference = "DANGLING_REFERENCE";
inline constexpr const char* kTargetNotPresent = "TARGET_NOT_PRESENT";
inline constexpr const char* kDuplicateTarget = "DUPLICATE_TARGET";
inline constexpr const char* kLinkCycle = "LINK_CYCLE";
inline constexpr const char* kNodeIdCollision = "NODE_ID_COLLISION";
inline constexpr const char* kUnknownOption = "UNKNOWN_OPTION";
inline constexpr const char* kIgnoredFatalError = "IGNORED_FATAL_ERROR";
}  // namespace warn

struct Warning {
  std::string code;
  std::string message;
  std::optional<SourceSpan> span;

  bool operator==(const Warning&) const = default;

  std::string to_string() const;
};

using WarningList = std::vector<Warning>;

/// Number of warnings per code, ordered by code.
std::map<std::string, std::size_t> summarize(const WarningList& warnings);

/// Base of every structured error raised by the library. `kind` is a stable
/// CamelCase identifier (e.g. "UnterminatedString", "CorruptPayload").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message,
        std::optional<SourceSpan> span = std::nullopt);

  const std::string& kind() const noexcept { return kind_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }

 private:
  std::string kind_;
  std::optional<SourceSpan> span_;
};

/// Lexing and parsing failures.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failures while assembling a project.
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmexpose
