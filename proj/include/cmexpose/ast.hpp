#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

enum class ArgumentKind { unquoted, quoted, bracket };

/// One command argument exactly as written. Variable references, escape
/// sequences and generator expressions are kept verbatim; expansion happens
/// in the evaluator.
struct Argument {
  ArgumentKind kind = ArgumentKind::unquoted;
  std::string raw_text;
  SourceSpan span;

  /// Equality ignores spans.
  bool operator==(const Argument& other) const {
    return kind == other.kind && raw_text == other.raw_text;
  }
};

struct AstNode;
using AstNodeList = std::vector<AstNode>;

struct CommandInvocation {
  std::string name;  // lower-cased
  std::vector<Argument> args;
  SourceSpan span;

  bool operator==(const CommandInvocation& other) const {
    return name == other.name && args == other.args;
  }
};

struct IfClause {
  std::vector<Argument> condition;
  AstNodeList body;
  SourceSpan span;

  bool operator==(const IfClause& other) const;
};

/// if/elseif.../else/endif. `clauses` holds the if and every elseif.
struct IfBlock {
  std::vector<IfClause> clauses;
  AstNodeList else_body;
  bool has_else = false;
  SourceSpan span;

  bool operator==(const IfBlock& other) const;
};

struct ForeachBlock {
  std::vector<Argument> header_args;
  AstNodeList body;
  SourceSpan span;

  bool operator==(const ForeachBlock& other) const;
};

/// while/endwhile. Kept as a block so the evaluator can skip it as a unit.
struct WhileBlock {
  std::vector<Argument> condition;
  AstNodeList body;
  SourceSpan span;

  bool operator==(const WhileBlock& other) const;
};

struct FunctionDef {
  bool is_macro = false;
  std::string name;  // lower-cased, command names are case-insensitive
  std::vector<std::string> params;
  AstNodeList body;
  SourceSpan span;

  bool operator==(const FunctionDef& other) const;
};

struct AstNode {
  std::variant<CommandInvocation, IfBlock, ForeachBlock, WhileBlock, FunctionDef> node;

  bool operator==(const AstNode& other) const { return node == other.node; }

  const SourceSpan& span() const;
};

/// Renders a command back to listfile syntax: `name(arg arg ...)`.
std::string serialize(const CommandInvocation& command);

/// Renders one argument so that re-lexing yields the same kind and raw text.
std::string serialize(const Argument& argument);

/// Counts every CommandInvocation, including those nested in blocks (block
/// delimiters such as if/endif are not commands here).
std::size_t count_commands(const AstNodeList& nodes);

}  // namespace cmexpose
