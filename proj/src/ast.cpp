#include "cmexpose/ast.hpp"

namespace cmexpose {

bool IfClause::operator==(const IfClause& other) const {
  return condition == other.condition && body == other.body;
}

bool IfBlock::operator==(const IfBlock& other) const {
  return clauses == other.clauses && else_body == other.else_body && has_else == other.has_else;
}

bool ForeachBlock::operator==(const ForeachBlock& other) const {
  return header_args == other.header_args && body == other.body;
}

bool WhileBlock::operator==(const WhileBlock& other) const {
  return condition == other.condition && body == other.body;
}

bool FunctionDef::operator==(const FunctionDef& other) const {
  return is_macro == other.is_macro && name == other.name && params == other.params &&
         body == other.body;
}

const SourceSpan& AstNode::span() const {
  return std::visit([](const auto& n) -> const SourceSpan& { return n.span; }, node);
}

std::string serialize(const Argument& argument) {
  switch (argument.kind) {
    case ArgumentKind::quoted:
      return "\"" + argument.raw_text + "\"";
    case ArgumentKind::bracket: {
      // Pick a fence that does not occur in the body.
      std::string eq;
      while (argument.raw_text.find("]" + eq + "]") != std::string::npos) eq += '=';
      // A newline right after the opener is swallowed by the lexer.
      const bool leading_newline =
          !argument.raw_text.empty() && (argument.raw_text.front() == '\n' ||
                                         argument.raw_text.rfind("\r\n", 0) == 0);
      return "[" + eq + "[" + (leading_newline ? "\n" : "") + argument.raw_text + "]" + eq + "]";
    }
    case ArgumentKind::unquoted:
      break;
  }
  return argument.raw_text;
}

std::string serialize(const CommandInvocation& command) {
  std::string out = command.name + "(";
  for (std::size_t i = 0; i < command.args.size(); ++i) {
    if (i) out += ' ';
    out += serialize(command.args[i]);
  }
  out += ")";
  return out;
}

std::size_t count_commands(const AstNodeList& nodes) {
  std::size_t count = 0;
  for (const auto& n : nodes) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CommandInvocation>) {
            ++count;
          } else if constexpr (std::is_same_v<T, IfBlock>) {
            for (const auto& c : v.clauses) count += count_commands(c.body);
            count += count_commands(v.else_body);
          } else {
            count += count_commands(v.body);
          }
        },
        n.node);
  }
  return count;
}

}  // namespace cmexpose
