#include "cmexpose/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace cmexpose {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<CommandInvocation> flatten_commands(const std::vector<Token>& tokens) {
  std::vector<CommandInvocation> commands;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& tok = tokens[i];
    if (tok.kind == TokenKind::newline) {
      ++i;
      continue;
    }
    if (tok.kind == TokenKind::end_of_file) break;
    if (tok.kind != TokenKind::identifier)
      throw ParseError("UnexpectedToken", "expected a command name", tok.span);
    CommandInvocation cmd;
    cmd.name = lower(tok.text);
    cmd.span = tok.span;
    ++i;
    if (i >= tokens.size() || tokens[i].kind != TokenKind::lparen)
      throw ParseError("UnexpectedToken", "expected '(' after '" + tok.text + "'", tok.span);
    ++i;
    int depth = 1;
    while (true) {
      if (i >= tokens.size() || tokens[i].kind == TokenKind::end_of_file)
        throw ParseError("UnterminatedCommand", "missing ')' for '" + tok.text + "'", tok.span);
      const Token& arg = tokens[i++];
      switch (arg.kind) {
        case TokenKind::lparen:
          ++depth;
          cmd.args.push_back({ArgumentKind::unquoted, "(", arg.span});
          break;
        case TokenKind::rparen:
          if (--depth > 0) cmd.args.push_back({ArgumentKind::unquoted, ")", arg.span});
          break;
        case TokenKind::unquoted:
          cmd.args.push_back({ArgumentKind::unquoted, arg.text, arg.span});
          break;
        case TokenKind::quoted:
          cmd.args.push_back({ArgumentKind::quoted, arg.text, arg.span});
          break;
        case TokenKind::bracket:
          cmd.args.push_back({ArgumentKind::bracket, arg.text, arg.span});
          break;
        default:
          throw ParseError("UnexpectedToken", "unexpected token in argument list", arg.span);
      }
      if (depth == 0) break;
    }
    commands.push_back(std::move(cmd));
  }
  return commands;
}

class BlockFolder {
 public:
  explicit BlockFolder(std::vector<CommandInvocation> commands) : commands_(std::move(commands)) {}

  AstNodeList run() {
    auto nodes = parse_until({}, nullptr);
    return nodes;
  }

 private:
  // Parses commands until one of `closers` appears at this nesting level.
  // The closer itself is left in place for the caller. At top level
  // (closers empty) any block delimiter is an error.
  AstNodeList parse_until(const std::vector<std::string>& closers, const SourceSpan* opener) {
    AstNodeList nodes;
    while (pos_ < commands_.size()) {
      const auto& cmd = commands_[pos_];
      if (std::find(closers.begin(), closers.end(), cmd.name) != closers.end()) return nodes;
      if (cmd.name == "if") {
        nodes.push_back(AstNode{parse_if()});
      } else if (cmd.name == "foreach") {
        ForeachBlock block{cmd.args, {}, cmd.span};
        ++pos_;
        block.body = parse_until({"endforeach"}, &block.span);
        expect_closer("endforeach", block.span);
        nodes.push_back(AstNode{std::move(block)});
      } else if (cmd.name == "while") {
        WhileBlock block{cmd.args, {}, cmd.span};
        ++pos_;
        block.body = parse_until({"endwhile"}, &block.span);
        expect_closer("endwhile", block.span);
        nodes.push_back(AstNode{std::move(block)});
      } else if (cmd.name == "function" || cmd.name == "macro") {
        nodes.push_back(AstNode{parse_function(cmd.name == "macro")});
      } else if (cmd.name == "else" || cmd.name == "elseif") {
        throw ParseError("MisplacedElse", "'" + cmd.name + "' outside an if block", cmd.span);
      } else if (cmd.name == "endif" || cmd.name == "endforeach" || cmd.name == "endwhile" ||
                 cmd.name == "endfunction" || cmd.name == "endmacro") {
        throw ParseError("UnbalancedBlock", "'" + cmd.name + "' without a matching opener",
                         cmd.span);
      } else {
        nodes.push_back(AstNode{cmd});
        ++pos_;
      }
    }
    if (opener)
      throw ParseError("UnbalancedBlock", "block is never closed", *opener);
    return nodes;
  }

  void expect_closer(const std::string& name, const SourceSpan& opener) {
    if (pos_ >= commands_.size() || commands_[pos_].name != name)
      throw ParseError("UnbalancedBlock", "expected '" + name + "'", opener);
    ++pos_;
  }

  IfBlock parse_if() {
    IfBlock block;
    block.span = commands_[pos_].span;
    IfClause first{commands_[pos_].args, {}, commands_[pos_].span};
    ++pos_;
    first.body = parse_until({"elseif", "else", "endif"}, &block.span);
    block.clauses.push_back(std::move(first));
    while (true) {
      if (pos_ >= commands_.size())
        throw ParseError("UnbalancedBlock", "if block is never closed", block.span);
      const auto& cmd = commands_[pos_];
      if (cmd.name == "endif") {
        ++pos_;
        return block;
      }
      if (cmd.name == "elseif") {
        if (block.has_else)
          throw ParseError("MisplacedElse", "'elseif' after 'else'", cmd.span);
        IfClause clause{cmd.args, {}, cmd.span};
        ++pos_;
        clause.body = parse_until({"elseif", "else", "endif"}, &block.span);
        block.clauses.push_back(std::move(clause));
        continue;
      }
      // else
      if (block.has_else) throw ParseError("MisplacedElse", "second 'else' in if block", cmd.span);
      block.has_else = true;
      ++pos_;
      block.else_body = parse_until({"elseif", "else", "endif"}, &block.span);
    }
  }

  FunctionDef parse_function(bool is_macro) {
    const auto& cmd = commands_[pos_];
    if (cmd.args.empty())
      throw ParseError("MalformedCommand", cmd.name + "() requires a name", cmd.span);
    FunctionDef def;
    def.is_macro = is_macro;
    def.name = lower(cmd.args.front().raw_text);
    for (std::size_t i = 1; i < cmd.args.size(); ++i) def.params.push_back(cmd.args[i].raw_text);
    def.span = cmd.span;
    ++pos_;
    const std::string closer = is_macro ? "endmacro" : "endfunction";
    def.body = parse_until({closer}, &def.span);
    expect_closer(closer, def.span);
    return def;
  }

  std::vector<CommandInvocation> commands_;
  std::size_t pos_ = 0;
};

}  // namespace

AstNodeList parse(const std::vector<Token>& tokens) {
  return BlockFolder(flatten_commands(tokens)).run();
}

AstNodeList parse_listfile(std::string_view text, const std::string& file_path) {
  return parse(tokenize(text, file_path));
}

}  // namespace cmexpose
