#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cmexpose/ast.hpp"
#include "cmexpose/lexer.hpp"

namespace cmexpose {

/// Folds a token stream into a block-structured AST. Commands the analyzer
/// does not understand are kept as plain CommandInvocation nodes.
/// Throws ParseError: UnbalancedBlock, MisplacedElse, UnexpectedToken,
/// UnterminatedCommand, MalformedCommand.
AstNodeList parse(const std::vector<Token>& tokens);

/// tokenize + parse.
AstNodeList parse_listfile(std::string_view text, const std::string& file_path);

}  // namespace cmexpose
