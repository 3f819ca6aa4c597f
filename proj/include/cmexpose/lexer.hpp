#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

enum class TokenKind {
  identifier,
  lparen,
  rparen,
  unquoted,
  quoted,
  bracket,
  newline,
  end_of_file,
};

struct Token {
  TokenKind kind;
  /// Identifier name, or argument content without delimiters (quotes and
  /// bracket fences are stripped; escapes are left untouched).
  std::string text;
  SourceSpan span;
};

/// Splits one listfile into tokens. Comments are dropped; whitespace other
/// than newlines is skipped. Throws ParseError (UnterminatedString,
/// UnterminatedBracket) on malformed input.
std::vector<Token> tokenize(std::string_view text, const std::string& file_path);

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns true when the input
/// needed repair.
bool sanitize_utf8(std::string& text);

}  // namespace cmexpose
