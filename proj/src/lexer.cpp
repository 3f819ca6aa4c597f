#include "cmexpose/lexer.hpp"

#include <cstdint>

namespace cmexpose {

namespace {

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    int depth = 0;
    while (!at_end()) {
      const char c = peek();
      if (is_space(c)) {
        advance();
        continue;
      }
      if (c == '\n') {
        if (depth == 0) tokens.push_back({TokenKind::newline, "\n", span()});
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (depth == 0) {
        if (is_ident_start(c)) {
          const auto start = span();
          std::string name;
          while (!at_end() && is_ident_char(peek())) name += advance();
          tokens.push_back({TokenKind::identifier, std::move(name), start});
        } else if (c == '(') {
          tokens.push_back({TokenKind::lparen, "(", span()});
          advance();
          depth = 1;
        } else if (c == ')') {
          throw ParseError("UnexpectedToken", "unmatched ')'", span());
        } else {
          throw ParseError("UnexpectedToken",
                           std::string("unexpected character '") + c + "' outside a command",
                           span());
        }
        continue;
      }
      // Inside a command's argument list.
      if (c == '(') {
        tokens.push_back({TokenKind::lparen, "(", span()});
        advance();
        ++depth;
      } else if (c == ')') {
        tokens.push_back({TokenKind::rparen, ")", span()});
        advance();
        --depth;
      } else if (c == '"') {
        tokens.push_back(lex_quoted());
      } else if (c == '[' && bracket_level(pos_) >= 0) {
        tokens.push_back(lex_bracket());
      } else {
        tokens.push_back(lex_unquoted());
      }
    }
    tokens.push_back({TokenKind::end_of_file, "", span()});
    return tokens;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }
  SourceSpan span() const { return SourceSpan{file_, line_, column_}; }

  // Number of '=' in a bracket opener `[=*[` starting at `at`, or -1.
  int bracket_level(std::size_t at) const {
    if (at >= text_.size() || text_[at] != '[') return -1;
    std::size_t i = at + 1;
    int level = 0;
    while (i < text_.size() && text_[i] == '=') {
      ++level;
      ++i;
    }
    return (i < text_.size() && text_[i] == '[') ? level : -1;
  }

  // Consumes a bracket construct whose opener starts at pos_; returns its body.
  std::string consume_bracket(const SourceSpan& start) {
    const int level = bracket_level(pos_);
    for (int i = 0; i < level + 2; ++i) advance();
    if (peek() == '\n') {
      advance();
    } else if (peek() == '\r' && peek(1) == '\n') {
      advance();
      advance();
    }
    const std::string closer = "]" + std::string(static_cast<std::size_t>(level), '=') + "]";
    const auto end = text_.find(closer, pos_);
    if (end == std::string_view::npos)
      throw ParseError("UnterminatedBracket", "missing '" + closer + "'", start);
    std::string body(text_.substr(pos_, end - pos_));
    while (pos_ < end + closer.size()) advance();
    return body;
  }

  void skip_comment() {
    const auto start = span();
    advance();  // '#'
    if (bracket_level(pos_) >= 0) {
      consume_bracket(start);
      return;
    }
    while (!at_end() && peek() != '\n') advance();
  }

  Token lex_quoted() {
    const auto start = span();
    advance();  // opening quote
    std::string body;
    while (true) {
      if (at_end()) throw ParseError("UnterminatedString", "missing closing '\"'", start);
      const char c = peek();
      if (c == '\\') {
        body += advance();
        if (at_end()) throw ParseError("UnterminatedString", "missing closing '\"'", start);
        body += advance();
        continue;
      }
      if (c == '"') {
        advance();
        break;
      }
      body += advance();
    }
    return {TokenKind::quoted, std::move(body), start};
  }

  Token lex_bracket() {
    const auto start = span();
    return {TokenKind::bracket, consume_bracket(start), start};
  }

  Token lex_unquoted() {
    const auto start = span();
    std::string body;
    while (!at_end()) {
      const char c = peek();
      if (is_space(c) || c == '\n' || c == '(' || c == ')' || c == '#') break;
      if (c == '\\') {
        body += advance();
        if (!at_end()) body += advance();
        continue;
      }
      if (c == '"') {
        // Legacy form: a quoted section embedded in an unquoted argument,
        // e.g. -DNAME="a b". Kept verbatim, quotes included.
        const auto quote_start = span();
        body += advance();
        while (true) {
          if (at_end()) throw ParseError("UnterminatedString", "missing closing '\"'", quote_start);
          const char q = advance();
          body += q;
          if (q == '\\' && !at_end()) {
            body += advance();
          } else if (q == '"') {
            break;
          }
        }
        continue;
      }
      body += advance();
    }
    return {TokenKind::unquoted, std::move(body), start};
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file_path) {
  return Lexer(text, file_path).run();
}

bool sanitize_utf8(std::string& text) {
  static constexpr const char* kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(text.size());
  bool repaired = false;
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    const auto b0 = static_cast<std::uint8_t>(text[i]);
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if (b0 < 0x80) {
      out += text[i++];
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    }
    bool ok = len != 0 && i + len <= n;
    std::uint32_t cp = 0;
    if (ok) {
      cp = b0 & (0x7F >> len);
      for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<std::uint8_t>(text[i + k]);
        if ((b & 0xC0) != 0x80) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (ok && (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (ok) {
      out.append(text, i, len);
      i += len;
    } else {
      out += kReplacement;
      repaired = true;
      ++i;
    }
  }
  if (repaired) text = std::move(out);
  return repaired;
}

}  // namespace cmexpose
