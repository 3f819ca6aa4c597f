#include <gtest/gtest.h>

#include <random>

#include "cmexpose/ast.hpp"
#include "cmexpose/lexer.hpp"
#include "cmexpose/parser.hpp"
#include "cmexpose/project_loader.hpp"

using namespace cmexpose;

namespace {

std::string parse_error_kind(const std::string& text) {
  try {
    parse_listfile(text, "/t/CMakeLists.txt");
  } catch (const ParseError& e) {
    return e.kind();
  }
  return "";
}

const CommandInvocation& command(const AstNode& n) { return std::get<CommandInvocation>(n.node); }

bool has_warning(const WarningList& warnings, const std::string& code) {
  for (const auto& w : warnings)
    if (w.code == code) return true;
  return false;
}

}  // namespace

TEST(Lexer, SimpleCommand) {
  auto tokens = tokenize("add_executable(etl main.c)", "/t/CMakeLists.txt");
  ASSERT_EQ(tokens.size(), 6u);  // trailing end_of_file
  EXPECT_EQ(tokens[0].kind, TokenKind::identifier);
  EXPECT_EQ(tokens[0].text, "add_executable");
  EXPECT_EQ(tokens[1].kind, TokenKind::lparen);
  EXPECT_EQ(tokens[2].kind, TokenKind::unquoted);
  EXPECT_EQ(tokens[2].text, "etl");
  EXPECT_EQ(tokens[3].text, "main.c");
  EXPECT_EQ(tokens[4].kind, TokenKind::rparen);
  EXPECT_EQ(tokens[5].kind, TokenKind::end_of_file);
  EXPECT_EQ(tokens[2].span.line, 1u);
  EXPECT_EQ(tokens[2].span.column, 16u);
}

TEST(Lexer, QuotedArgumentAndComment) {
  auto tokens = tokenize("set(A \"x y\") # note", "/t/CMakeLists.txt");
  std::vector<TokenKind> kinds;
  for (const auto& t : tokens) kinds.push_back(t.kind);
  EXPECT_EQ(kinds, (std::vector<TokenKind>{TokenKind::identifier, TokenKind::lparen,
                                           TokenKind::unquoted, TokenKind::quoted,
                                           TokenKind::rparen, TokenKind::end_of_file}));
  EXPECT_EQ(tokens[3].text, "x y");
}

TEST(Lexer, BracketArgumentKeepsReferences) {
  auto tokens = tokenize("set(A [[raw ${X}]])", "/t/CMakeLists.txt");
  ASSERT_GE(tokens.size(), 4u);
  EXPECT_EQ(tokens[3].kind, TokenKind::bracket);
  EXPECT_EQ(tokens[3].text, "raw ${X}");

  auto fenced = tokenize("set(A [==[a]]b]==])", "/t/CMakeLists.txt");
  EXPECT_EQ(fenced[3].text, "a]]b");
}

TEST(Lexer, BracketCommentDropped) {
  auto tokens = tokenize("#[[ multi\nline ]] set(A 1)", "/t/CMakeLists.txt");
  EXPECT_EQ(tokens[0].kind, TokenKind::identifier);
  EXPECT_EQ(tokens[0].text, "set");
}

TEST(Lexer, Unterminated) {
  try {
    tokenize("set(A \"abc\n", "/t/x.cmake");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), "UnterminatedString");
    ASSERT_TRUE(e.span());
    EXPECT_EQ(e.span()->line, 1u);
  }
  try {
    tokenize("set(A [=[abc]]\n", "/t/x.cmake");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), "UnterminatedBracket");
  }
}

TEST(Parser, IfBlock) {
  auto ast = parse_listfile("if(X)\n  set(A 1)\nendif()\n", "/t/CMakeLists.txt");
  ASSERT_EQ(ast.size(), 1u);
  const auto& block = std::get<IfBlock>(ast[0].node);
  ASSERT_EQ(block.clauses.size(), 1u);
  ASSERT_EQ(block.clauses[0].body.size(), 1u);
  EXPECT_EQ(command(block.clauses[0].body[0]).name, "set");
  EXPECT_FALSE(block.has_else);
}

TEST(Parser, ElseifElse) {
  auto ast = parse_listfile("IF(X)\nElseIf(Y)\nelse()\nset(B 2)\nENDIF()\n", "/t/CMakeLists.txt");
  const auto& block = std::get<IfBlock>(ast[0].node);
  EXPECT_EQ(block.clauses.size(), 2u);
  EXPECT_TRUE(block.has_else);
  EXPECT_EQ(block.else_body.size(), 1u);
}

TEST(Parser, FunctionsLoopsAndCase) {
  auto ast = parse_listfile(
      "Function(Add_Srcs tgt)\n  foreach(f ${ARGN})\n    MESSAGE(${f})\n  endforeach()\n"
      "endfunction()\nmacro(m a b)\nendmacro()\nwhile(X)\nendwhile()\n",
      "/t/CMakeLists.txt");
  ASSERT_EQ(ast.size(), 3u);
  const auto& fn = std::get<FunctionDef>(ast[0].node);
  EXPECT_EQ(fn.name, "add_srcs");
  EXPECT_EQ(fn.params, std::vector<std::string>{"tgt"});
  EXPECT_FALSE(fn.is_macro);
  const auto& loop = std::get<ForeachBlock>(fn.body[0].node);
  EXPECT_EQ(command(loop.body[0]).name, "message");
  EXPECT_TRUE(std::get<FunctionDef>(ast[1].node).is_macro);
  EXPECT_TRUE(std::holds_alternative<WhileBlock>(ast[2].node));
}

TEST(Parser, Errors) {
  EXPECT_EQ(parse_error_kind("endif()\n"), "UnbalancedBlock");
  EXPECT_EQ(parse_error_kind("if(X)\nset(A 1)\n"), "UnbalancedBlock");
  EXPECT_EQ(parse_error_kind("foreach(x a)\nendif()\n"), "UnbalancedBlock");
  EXPECT_EQ(parse_error_kind("else()\n"), "MisplacedElse");
  EXPECT_EQ(parse_error_kind("if(X)\nelse()\nelseif(Y)\nendif()\n"), "MisplacedElse");
  EXPECT_NE(parse_error_kind("set(A 1\n"), "");
}

TEST(Parser, UnknownCommandsPreservedInOrder) {
  auto ast = parse_listfile("frob(a)\nZap(b c)\nfrob()\n", "/t/CMakeLists.txt");
  ASSERT_EQ(ast.size(), 3u);
  EXPECT_EQ(command(ast[0]).name, "frob");
  EXPECT_EQ(command(ast[1]).name, "zap");
  EXPECT_EQ(command(ast[1]).args.size(), 2u);
  EXPECT_EQ(count_commands(ast), 3u);
}

// Re-serializing a command and parsing it again gives the same node.
TEST(Parser, SerializeRoundTripOnGeneratedCommands) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pieces{"a",   "b.c",  "${X}", "$ENV{HOME}", "x y",  "q\"uote",
                                        "\\n", "]]",   "[=[",  "$<CONFIG>",  ";",    "",
                                        "#no", "semi;colon",  "tab\there",   "é"};
  for (int round = 0; round < 500; ++round) {
    CommandInvocation cmd;
    cmd.name = "cmd" + std::to_string(rng() % 5);
    std::size_t n = rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      Argument a;
      a.kind = static_cast<ArgumentKind>(rng() % 3);
      a.raw_text = pieces[rng() % pieces.size()];
      if (rng() % 2) a.raw_text += pieces[rng() % pieces.size()];
      // Unquoted arguments cannot be empty or carry whitespace/quotes/parens.
      if (a.kind == ArgumentKind::unquoted &&
          (a.raw_text.empty() || a.raw_text.find_first_of(" \t\"#()\\[]") != std::string::npos)) {
        a.kind = ArgumentKind::quoted;
      }
      if (a.kind == ArgumentKind::quoted) {
        std::string escaped;
        for (char c : a.raw_text) {
          if (c == '"' || c == '\\') escaped += '\\';
          escaped += c;
        }
        a.raw_text = escaped;
      }
      cmd.args.push_back(a);
    }
    std::string text = serialize(cmd);
    auto ast = parse_listfile(text, "/t/CMakeLists.txt");
    ASSERT_EQ(ast.size(), 1u) << text;
    EXPECT_EQ(command(ast[0]), cmd) << text;
  }
}

// Arbitrary bytes produce an AST or a structured error, never a crash.
TEST(Parser, TotalOnRandomBytes) {
  std::mt19937_64 rng(9);
  const std::string alphabet = "if()endif else set${}\"\\[]=#\n\t ab;$<>\x80\xff";
  for (int round = 0; round < 2000; ++round) {
    std::string text;
    std::size_t n = rng() % 80;
    for (std::size_t i = 0; i < n; ++i) text += alphabet[rng() % alphabet.size()];
    WarningList warnings;
    try {
      parse_text(text, "/t/CMakeLists.txt", warnings);
    } catch (const ParseError&) {
    }
  }
}

TEST(Parser, InvalidUtf8Repaired) {
  WarningList warnings;
  auto ast = parse_text("set(A \"\xff\")\n", "/t/CMakeLists.txt", warnings);
  ASSERT_EQ(ast.size(), 1u);
  EXPECT_TRUE(has_warning(warnings, warn::kInvalidUtf8));
  EXPECT_EQ(command(ast[0]).args[1].raw_text, "\xEF\xBF\xBD");
}

TEST(Loader, SubdirectoryAndIncludes) {
  auto project = load_project_from_memory(
      "/v", {{"CMakeLists.txt", "set(M cmake/extra.cmake)\ninclude(${M})\nadd_subdirectory(src)\n"
                                "include(${UNKNOWN_MODULE})\n"},
             {"cmake/extra.cmake", "set(E 1)\n"},
             {"src/CMakeLists.txt", "add_executable(x a.c)\n"}});
  EXPECT_EQ(project.files.size(), 3u);
  EXPECT_NE(project.find("/v/src/CMakeLists.txt"), nullptr);
  EXPECT_NE(project.find("/v/cmake/extra.cmake"), nullptr);
  EXPECT_TRUE(has_warning(project.warnings, warn::kUnresolvedInclude));
}

TEST(Loader, SelfIncludeIsACycle) {
  auto project = load_project_from_memory("/v", {{"CMakeLists.txt", "include(self.cmake)\n"},
                                                 {"self.cmake", "include(self.cmake)\n"}});
  EXPECT_EQ(project.files.size(), 2u);
  EXPECT_TRUE(has_warning(project.warnings, warn::kIncludeCycle));
}

TEST(Loader, DepthCap) {
  std::map<std::string, std::string> files{{"CMakeLists.txt", "add_subdirectory(d)\n"}};
  std::string dir = "d";
  for (int i = 0; i < 40; ++i) {
    files[dir + "/CMakeLists.txt"] = "add_subdirectory(d)\n";
    dir += "/d";
  }
  auto project = load_project_from_memory("/v", files);
  EXPECT_TRUE(has_warning(project.warnings, warn::kIncludeDepthExceeded));
  EXPECT_LE(project.files.size(), kIncludeDepthCap + 1);
}

TEST(Loader, MissingRoot) {
  try {
    load_project_from_memory("/v", {{"src/CMakeLists.txt", ""}});
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.kind(), "MissingRootListfile");
  }
}

TEST(Loader, BrokenChildIsAWarning) {
  auto project = load_project_from_memory(
      "/v", {{"CMakeLists.txt", "add_subdirectory(a)\n"}, {"a/CMakeLists.txt", "if(X)\n"}});
  EXPECT_TRUE(has_warning(project.warnings, warn::kParseError));
}

TEST(Loader, Fig1FixtureFromDisk) {
  auto project = load_project(std::string(CMEXPOSE_FIXTURES) + "/fig1");
  EXPECT_EQ(project.files.size(), 1u);
  EXPECT_EQ(count_commands(project.files.begin()->second), 6u);
}
