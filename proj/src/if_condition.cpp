#include <algorithm>
#include <charconv>
#include <set>

#include "cmexpose/ast.hpp"
#include "cmexpose/config.hpp"
#include "evaluator_internal.hpp"

namespace cmexpose::detail {

namespace {

struct Token {
  std::string text;
  bool quoted = false;
};

/// Thrown on an argument list CMake itself would reject; the caller then
/// treats the whole condition as opaque.
struct MalformedIf {};

const std::set<std::string, std::less<>>& unary_predicates() {
  static const std::set<std::string, std::less<>> s{
      "EXISTS",      "COMMAND",     "POLICY",      "TARGET",       "TEST",         "IS_DIRECTORY",
      "IS_SYMLINK",  "IS_ABSOLUTE", "IS_READABLE", "IS_WRITABLE",  "IS_EXECUTABLE"};
  return s;
}

const std::set<std::string, std::less<>>& binary_predicates() {
  static const std::set<std::string, std::less<>> s{
      "STREQUAL",         "STRLESS",          "STRGREATER",        "STRLESS_EQUAL",
      "STRGREATER_EQUAL", "EQUAL",            "LESS",              "GREATER",
      "LESS_EQUAL",       "GREATER_EQUAL",    "MATCHES",           "VERSION_EQUAL",
      "VERSION_LESS",     "VERSION_GREATER",  "VERSION_LESS_EQUAL", "VERSION_GREATER_EQUAL",
      "IN_LIST",          "IS_NEWER_THAN",    "PATH_EQUAL"};
  return s;
}

bool is_keyword(const Token& t, std::string_view kw) { return !t.quoted && t.text == kw; }

std::string render_token(const Token& t) {
  std::string s = render_symbolic(t.text);
  return t.quoted ? "\"" + s + "\"" : s;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class ExpressionParser {
 public:
  ExpressionParser(std::vector<Token> tokens, const SourceSpan& span, const Condition& context,
                   ConditionHost& host)
      : tokens_(std::move(tokens)), span_(span), context_(context), host_(host) {}

  Condition parse() {
    if (tokens_.empty()) return Condition::falsity();
    Condition c = parse_or();
    if (pos_ != tokens_.size()) throw MalformedIf{};
    return c;
  }

 private:
  bool at_keyword(std::string_view kw) const {
    return pos_ < tokens_.size() && is_keyword(tokens_[pos_], kw);
  }

  const Token& take() {
    if (pos_ >= tokens_.size()) throw MalformedIf{};
    return tokens_[pos_++];
  }

  Condition parse_or() {
    std::vector<Condition> parts{parse_and()};
    while (at_keyword("OR")) {
      ++pos_;
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? parts[0] : disj_all(parts);
  }

  Condition parse_and() {
    std::vector<Condition> parts{parse_not()};
    while (at_keyword("AND")) {
      ++pos_;
      parts.push_back(parse_not());
    }
    return parts.size() == 1 ? parts[0] : conj_all(parts);
  }

  Condition parse_not() {
    if (at_keyword("NOT")) {
      ++pos_;
      return neg(parse_not());
    }
    return parse_primary();
  }

  Condition parse_primary() {
    if (at_keyword("(")) {
      ++pos_;
      Condition inner = parse_or();
      if (!at_keyword(")")) throw MalformedIf{};
      ++pos_;
      return inner;
    }
    if (pos_ >= tokens_.size()) throw MalformedIf{};
    const Token& first = tokens_[pos_];
    if (!first.quoted && first.text == "DEFINED") {
      ++pos_;
      return defined(take());
    }
    if (!first.quoted && unary_predicates().count(first.text) && pos_ + 1 < tokens_.size()) {
      ++pos_;
      const Token& operand = take();
      return opaque(first.text + " " + render_token(operand));
    }
    const Token& lhs = take();
    if (pos_ < tokens_.size() && !tokens_[pos_].quoted &&
        binary_predicates().count(tokens_[pos_].text)) {
      std::string op = take().text;
      const Token& rhs = take();
      return binary(lhs, op, rhs);
    }
    return truthiness(lhs);
  }

  Condition opaque(const std::string& text) {
    host_.expander().warn(warn::kUnsupportedPredicate, "predicate treated as opaque: " + text,
                          span_);
    return Condition::from_atom(host_.opaque_atom(text, span_));
  }

  /// (guard, value) pairs an operand can take. Unquoted operands naming a
  /// variable are dereferenced; otherwise the text stands for itself.
  std::vector<std::pair<Condition, std::string>> operand_values(const Token& t) {
    std::vector<std::pair<Condition, std::string>> out;
    if (t.quoted || contains_symbolic(t.text)) {
      out.emplace_back(Condition::truth(), t.text);
      return out;
    }
    const VariableValue* v = host_.lookup(t.text, LookupMode::value);
    if (!v || v->defined.is_false()) {
      out.emplace_back(Condition::truth(), t.text);
      return out;
    }
    auto flat = host_.expander().flatten(t.text, *v);
    if (!flat) throw MalformedIf{};
    for (const auto& alt : flat->alternatives) {
      if (!host_.expander().solver().possible(conj(context_, alt.guard))) continue;
      out.emplace_back(alt.guard, alt.defined ? join_list(alt.values) : t.text);
    }
    return out;
  }

  /// Truth of a concrete-or-symbolic string used as a value.
  Condition value_truth(const std::string& value, const std::string& opaque_text) {
    if (auto option = symbolic_option(value)) return Condition::from_atom(Atom::truthy(*option));
    if (contains_symbolic(value)) return opaque(opaque_text);
    return Condition::constant(cmake_truthy(value));
  }

  Condition truthiness(const Token& t) {
    if (t.quoted) {
      if (auto option = symbolic_option(t.text)) return Condition::from_atom(Atom::truthy(*option));
      if (contains_symbolic(t.text)) return opaque(render_token(t));
      return Condition::constant(is_true_constant(t.text));
    }
    if (is_true_constant(t.text)) return Condition::truth();
    if (is_false_constant(t.text)) return Condition::falsity();
    if (contains_symbolic(t.text)) return value_truth(t.text, render_token(t));
    const VariableValue* v = host_.lookup(t.text, LookupMode::truthiness);
    if (!v || v->defined.is_false()) return Condition::falsity();
    auto flat = host_.expander().flatten(t.text, *v);
    if (!flat) throw MalformedIf{};
    std::vector<Condition> parts;
    for (const auto& alt : flat->alternatives) {
      if (!alt.defined) continue;
      parts.push_back(conj(alt.guard, value_truth(join_list(alt.values), t.text)));
    }
    return disj_all(parts);
  }

  Condition defined(const Token& t) {
    const VariableValue* v = nullptr;
    if (t.text.rfind("CACHE{", 0) == 0 && t.text.back() == '}') {
      v = host_.lookup(t.text, LookupMode::value);
    } else {
      v = host_.lookup(t.text, LookupMode::defined);
    }
    return v ? v->defined : Condition::falsity();
  }

  Condition binary(const Token& lhs, const std::string& op, const Token& rhs) {
    std::string text = render_token(lhs) + " " + op + " " + render_token(rhs);
    if (op == "MATCHES" || op.rfind("VERSION_", 0) == 0 || op == "IS_NEWER_THAN" ||
        op == "PATH_EQUAL") {
      return opaque(text);
    }
    if (op == "IN_LIST") return in_list(lhs, rhs, text);

    std::vector<Condition> parts;
    for (const auto& [lg, lv] : operand_values(lhs)) {
      for (const auto& [rg, rv] : operand_values(rhs)) {
        Condition g = conj(lg, rg);
        if (!host_.expander().solver().possible(conj(context_, g))) continue;
        parts.push_back(conj(g, compare(lv, op, rv, text)));
      }
    }
    return disj_all(parts);
  }

  Condition compare(const std::string& a, const std::string& op, const std::string& b,
                    const std::string& text) {
    bool a_sym = contains_symbolic(a);
    bool b_sym = contains_symbolic(b);
    if (!a_sym && !b_sym) {
      if (op == "STREQUAL") return Condition::constant(a == b);
      if (op == "STRLESS") return Condition::constant(a < b);
      if (op == "STRGREATER") return Condition::constant(a > b);
      if (op == "STRLESS_EQUAL") return Condition::constant(a <= b);
      if (op == "STRGREATER_EQUAL") return Condition::constant(a >= b);
      auto x = parse_number(a);
      auto y = parse_number(b);
      if (!x || !y) return Condition::falsity();
      if (op == "EQUAL") return Condition::constant(*x == *y);
      if (op == "LESS") return Condition::constant(*x < *y);
      if (op == "GREATER") return Condition::constant(*x > *y);
      if (op == "LESS_EQUAL") return Condition::constant(*x <= *y);
      if (op == "GREATER_EQUAL") return Condition::constant(*x >= *y);
      return opaque(text);
    }
    if (op == "STREQUAL") {
      auto sa = symbolic_option(a);
      auto sb = symbolic_option(b);
      if (sa && sb) return *sa == *sb ? Condition::truth() : opaque(text);
      if (sa && !b_sym) return Condition::from_atom(Atom::equals(*sa, b));
      if (sb && !a_sym) return Condition::from_atom(Atom::equals(*sb, a));
    }
    return opaque(text);
  }

  Condition in_list(const Token& lhs, const Token& rhs, const std::string& text) {
    const VariableValue* list = host_.lookup(rhs.text, LookupMode::value);
    if (!list || list->defined.is_false()) return Condition::falsity();
    auto flat = host_.expander().flatten(rhs.text, *list);
    if (!flat) throw MalformedIf{};
    std::vector<Condition> parts;
    for (const auto& [lg, lv] : operand_values(lhs)) {
      for (const auto& alt : flat->alternatives) {
        if (!alt.defined) continue;
        Condition g = conj(lg, alt.guard);
        if (!host_.expander().solver().possible(conj(context_, g))) continue;
        std::vector<Condition> hits;
        bool opaque_needed = false;
        for (const auto& item : alt.values) {
          if (contains_symbolic(item)) {
            auto s = symbolic_option(item);
            if (s && !contains_symbolic(lv)) {
              hits.push_back(Condition::from_atom(Atom::equals(*s, lv)));
            } else {
              opaque_needed = true;
            }
          } else if (contains_symbolic(lv)) {
            auto s = symbolic_option(lv);
            if (s) {
              hits.push_back(Condition::from_atom(Atom::equals(*s, item)));
            } else {
              opaque_needed = true;
            }
          } else if (item == lv) {
            hits.push_back(Condition::truth());
          }
        }
        if (opaque_needed) hits.push_back(opaque(text));
        parts.push_back(conj(g, disj_all(hits)));
      }
    }
    return disj_all(parts);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  SourceSpan span_;
  Condition context_;
  ConditionHost& host_;
};

}  // namespace

std::string render_arguments(const std::vector<Argument>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out.push_back(' ');
    out += serialize(args[i]);
  }
  return out;
}

Condition interpret_condition(const std::vector<Argument>& args, const SourceSpan& span,
                              const Condition& context, ConditionHost& host) {
  auto& expander = host.expander();
  std::string raw = render_arguments(args);

  // Cross product of per-argument expansions.
  struct Combo {
    Condition guard;
    std::vector<Token> tokens;
  };
  std::vector<Combo> combos{{Condition::truth(), {}}};
  bool overflow = false;
  for (const auto& arg : args) {
    bool quoted = arg.kind != ArgumentKind::unquoted;
    auto branches = expander.expand_relative(arg, context);
    std::vector<Combo> next;
    for (const auto& combo : combos) {
      for (const auto& branch : branches) {
        Condition g = conj(combo.guard, branch.guard);
        if (!branch.guard.is_true() && !expander.solver().possible(conj(context, g))) continue;
        Combo c{g, combo.tokens};
        for (const auto& s : branch.strings) c.tokens.push_back({s, quoted});
        next.push_back(std::move(c));
      }
    }
    if (next.size() > expander.limits().branch_cap) {
      overflow = true;
      break;
    }
    combos = std::move(next);
  }
  if (overflow) {
    expander.warn(warn::kBranchOverflow, "if() condition has too many expansion branches: " + raw,
                  span);
    return Condition::from_atom(host.opaque_atom(raw, span));
  }

  std::vector<Condition> parts;
  for (auto& combo : combos) {
    Condition c;
    try {
      c = ExpressionParser(std::move(combo.tokens), span, context, host).parse();
    } catch (const MalformedIf&) {
      expander.warn(warn::kUnsupportedPredicate, "cannot interpret if() condition: " + raw, span);
      c = Condition::from_atom(host.opaque_atom(raw, span));
    }
    parts.push_back(conj(combo.guard, c));
  }
  return simplify(disj_all(parts));
}

}  // namespace cmexpose::detail
