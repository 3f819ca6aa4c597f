#include "cmexpose/condition.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <variant>

namespace cmexpose {

struct Condition::Node {
  Kind kind;
  Atom atom;
  std::vector<Condition> children;
  std::string key;
};

namespace {

std::string quote_literal(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::shared_ptr<const Condition::Node> make_node(Condition::Kind kind, Atom atom,
                                                 std::vector<Condition> children) {
  auto node = std::make_shared<Condition::Node>();
  node->kind = kind;
  switch (kind) {
    case Condition::Kind::constant_true:
      node->key = "TRUE";
      break;
    case Condition::Kind::constant_false:
      node->key = "FALSE";
      break;
    case Condition::Kind::atom:
      node->key = atom.key();
      node->atom = std::move(atom);
      break;
    case Condition::Kind::negation:
      node->key = "!" + children.front().key();
      break;
    case Condition::Kind::conjunction:
    case Condition::Kind::disjunction: {
      const char* sep = kind == Condition::Kind::conjunction ? " && " : " || ";
      std::size_t len = 2;
      for (const auto& c : children) len += c.key().size() + 4;
      node->key.reserve(len);
      node->key = "(";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) node->key += sep;
        node->key += children[i].key();
      }
      node->key += ")";
      break;
    }
  }
  node->children = std::move(children);
  return node;
}

const std::shared_ptr<const Condition::Node>& true_node() {
  static const auto node = make_node(Condition::Kind::constant_true, {}, {});
  return node;
}

const std::shared_ptr<const Condition::Node>& false_node() {
  static const auto node = make_node(Condition::Kind::constant_false, {}, {});
  return node;
}

}  // namespace

// ---------------------------------------------------------------- Atom

Atom Atom::truthy(std::string option) {
  Atom a;
  a.kind = AtomKind::truthy;
  a.option = std::move(option);
  return a;
}

Atom Atom::equals(std::string option, std::string literal) {
  Atom a;
  a.kind = AtomKind::equals;
  a.option = std::move(option);
  a.literal = std::move(literal);
  return a;
}

Atom Atom::defined(std::string option) {
  Atom a;
  a.kind = AtomKind::defined;
  a.option = std::move(option);
  return a;
}

Atom Atom::opaque(std::uint32_t id, std::string source_text, std::optional<SourceSpan> span) {
  Atom a;
  a.kind = AtomKind::opaque;
  a.opaque_id = id;
  a.source_text = std::move(source_text);
  a.span = std::move(span);
  return a;
}

std::string Atom::key() const {
  switch (kind) {
    case AtomKind::truthy:
      return option;
    case AtomKind::equals:
      return option + "==" + quote_literal(literal);
    case AtomKind::defined:
      return "DEFINED(" + option + ")";
    case AtomKind::opaque:
      return "OPAQUE#" + std::to_string(opaque_id);
  }
  return {};
}

// ---------------------------------------------------------------- Condition

Condition::Condition() : node_(true_node()) {}

Condition Condition::truth() { return Condition(true_node()); }
Condition Condition::falsity() { return Condition(false_node()); }
Condition Condition::constant(bool value) { return value ? truth() : falsity(); }

Condition Condition::from_atom(Atom atom) {
  return Condition(make_node(Kind::atom, std::move(atom), {}));
}

Condition::Kind Condition::kind() const { return node_->kind; }
const Atom& Condition::atom() const { return node_->atom; }
std::span<const Condition> Condition::children() const { return node_->children; }
const std::string& Condition::key() const { return node_->key; }

std::vector<Atom> Condition::atoms() const {
  std::map<std::string, Atom> found;
  std::vector<const Condition*> stack{this};
  while (!stack.empty()) {
    const Condition* c = stack.back();
    stack.pop_back();
    if (c->kind() == Kind::atom) {
      found.emplace(c->atom().key(), c->atom());
    } else {
      for (const auto& child : c->children()) stack.push_back(&child);
    }
  }
  std::vector<Atom> out;
  out.reserve(found.size());
  for (auto& [_, a] : found) out.push_back(std::move(a));
  return out;
}

std::size_t Condition::size() const {
  std::size_t n = 1;
  for (const auto& c : children()) n += c.size();
  return n;
}

namespace {

// Normalizes the operand list of an n-ary And/Or. Returns either a finished
// condition (constant or single operand) or the sorted, deduplicated list of
// operands for a new node.
std::variant<Condition, std::vector<Condition>> normalize_operands(
    std::span<const Condition> parts, bool conjunctive) {
  const auto self_kind =
      conjunctive ? Condition::Kind::conjunction : Condition::Kind::disjunction;
  const bool absorbing = !conjunctive;  // False absorbs And, True absorbs Or

  std::vector<Condition> flat;
  std::vector<const Condition*> pending;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) pending.push_back(&*it);
  while (!pending.empty()) {
    const Condition* c = pending.back();
    pending.pop_back();
    if (c->is_constant()) {
      if (c->is_true() == absorbing) return Condition::constant(absorbing);
      continue;
    }
    if (c->kind() == self_kind) {
      const auto ch = c->children();
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) pending.push_back(&*it);
      continue;
    }
    flat.push_back(*c);
  }

  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());

  std::set<std::string_view> keys;
  for (const auto& c : flat) keys.insert(c.key());
  for (const auto& c : flat) {
    if (c.kind() == Condition::Kind::negation && keys.count(c.children().front().key()))
      return Condition::constant(absorbing);
  }

  if (flat.empty()) return Condition::constant(!absorbing);
  if (flat.size() == 1) return flat.front();
  return flat;
}

}  // namespace

Condition conj_all(std::span<const Condition> parts) {
  auto result = normalize_operands(parts, true);
  if (auto* done = std::get_if<Condition>(&result)) return *done;
  return Condition(make_node(Condition::Kind::conjunction, {},
                             std::move(std::get<std::vector<Condition>>(result))));
}

Condition disj_all(std::span<const Condition> parts) {
  auto result = normalize_operands(parts, false);
  if (auto* done = std::get_if<Condition>(&result)) return *done;
  return Condition(make_node(Condition::Kind::disjunction, {},
                             std::move(std::get<std::vector<Condition>>(result))));
}

Condition conj(const Condition& a, const Condition& b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  const Condition parts[] = {a, b};
  return conj_all(parts);
}

Condition disj(const Condition& a, const Condition& b) {
  if (a.is_false()) return b;
  if (b.is_false()) return a;
  const Condition parts[] = {a, b};
  return disj_all(parts);
}

Condition neg(const Condition& a) {
  switch (a.kind()) {
    case Condition::Kind::constant_true:
      return Condition::falsity();
    case Condition::Kind::constant_false:
      return Condition::truth();
    case Condition::Kind::negation:
      return a.children().front();
    default:
      return Condition(make_node(Condition::Kind::negation, {}, {a}));
  }
}

// ---------------------------------------------------------------- parsing

namespace {

bool is_name_char(char c) {
  switch (c) {
    case '(': case ')': case '!': case '&': case '|': case '=': case '"': case '#':
    case ' ': case '\t': case '\n': case '\r':
      return false;
    default:
      return true;
  }
}

class ConditionParser {
 public:
  ConditionParser(std::string_view text, const OpaqueResolver& resolve)
      : text_(text), resolve_(resolve) {}

  Condition run() {
    Condition c = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error("MalformedCondition",
                why + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool consume(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  std::string name() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    if (!consume("\"")) fail("expected '\"'");
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated literal");
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("dangling escape");
        out += text_[pos_++];
        continue;
      }
      if (c == '"') break;
      out += c;
    }
    return out;
  }

  Condition expr() {
    skip_ws();
    if (consume("!")) return neg(expr());
    if (consume("(")) {
      std::vector<Condition> parts{expr()};
      std::optional<bool> conjunctive;
      while (true) {
        if (consume(")")) break;
        bool is_and;
        if (consume("&&")) {
          is_and = true;
        } else if (consume("||")) {
          is_and = false;
        } else {
          fail("expected '&&', '||' or ')'");
        }
        if (conjunctive && *conjunctive != is_and) fail("mixed operators without parentheses");
        conjunctive = is_and;
        parts.push_back(expr());
      }
      if (!conjunctive) return parts.front();
      return *conjunctive ? conj_all(parts) : disj_all(parts);
    }
    const auto start = pos_;
    if (text_.substr(pos_, 7) == "OPAQUE#") {
      pos_ += 7;
      const auto digits_start = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      if (digits_start == pos_) fail("expected opaque id");
      const auto id = static_cast<std::uint32_t>(
          std::stoul(std::string(text_.substr(digits_start, pos_ - digits_start))));
      if (resolve_) {
        if (auto atom = resolve_(id)) return Condition::from_atom(std::move(*atom));
      }
      return Condition::from_atom(Atom::opaque(id));
    }
    std::string n = name();
    if (n == "TRUE") return Condition::truth();
    if (n == "FALSE") return Condition::falsity();
    if (n == "DEFINED" && pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::string option = name();
      if (!consume(")")) fail("expected ')'");
      return Condition::from_atom(Atom::defined(std::move(option)));
    }
    if (text_.substr(pos_, 2) == "==") {
      pos_ += 2;
      return Condition::from_atom(Atom::equals(std::move(n), quoted()));
    }
    (void)start;
    return Condition::from_atom(Atom::truthy(std::move(n)));
  }

  std::string_view text_;
  const OpaqueResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Condition parse_condition(std::string_view text, const OpaqueResolver& resolve_opaque) {
  return ConditionParser(text, resolve_opaque).run();
}

}  // namespace cmexpose
