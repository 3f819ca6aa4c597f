#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

enum class AtomKind {
  truthy,   // if(<option>) truthiness of the option's value
  equals,   // option value == literal
  defined,  // option is defined
  opaque,   // an if() predicate the analyzer does not model
};

/// Leaf of a presence condition. Atoms over the same option are related only
/// through enumeration of the option's domain; no string theory is applied.
struct Atom {
  AtomKind kind = AtomKind::truthy;
  std::string option;   // empty for opaque atoms
  std::string literal;  // equals only
  std::uint32_t opaque_id = 0;
  std::string source_text;  // opaque only; informational, not part of identity
  std::optional<SourceSpan> span;

  static Atom truthy(std::string option);
  static Atom equals(std::string option, std::string literal);
  static Atom defined(std::string option);
  static Atom opaque(std::uint32_t id, std::string source_text = {},
                     std::optional<SourceSpan> span = std::nullopt);

  /// Canonical rendering; doubles as the identity key.
  std::string key() const;

  bool operator==(const Atom& other) const { return key() == other.key(); }
};

/// Immutable boolean formula over atoms. Copies share structure.
///
/// Every value is kept normalized: constants are folded away except at the
/// root, nested And/Or are flattened, children are deduplicated and sorted
/// by canonical key, x together with !x collapses, and double negation is
/// eliminated. Structural equality is therefore string equality of key().
class Condition {
 public:
  enum class Kind { constant_true, constant_false, atom, negation, conjunction, disjunction };

  /// The constant True.
  Condition();

  static Condition truth();
  static Condition falsity();
  static Condition constant(bool value);
  static Condition from_atom(Atom atom);

  Kind kind() const;
  bool is_true() const { return kind() == Kind::constant_true; }
  bool is_false() const { return kind() == Kind::constant_false; }
  bool is_constant() const { return is_true() || is_false(); }

  /// Valid only for Kind::atom.
  const Atom& atom() const;
  /// Operand of a negation, or children of a conjunction/disjunction.
  std::span<const Condition> children() const;

  /// Canonical string: TRUE, FALSE, X, X=="v", DEFINED(X), OPAQUE#id, !c,
  /// (c && c), (c || c).
  const std::string& key() const;
  std::string to_string() const { return key(); }

  /// Distinct atoms occurring in the formula, sorted by key.
  std::vector<Atom> atoms() const;
  std::size_t size() const;

  bool operator==(const Condition& other) const { return key() == other.key(); }
  bool operator<(const Condition& other) const { return key() < other.key(); }

  struct Node;

 private:
  explicit Condition(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Condition conj_all(std::span<const Condition>);
  friend Condition disj_all(std::span<const Condition>);
  friend Condition neg(const Condition&);

  std::shared_ptr<const Node> node_;
};

Condition conj(const Condition& a, const Condition& b);
Condition disj(const Condition& a, const Condition& b);
Condition neg(const Condition& a);
Condition conj_all(std::span<const Condition> parts);
Condition disj_all(std::span<const Condition> parts);

/// Looks up the source text of an opaque atom while parsing.
using OpaqueResolver = std::function<std::optional<Atom>(std::uint32_t id)>;

/// Parses the canonical string grammar produced by Condition::key().
/// Throws Error("MalformedCondition") on bad input.
Condition parse_condition(std::string_view text, const OpaqueResolver& resolve_opaque = {});

}  // namespace cmexpose
