#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmexpose/condition.hpp"
#include "cmexpose/config.hpp"

namespace cmexpose {

inline constexpr std::size_t kDefaultAtomCap = 20;
inline constexpr std::size_t kDefaultClauseCap = 64;

enum class Tristate { no, yes, unknown };

std::string to_string(Tristate value);

struct Literal {
  Atom atom;
  bool positive = true;

  bool operator==(const Literal& other) const {
    return positive == other.positive && atom == other.atom;
  }
};

/// Conjunction of literals, sorted by atom key.
using Clause = std::vector<Literal>;

/// Disjunction of clauses. No clauses means False; a single empty clause
/// means True.
struct Dnf {
  std::vector<Clause> clauses;
};

/// Truth-table-equivalent DNF with contradictory, duplicate and subsumed
/// clauses removed. Returns nullopt (overflow) when more than `clause_cap`
/// clauses would be needed at any step.
std::optional<Dnf> to_dnf(const Condition& c, std::size_t clause_cap);

Condition from_dnf(const Dnf& dnf);

/// DNF reduced further by self-subsuming resolution ((x&R) | (!x&S) with
/// S a subset of R becomes R | (!x&S)), rendered back as a Condition.
/// nullopt on overflow.
std::optional<Condition> canonical_dnf(const Condition& c,
                                       std::size_t clause_cap = kDefaultClauseCap);

/// The smaller (by rendered size) of `c` and its canonical DNF.
Condition simplify(const Condition& c, std::size_t clause_cap = kDefaultClauseCap);

/// Kleene evaluation. An atom is unknown when its option has no value in the
/// assignment (and no default applies), and always for opaque atoms.
Tristate evaluate(const Condition& c, const ConfigurationAssignment& assignment,
                  const OptionTable& options = {});

/// Whether `atom` holds when its option has `value` (nullopt = undefined).
/// Opaque atoms never reach this function.
bool atom_holds(const Atom& atom, const std::optional<std::string>& value);

struct VariantCount {
  std::uint64_t count = 0;
  bool exact = true;

  bool operator==(const VariantCount&) const = default;
};

/// Number of assignments, over the options mentioned in `c`, that satisfy it.
/// Boolean options contribute ON/OFF, enumerated options their values.
/// Options with an opaque domain are enumerated by representative values and
/// make the count inexact; so do opaque atoms and options beyond `atom_cap`,
/// which are treated existentially (an assignment counts if some choice of
/// those atoms satisfies `c`).
VariantCount count_variants(const Condition& c, const OptionTable& options,
                            std::size_t atom_cap = kDefaultAtomCap);
/// Same, over the options mentioned by `c` or by `space`. Counts of several
/// conditions over one shared space are comparable.
VariantCount count_variants(const Condition& c, const OptionTable& options,
                            std::span<const Atom> space, std::size_t atom_cap = kDefaultAtomCap);

/// yes iff some assignment satisfies `c` regardless of opaque atoms; unknown
/// when satisfaction hinges on opaque atoms (or the search was cut short);
/// no when unsatisfiable.
Tristate satisfiable(const Condition& c, const OptionTable& options,
                     std::size_t atom_cap = kDefaultAtomCap);

}  // namespace cmexpose
