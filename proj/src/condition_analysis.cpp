#include "cmexpose/condition_analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace cmexpose {

std::string to_string(Tristate value) {
  switch (value) {
    case Tristate::no:
      return "no";
    case Tristate::yes:
      return "yes";
    case Tristate::unknown:
      return "unknown";
  }
  return {};
}

// ====================================================================== DNF

namespace {

// Literal code: atom_index * 2 + (negated ? 1 : 0). Clauses are sorted codes.
using Code = std::uint32_t;
using CodeClause = std::vector<Code>;
using CodeDnf = std::vector<CodeClause>;

class AtomInterner {
 public:
  std::uint32_t intern(const Atom& atom) {
    auto [it, inserted] = index_.emplace(atom.key(), static_cast<std::uint32_t>(atoms_.size()));
    if (inserted) atoms_.push_back(atom);
    return it->second;
  }
  const Atom& atom(std::uint32_t i) const { return atoms_[i]; }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Atom> atoms_;
};

bool contradictory(const CodeClause& c) {
  for (std::size_t i = 1; i < c.size(); ++i)
    if ((c[i] >> 1) == (c[i - 1] >> 1)) return true;
  return false;
}

// Removes duplicates and subsumed clauses. Input clauses are sorted and
// consistent.
void reduce(CodeDnf& dnf) {
  std::sort(dnf.begin(), dnf.end(), [](const CodeClause& a, const CodeClause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  dnf.erase(std::unique(dnf.begin(), dnf.end()), dnf.end());
  CodeDnf kept;
  kept.reserve(dnf.size());
  for (auto& clause : dnf) {
    const bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const CodeClause& k) {
      return std::includes(clause.begin(), clause.end(), k.begin(), k.end());
    });
    if (!subsumed) kept.push_back(std::move(clause));
  }
  dnf = std::move(kept);
}

class DnfBuilder {
 public:
  explicit DnfBuilder(std::size_t cap) : cap_(cap) {}

  std::optional<CodeDnf> build(const Condition& c, bool positive) {
    using K = Condition::Kind;
    switch (c.kind()) {
      case K::constant_true:
      case K::constant_false: {
        const bool value = c.is_true() == positive;
        return value ? CodeDnf{CodeClause{}} : CodeDnf{};
      }
      case K::atom:
        return CodeDnf{CodeClause{atoms.intern(c.atom()) * 2 + (positive ? 0u : 1u)}};
      case K::negation:
        return build(c.children().front(), !positive);
      case K::conjunction:
      case K::disjunction: {
        const bool product = (c.kind() == K::conjunction) == positive;
        CodeDnf acc = product ? CodeDnf{CodeClause{}} : CodeDnf{};
        for (const auto& child : c.children()) {
          auto part = build(child, positive);
          if (!part) return std::nullopt;
          if (product) {
            if (acc.size() * part->size() > cap_ * 4) return std::nullopt;
            CodeDnf next;
            for (const auto& a : acc) {
              for (const auto& b : *part) {
                CodeClause merged;
                merged.reserve(a.size() + b.size());
                std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
                if (!contradictory(merged)) next.push_back(std::move(merged));
              }
            }
            acc = std::move(next);
            reduce(acc);
            if (acc.empty()) return acc;  // False, stays False
          } else {
            if (acc.size() + part->size() > cap_ * 4) return std::nullopt;
            acc.insert(acc.end(), part->begin(), part->end());
            reduce(acc);
          }
          if (acc.size() > cap_) return std::nullopt;
        }
        return acc;
      }
    }
    return std::nullopt;
  }

  Dnf to_public(const CodeDnf& codes) const {
    Dnf out;
    for (const auto& clause : codes) {
      Clause lits;
      for (Code code : clause) lits.push_back({atoms.atom(code >> 1), (code & 1u) == 0});
      std::sort(lits.begin(), lits.end(), [](const Literal& a, const Literal& b) {
        const auto ka = a.atom.key();
        const auto kb = b.atom.key();
        return ka != kb ? ka < kb : a.positive > b.positive;
      });
      out.clauses.push_back(std::move(lits));
    }
    return out;
  }

  AtomInterner atoms;

 private:
  std::size_t cap_;
};

// (x & R) | (!x & S), S subset of R  =>  R | (!x & S). Repeats with
// subsumption until nothing changes.
void self_subsume(CodeDnf& dnf) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < dnf.size() && !changed; ++i) {
      for (std::size_t j = 0; j < dnf.size() && !changed; ++j) {
        if (i == j) continue;
        auto& a = dnf[i];
        const auto& b = dnf[j];
        if (b.size() > a.size()) continue;
        // Find literal l in a whose complement is in b, with b \ {~l} subset of a \ {l}.
        for (std::size_t k = 0; k < a.size(); ++k) {
          const Code comp = a[k] ^ 1u;
          if (!std::binary_search(b.begin(), b.end(), comp)) continue;
          CodeClause rest_b;
          for (Code x : b)
            if (x != comp) rest_b.push_back(x);
          CodeClause rest_a = a;
          rest_a.erase(rest_a.begin() + static_cast<std::ptrdiff_t>(k));
          if (std::includes(rest_a.begin(), rest_a.end(), rest_b.begin(), rest_b.end())) {
            a = std::move(rest_a);
            changed = true;
            break;
          }
        }
      }
    }
    if (changed) reduce(dnf);
  }
}

}  // namespace

std::optional<Dnf> to_dnf(const Condition& c, std::size_t clause_cap) {
  DnfBuilder builder(std::max<std::size_t>(clause_cap, 1));
  auto codes = builder.build(c, true);
  if (!codes) return std::nullopt;
  return builder.to_public(*codes);
}

Condition from_dnf(const Dnf& dnf) {
  std::vector<Condition> terms;
  terms.reserve(dnf.clauses.size());
  for (const auto& clause : dnf.clauses) {
    std::vector<Condition> lits;
    lits.reserve(clause.size());
    for (const auto& lit : clause) {
      auto a = Condition::from_atom(lit.atom);
      lits.push_back(lit.positive ? a : neg(a));
    }
    terms.push_back(conj_all(lits));
  }
  return disj_all(terms);
}

std::optional<Condition> canonical_dnf(const Condition& c, std::size_t clause_cap) {
  if (c.is_constant() || c.kind() == Condition::Kind::atom) return c;
  DnfBuilder builder(std::max<std::size_t>(clause_cap, 1));
  auto codes = builder.build(c, true);
  if (!codes) return std::nullopt;
  self_subsume(*codes);
  return from_dnf(builder.to_public(*codes));
}

Condition simplify(const Condition& c, std::size_t clause_cap) {
  if (c.is_constant() || c.kind() == Condition::Kind::atom) return c;
  auto dnf = canonical_dnf(c, clause_cap);
  if (!dnf) return c;
  return dnf->key().size() <= c.key().size() ? *dnf : c;
}

// ================================================================ evaluation

namespace {

// A condition flattened into post-order operations over interned atoms.
class Compiled {
 public:
  explicit Compiled(const Condition& c) { root_ = compile(c); }

  const std::vector<Atom>& atoms() const { return atoms_; }

  // values[i]: 0 = false, 1 = true, 2 = unknown
  std::uint8_t eval(const std::vector<std::uint8_t>& values) const {
    scratch_.resize(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& op = ops_[i];
      std::uint8_t r = 0;
      switch (op.kind) {
        case Condition::Kind::constant_true:
          r = 1;
          break;
        case Condition::Kind::constant_false:
          r = 0;
          break;
        case Condition::Kind::atom:
          r = values[static_cast<std::size_t>(op.atom)];
          break;
        case Condition::Kind::negation: {
          const auto v = scratch_[static_cast<std::size_t>(op.kids.front())];
          r = v == 2 ? 2 : static_cast<std::uint8_t>(1 - v);
          break;
        }
        case Condition::Kind::conjunction: {
          r = 1;
          for (int k : op.kids) {
            const auto v = scratch_[static_cast<std::size_t>(k)];
            if (v == 0) {
              r = 0;
              break;
            }
            if (v == 2) r = 2;
          }
          break;
        }
        case Condition::Kind::disjunction: {
          r = 0;
          for (int k : op.kids) {
            const auto v = scratch_[static_cast<std::size_t>(k)];
            if (v == 1) {
              r = 1;
              break;
            }
            if (v == 2) r = 2;
          }
          break;
        }
      }
      scratch_[i] = r;
    }
    return scratch_[static_cast<std::size_t>(root_)];
  }

 private:
  struct Op {
    Condition::Kind kind;
    int atom = -1;
    std::vector<int> kids;
  };

  int compile(const Condition& c) {
    if (auto it = memo_.find(c.key()); it != memo_.end()) return it->second;
    Op op{c.kind(), -1, {}};
    if (c.kind() == Condition::Kind::atom) {
      const auto key = c.atom().key();
      auto [it, inserted] = atom_index_.emplace(key, static_cast<int>(atoms_.size()));
      if (inserted) atoms_.push_back(c.atom());
      op.atom = it->second;
    } else {
      for (const auto& child : c.children()) op.kids.push_back(compile(child));
    }
    ops_.push_back(std::move(op));
    const int id = static_cast<int>(ops_.size() - 1);
    memo_.emplace(c.key(), id);
    return id;
  }

  std::vector<Op> ops_;
  std::vector<Atom> atoms_;
  std::unordered_map<std::string, int> atom_index_;
  std::unordered_map<std::string, int> memo_;
  int root_ = 0;
  mutable std::vector<std::uint8_t> scratch_;
};

Tristate to_tristate(std::uint8_t v) {
  return v == 1 ? Tristate::yes : v == 0 ? Tristate::no : Tristate::unknown;
}

const char* const kFreshTruthy = "\x01value";
const char* const kFreshFalsy = "\x01-NOTFOUND";

// The finite set of values an option is enumerated over.
struct Axis {
  std::string option;
  std::vector<std::optional<std::string>> values;
  bool exact = true;
};

Axis make_axis(const std::string& name, const OptionTable& options,
               const std::vector<const Atom*>& atoms_on_option) {
  Axis axis{name, {}, true};
  const auto it = options.find(name);
  const ConfigOption* opt = it == options.end() ? nullptr : &it->second;
  if (opt && opt->domain.kind == DomainKind::boolean) {
    axis.values = {std::string("ON"), std::string("OFF")};
    return axis;
  }
  if (opt && opt->domain.kind == DomainKind::enumerated && !opt->domain.values.empty()) {
    for (const auto& v : opt->domain.values) axis.values.emplace_back(v);
    return axis;
  }
  // Opaque or unknown domain: one representative per distinguishable class.
  axis.exact = false;
  std::vector<std::string> literals;
  for (const Atom* a : atoms_on_option)
    if (a->kind == AtomKind::equals) literals.push_back(a->literal);
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  for (auto& l : literals) axis.values.emplace_back(std::move(l));
  axis.values.emplace_back(kFreshTruthy);
  axis.values.emplace_back(kFreshFalsy);
  const bool always_defined =
      opt && (opt->origin == OptionOrigin::option_command || opt->origin == OptionOrigin::cache_override);
  if (!always_defined) axis.values.emplace_back(std::nullopt);
  return axis;
}

constexpr std::uint64_t kEnumerationBudget = 1ull << 16;
// Bounds assignments times free-atom choices, so huge guards stay cheap.
constexpr std::uint64_t kFreeSearchBudget = 1ull << 20;

// Shared enumeration core for count_variants and satisfiable.
class Enumerator {
 public:
  // Options mentioned only by `space` widen the enumeration without
  // constraining it.
  Enumerator(const Condition& c, const OptionTable& options, std::size_t atom_cap,
             std::span<const Atom> space = {})
      : compiled_(c) {
    const auto& atoms = compiled_.atoms();
    std::map<std::string, std::vector<const Atom*>> by_option;
    for (const auto& a : atoms)
      if (a.kind != AtomKind::opaque) by_option[a.option].push_back(&a);
    for (const auto& a : space)
      if (a.kind != AtomKind::opaque) by_option[a.option].push_back(&a);

    std::uint64_t product = 1;
    std::size_t taken = 0;
    for (const auto& [name, on_option] : by_option) {
      Axis axis = make_axis(name, options, on_option);
      const std::uint64_t size = axis.values.size();
      if (taken < atom_cap && product * size <= kEnumerationBudget) {
        product *= size;
        axes_.push_back(std::move(axis));
        ++taken;
      } else {
        truncated_ = true;
      }
    }
    product_ = product;
    axis_atoms_.resize(axes_.size());
    std::map<std::string, std::size_t> axis_of;
    for (std::size_t i = 0; i < axes_.size(); ++i) axis_of[axes_[i].option] = i;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      auto it = a.kind == AtomKind::opaque ? axis_of.end() : axis_of.find(a.option);
      if (it == axis_of.end()) {
        free_atoms_.push_back(i);
      } else {
        axis_atoms_[it->second].push_back(i);
      }
    }
  }

  bool exact() const {
    if (truncated_ || !free_atoms_.empty()) return false;
    return std::all_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.exact; });
  }

  bool free_search_capped() const {
    return free_atoms_.size() > 20 || (product_ << free_atoms_.size()) > kFreeSearchBudget;
  }

  // Calls visit(result) per enumerated assignment, where result is the
  // condition's value with free atoms quantified existentially: 1 if true for
  // all free choices, 2 if true only for some (or search capped), 0 if never.
  // visit returns false to stop.
  template <typename Visit>
  void run(Visit&& visit) const {
    std::vector<std::uint8_t> values(compiled_.atoms().size(), 2);
    std::vector<std::size_t> digits(axes_.size(), 0);
    const auto& atoms = compiled_.atoms();
    while (true) {
      for (std::size_t ax = 0; ax < axes_.size(); ++ax) {
        const auto& value = axes_[ax].values[digits[ax]];
        for (std::size_t ai : axis_atoms_[ax])
          values[ai] = atom_holds(atoms[ai], value) ? 1 : 0;
      }
      std::uint8_t r = compiled_.eval(values);
      if (r == 2) r = search_free(values);
      if (!visit(r)) return;
      // advance mixed-radix counter
      std::size_t ax = 0;
      while (ax < axes_.size()) {
        if (++digits[ax] < axes_[ax].values.size()) break;
        digits[ax] = 0;
        ++ax;
      }
      if (ax == axes_.size()) return;
    }
  }

 private:
  std::uint8_t search_free(std::vector<std::uint8_t>& values) const {
    if (free_atoms_.empty() || free_search_capped()) return 2;
    const std::uint64_t n = 1ull << free_atoms_.size();
    bool any_true = false;
    bool all_true = true;
    for (std::uint64_t m = 0; m < n; ++m) {
      for (std::size_t k = 0; k < free_atoms_.size(); ++k)
        values[free_atoms_[k]] = static_cast<std::uint8_t>((m >> k) & 1u);
      const bool t = compiled_.eval(values) == 1;
      any_true = any_true || t;
      all_true = all_true && t;
    }
    for (std::size_t k : free_atoms_) values[k] = 2;
    if (all_true) return 1;
    return any_true ? 2 : 0;
  }

  Compiled compiled_;
  std::vector<Axis> axes_;
  std::vector<std::vector<std::size_t>> axis_atoms_;
  std::vector<std::size_t> free_atoms_;
  bool truncated_ = false;
  std::uint64_t product_ = 1;
};

std::optional<std::string> value_for(const std::string& option,
                                     const ConfigurationAssignment& assignment,
                                     const OptionTable& options, bool& known) {
  known = true;
  if (auto it = assignment.values.find(option); it != assignment.values.end()) return it->second;
  if (assignment.total) {
    if (auto it = options.find(option); it != options.end() && it->second.default_value)
      return it->second.default_value;
  }
  known = false;
  return std::nullopt;
}

}  // namespace

bool atom_holds(const Atom& atom, const std::optional<std::string>& value) {
  switch (atom.kind) {
    case AtomKind::truthy:
      return value.has_value() && cmake_truthy(*value);
    case AtomKind::equals:
      return value.has_value() && *value == atom.literal;
    case AtomKind::defined:
      return value.has_value();
    case AtomKind::opaque:
      return false;
  }
  return false;
}

Tristate evaluate(const Condition& c, const ConfigurationAssignment& assignment,
                  const OptionTable& options) {
  if (c.is_constant()) return c.is_true() ? Tristate::yes : Tristate::no;
  Compiled compiled(c);
  std::vector<std::uint8_t> values;
  values.reserve(compiled.atoms().size());
  for (const auto& atom : compiled.atoms()) {
    if (atom.kind == AtomKind::opaque) {
      values.push_back(2);
      continue;
    }
    bool known = false;
    auto value = value_for(atom.option, assignment, options, known);
    values.push_back(known ? (atom_holds(atom, value) ? 1 : 0) : 2);
  }
  return to_tristate(compiled.eval(values));
}

VariantCount count_variants(const Condition& c, const OptionTable& options,
                            std::size_t atom_cap) {
  return count_variants(c, options, {}, atom_cap);
}

VariantCount count_variants(const Condition& c, const OptionTable& options,
                            std::span<const Atom> space, std::size_t atom_cap) {
  if (c.is_true() && space.empty()) return {1, true};
  if (c.is_false()) return {0, true};
  Enumerator e(c, options, std::max<std::size_t>(atom_cap, 1), space);
  VariantCount out{0, e.exact()};
  e.run([&](std::uint8_t r) {
    if (r != 0) ++out.count;
    if (r == 2) out.exact = false;
    return true;
  });
  return out;
}

namespace {

// Per-clause consistency: every option's literals must be jointly satisfiable
// by one value of that option. Returns 1 consistent, 2 consistent but only
// through opaque atoms, 0 inconsistent.
std::uint8_t clause_status(const Clause& clause, const OptionTable& options) {
  std::map<std::string, std::vector<const Literal*>> by_option;
  bool has_opaque = false;
  for (const auto& lit : clause) {
    if (lit.atom.kind == AtomKind::opaque) {
      has_opaque = true;
    } else {
      by_option[lit.atom.option].push_back(&lit);
    }
  }
  for (const auto& [name, lits] : by_option) {
    std::vector<const Atom*> atoms;
    for (const auto* l : lits) atoms.push_back(&l->atom);
    const Axis axis = make_axis(name, options, atoms);
    const bool ok = std::any_of(axis.values.begin(), axis.values.end(), [&](const auto& value) {
      return std::all_of(lits.begin(), lits.end(), [&](const Literal* l) {
        return atom_holds(l->atom, value) == l->positive;
      });
    });
    if (!ok) return 0;
  }
  return has_opaque ? 2 : 1;
}

constexpr std::size_t kSatisfiabilityClauseCap = 256;

// Backtracking over option values with three-valued pruning: a partial
// assignment under which the formula is already false (or true) ends the
// branch. Opaque atoms stay unknown until a full assignment leaves the result
// open; then up to 10 of them are tried exhaustively.
constexpr std::uint64_t kSearchBudget = 1ull << 16;

Tristate search_satisfiable(const Condition& c, const OptionTable& options, std::size_t atom_cap) {
  Compiled compiled(c);
  const auto& atoms = compiled.atoms();
  std::map<std::string, std::vector<const Atom*>> by_option;
  std::map<std::string, std::vector<std::size_t>> index_of;
  std::vector<std::size_t> opaque;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].kind == AtomKind::opaque) {
      opaque.push_back(i);
    } else {
      by_option[atoms[i].option].push_back(&atoms[i]);
      index_of[atoms[i].option].push_back(i);
    }
  }
  std::vector<Axis> axes;
  for (const auto& [name, on_option] : by_option) axes.push_back(make_axis(name, options, on_option));
  std::stable_sort(axes.begin(), axes.end(), [&](const Axis& a, const Axis& b) {
    return index_of[a.option].size() > index_of[b.option].size();
  });
  (void)atom_cap;

  std::vector<std::uint8_t> values(atoms.size(), 2);
  std::uint64_t budget = kSearchBudget;
  bool maybe = false;
  bool exhausted = false;

  auto opaque_choice = [&]() {
    if (opaque.size() > 10) return true;
    bool any = false;
    for (std::uint64_t m = 0; m < (1ull << opaque.size()) && !any; ++m) {
      for (std::size_t k = 0; k < opaque.size(); ++k)
        values[opaque[k]] = static_cast<std::uint8_t>((m >> k) & 1u);
      any = compiled.eval(values) == 1;
    }
    for (std::size_t k : opaque) values[k] = 2;
    return any;
  };

  std::function<bool(std::size_t)> dfs = [&](std::size_t k) {
    if (budget-- == 0) {
      exhausted = true;
      return false;
    }
    const std::uint8_t r = compiled.eval(values);
    if (r == 0) return false;
    if (r == 1) return true;
    if (k == axes.size()) {
      if (opaque_choice()) maybe = true;
      return false;
    }
    const auto& idx = index_of[axes[k].option];
    for (const auto& value : axes[k].values) {
      for (std::size_t ai : idx) values[ai] = atom_holds(atoms[ai], value) ? 1 : 0;
      if (dfs(k + 1)) return true;
      if (exhausted) break;
    }
    for (std::size_t ai : idx) values[ai] = 2;
    return false;
  };
  if (dfs(0)) return Tristate::yes;
  return maybe || exhausted ? Tristate::unknown : Tristate::no;
}

}  // namespace

Tristate satisfiable(const Condition& c, const OptionTable& options, std::size_t atom_cap) {
  if (c.is_constant()) return c.is_true() ? Tristate::yes : Tristate::no;
  if (auto dnf = to_dnf(c, kSatisfiabilityClauseCap)) {
    bool maybe = false;
    for (const auto& clause : dnf->clauses) {
      const auto status = clause_status(clause, options);
      if (status == 1) return Tristate::yes;
      if (status == 2) maybe = true;
    }
    return maybe ? Tristate::unknown : Tristate::no;
  }
  return search_satisfiable(c, options, atom_cap);
}

}  // namespace cmexpose
