#include <gtest/gtest.h>

#include "cmexpose/condition.hpp"
#include "cmexpose/condition_analysis.hpp"
#include "generators.hpp"

using namespace cmexpose;
namespace gen = cmexpose::testing;
using gen::Rng;

namespace {

Condition T(const std::string& name) { return Condition::from_atom(Atom::truthy(name)); }
Condition Eq(const std::string& name, const std::string& v) {
  return Condition::from_atom(Atom::equals(name, v));
}

OptionTable booleans(std::initializer_list<const char*> names) {
  OptionTable t;
  for (const char* n : names) t[n] = ConfigOption{n, {}, "OFF", OptionOrigin::option_command};
  return t;
}

std::uint64_t brute_count(const Condition& c, const OptionTable& options) {
  std::uint64_t n = 0;
  for (const auto& v : gen::all_valuations(gen::mentioned_options(c), options))
    if (gen::oracle_eval(c, v)) ++n;
  return n;
}

ConfigurationAssignment total(const std::map<std::string, std::string>& values) {
  return ConfigurationAssignment{values, true};
}

}  // namespace

TEST(Algebra, ConstructorExamples) {
  Condition a = T("A");
  EXPECT_EQ(conj(Condition::truth(), a), a);
  EXPECT_TRUE(conj(a, neg(a)).is_false());
  EXPECT_EQ(disj(a, a), a);
  EXPECT_TRUE(disj(a, neg(a)).is_true());
  EXPECT_TRUE(conj(Condition::falsity(), a).is_false());
  EXPECT_EQ(neg(neg(a)), a);
  EXPECT_EQ(conj(a, T("B")), conj(T("B"), a));
  EXPECT_EQ(conj(conj(a, T("B")), T("C")), conj(a, conj(T("B"), T("C"))));
}

TEST(Algebra, OpaqueAtomsShareIdentityById) {
  Condition u = Condition::from_atom(Atom::opaque(3, "EXISTS foo"));
  Condition same = Condition::from_atom(Atom::opaque(3, "different text"));
  EXPECT_TRUE(conj(u, neg(same)).is_false());
  EXPECT_EQ(u.key(), "OPAQUE#3");
}

TEST(Algebra, CanonicalStrings) {
  EXPECT_EQ(Condition::truth().key(), "TRUE");
  EXPECT_EQ(Condition::falsity().key(), "FALSE");
  EXPECT_EQ(Eq("X", "v").key(), "X==\"v\"");
  EXPECT_EQ(Condition::from_atom(Atom::defined("X")).key(), "DEFINED(X)");
  EXPECT_EQ(neg(T("X")).key(), "!X");
  EXPECT_EQ(conj(T("B"), T("A")).key(), "(A && B)");
  EXPECT_EQ(disj(T("B"), T("A")).key(), "(A || B)");
}

TEST(Dnf, Examples) {
  auto d = to_dnf(conj(T("A"), disj(T("B"), T("C"))), 64);
  ASSERT_TRUE(d);
  EXPECT_EQ(from_dnf(*d), disj(conj(T("A"), T("B")), conj(T("A"), T("C"))));

  // (A | B) & !A has one clause, B & !A: checked against the four rows.
  auto e = to_dnf(conj(disj(T("A"), T("B")), neg(T("A"))), 64);
  ASSERT_TRUE(e);
  ASSERT_EQ(e->clauses.size(), 1u);
  EXPECT_EQ(from_dnf(*e), conj(T("B"), neg(T("A"))));

  auto t = to_dnf(Condition::truth(), 64);
  ASSERT_TRUE(t);
  ASSERT_EQ(t->clauses.size(), 1u);
  EXPECT_TRUE(t->clauses[0].empty());

  auto f = to_dnf(Condition::falsity(), 64);
  ASSERT_TRUE(f);
  EXPECT_TRUE(f->clauses.empty());
}

TEST(Dnf, OverflowIsAValue) {
  // (A0|B0) & ... & (A6|B6) needs 128 clauses.
  std::vector<Condition> parts;
  for (int i = 0; i < 7; ++i)
    parts.push_back(disj(T("A" + std::to_string(i)), T("B" + std::to_string(i))));
  Condition c = conj_all(parts);
  EXPECT_FALSE(to_dnf(c, 64));
  EXPECT_TRUE(to_dnf(c, 128));
  EXPECT_EQ(simplify(c), c);
}

TEST(Dnf, SelfSubsumption) {
  // (A & B) | (!A & B) reduces to B.
  auto c = canonical_dnf(disj(conj(T("A"), T("B")), conj(neg(T("A")), T("B"))));
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, T("B"));
  auto d = canonical_dnf(disj(T("A"), conj(neg(T("A")), T("B"))));
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, disj(T("A"), T("B")));
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(T("FEATURE_CURL"), {{{"FEATURE_CURL", "ON"}}}), Tristate::yes);
  EXPECT_EQ(evaluate(T("FEATURE_CURL"), {{{"FEATURE_CURL", "OFF"}}}), Tristate::no);
  EXPECT_EQ(evaluate(Condition::truth(), {}), Tristate::yes);
  EXPECT_EQ(evaluate(Condition::from_atom(Atom::opaque(1)), total({})), Tristate::unknown);
  EXPECT_EQ(evaluate(T("X"), {}), Tristate::unknown);
}

TEST(Evaluate, Truthiness) {
  for (const char* v : {"ON", "TRUE", "YES", "1", "Y", "2", "abc", "on"}) {
    EXPECT_EQ(evaluate(T("X"), {{{"X", v}}}), Tristate::yes) << v;
  }
  for (const char* v : {"OFF", "FALSE", "NO", "0", "", "NOTFOUND", "lib-NOTFOUND", "IGNORE", "N",
                        "off", "0.0"}) {
    EXPECT_EQ(evaluate(T("X"), {{{"X", v}}}), Tristate::no) << v;
  }
}

TEST(Evaluate, DefaultsUnderTotalAssignments) {
  auto options = booleans({"A"});
  options["A"].default_value = "ON";
  EXPECT_EQ(evaluate(T("A"), total({}), options), Tristate::yes);
  EXPECT_EQ(evaluate(T("A"), {}, options), Tristate::unknown);
  // Kleene: a known false conjunct decides regardless of unknowns.
  EXPECT_EQ(evaluate(conj(T("A"), T("B")), {{{"A", "OFF"}}}), Tristate::no);
  EXPECT_EQ(evaluate(disj(T("A"), T("B")), {{{"A", "ON"}}}), Tristate::yes);
}

TEST(Count, Examples) {
  auto ab = booleans({"A", "B"});
  EXPECT_EQ(count_variants(T("A"), ab), (VariantCount{1, true}));
  EXPECT_EQ(count_variants(disj(T("A"), T("B")), ab), (VariantCount{3, true}));
  EXPECT_EQ(count_variants(Condition::truth(), {}), (VariantCount{1, true}));
  EXPECT_EQ(count_variants(Condition::falsity(), ab), (VariantCount{0, true}));
  EXPECT_FALSE(count_variants(disj(T("A"), T("B")), ab, 1).exact);
  auto opaque = count_variants(conj(T("A"), Condition::from_atom(Atom::opaque(1))), ab);
  EXPECT_FALSE(opaque.exact);
  EXPECT_EQ(opaque.count, 1u);
}

TEST(Satisfiable, Examples) {
  auto a = booleans({"A"});
  EXPECT_EQ(satisfiable(conj(T("A"), neg(T("A"))), a), Tristate::no);
  EXPECT_EQ(satisfiable(T("A"), a), Tristate::yes);
  EXPECT_EQ(satisfiable(Condition::from_atom(Atom::opaque(7)), a), Tristate::unknown);
  // Atoms of one enumerated option exclude each other.
  OptionTable e;
  e["E"] = ConfigOption{"E", {DomainKind::enumerated, {"a", "b"}}, "a", OptionOrigin::cache_override};
  EXPECT_EQ(satisfiable(conj(Eq("E", "a"), Eq("E", "b")), e), Tristate::no);
  EXPECT_EQ(satisfiable(conj(neg(Eq("E", "a")), neg(Eq("E", "b"))), e), Tristate::no);
}

// The central property suite: 1000 random formulas over twelve atoms.
TEST(Property, TruthTablesAndCounts) {
  Rng rng(20240613);
  const OptionTable options = gen::condition_options();
  for (int round = 0; round < 1000; ++round) {
    Condition c = gen::random_condition(rng, 12, 4);
    auto names = gen::mentioned_options(c);
    auto rows = gen::all_valuations(names, options);

    auto dnf = to_dnf(c, 4096);
    ASSERT_TRUE(dnf) << c.key();
    Condition flat = from_dnf(*dnf);
    Condition canon = canonical_dnf(c, 4096).value();
    Condition simple = simplify(c);
    Condition reparsed = parse_condition(c.key());
    EXPECT_EQ(reparsed, c);

    for (const auto& row : rows) {
      bool expected = gen::oracle_eval(c, row);
      ASSERT_EQ(gen::oracle_eval(flat, row), expected) << c.key();
      ASSERT_EQ(gen::oracle_eval(canon, row), expected) << c.key();
      ASSERT_EQ(gen::oracle_eval(simple, row), expected) << c.key();
      ConfigurationAssignment a{row, false};
      ASSERT_EQ(evaluate(c, a, options), expected ? Tristate::yes : Tristate::no) << c.key();
    }

    // No clause is contradictory or subsumed by another.
    for (std::size_t i = 0; i < dnf->clauses.size(); ++i) {
      const auto& ci = dnf->clauses[i];
      for (std::size_t j = 0; j < dnf->clauses.size(); ++j) {
        if (i == j) continue;
        const auto& cj = dnf->clauses[j];
        bool subsumed = std::all_of(cj.begin(), cj.end(), [&](const Literal& l) {
          return std::find(ci.begin(), ci.end(), l) != ci.end();
        });
        EXPECT_FALSE(subsumed) << c.key();
      }
    }

    std::uint64_t brute = brute_count(c, options);
    auto counted = count_variants(c, options);
    EXPECT_EQ(counted, (VariantCount{brute, true})) << c.key();
    auto complement = count_variants(neg(c), options);
    if (!c.is_constant()) EXPECT_EQ(counted.count + complement.count, rows.size()) << c.key();
    EXPECT_EQ(satisfiable(c, options), brute > 0 ? Tristate::yes : Tristate::no) << c.key();
  }
}

// A decided partial evaluation never changes when the assignment is completed.
TEST(Property, EvaluateMonotoneUnderExtension) {
  Rng rng(77);
  const OptionTable options = gen::condition_options();
  for (int round = 0; round < 300; ++round) {
    Condition c = gen::random_condition(rng, 8, 3);
    auto names = gen::mentioned_options(c);
    for (const auto& row : gen::all_valuations(names, options)) {
      std::map<std::string, std::string> partial;
      for (const auto& [k, v] : row)
        if (rng() % 2) partial[k] = v;
      Tristate p = evaluate(c, ConfigurationAssignment{partial, false}, options);
      if (p == Tristate::unknown) continue;
      ASSERT_EQ(evaluate(c, ConfigurationAssignment{row, false}, options), p) << c.key();
    }
  }
}

TEST(Property, CommutativeAssociativeNormalization) {
  Rng rng(99);
  for (int round = 0; round < 500; ++round) {
    Condition a = gen::random_condition(rng, 6, 2);
    Condition b = gen::random_condition(rng, 6, 2);
    Condition c = gen::random_condition(rng, 6, 2);
    EXPECT_EQ(conj(a, b), conj(b, a));
    EXPECT_EQ(disj(a, b), disj(b, a));
    EXPECT_EQ(conj(conj(a, b), c), conj(a, conj(b, c)));
    EXPECT_EQ(disj(disj(a, b), c), disj(a, disj(b, c)));
  }
}

TEST(Parse, RejectsGarbage) {
  for (const char* bad : {"", "(A &&", "A B", "OPAQUE#", "!(", "X==v", "(A && B || C)"}) {
    try {
      parse_condition(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), "MalformedCondition") << bad;
    }
  }
}
