#include <gtest/gtest.h>

#include <set>

#include "cmexpose/bdg.hpp"
#include "cmexpose/condition_analysis.hpp"
#include "cmexpose/evaluator.hpp"
#include "generators.hpp"

using namespace cmexpose;
namespace gen = cmexpose::testing;

namespace {

Condition T(const std::string& name) { return Condition::from_atom(Atom::truthy(name)); }

ParsedProject project_of(const std::string& root_listfile,
                         std::map<std::string, std::string> extra = {}) {
  extra["CMakeLists.txt"] = root_listfile;
  return load_project_from_memory("/p", extra);
}

EvaluationResult run(const std::string& text, const ConfigurationAssignment& overrides = {},
                     const EvaluatorOptions& options = {}) {
  return evaluate_project(project_of(text), overrides, options);
}

template <typename E>
std::vector<E> events(const EvaluationResult& r) {
  std::vector<E> out;
  for (const auto& e : r.trace.events)
    if (const auto* x = std::get_if<E>(&e)) out.push_back(*x);
  return out;
}

bool has_warning(const WarningList& warnings, const std::string& code) {
  for (const auto& w : warnings)
    if (w.code == code) return true;
  return false;
}

// (guard key, values) pairs of a root variable, order-independent.
std::set<std::pair<std::string, std::vector<std::string>>> alternatives(const EvaluationResult& r,
                                                                       const std::string& name) {
  auto it = r.root_variables.find(name);
  if (it == r.root_variables.end()) return {};
  auto flat = flatten(name, it->second, r.env.options());
  EXPECT_TRUE(flat);
  std::set<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& alt : flat->alternatives)
    if (alt.defined) out.insert({simplify(alt.guard).key(), alt.values});
  return out;
}

ConfigurationAssignment total(std::map<std::string, std::string> values) {
  return ConfigurationAssignment{std::move(values), true};
}

}  // namespace

TEST(Evaluator, ConditionalDeclaration) {
  const char* text = "option(F \"\" OFF)\nif(F)\n  add_executable(x a.c)\nendif()\n";
  auto symbolic = run(text);
  auto decls = events<DeclareDeliverable>(symbolic);
  ASSERT_EQ(decls.size(), 1u);
  EXPECT_EQ(decls[0].name, "x");
  EXPECT_EQ(decls[0].guard, T("F"));
  EXPECT_EQ(decls[0].kind, DeliverableKind::executable);

  // Concrete runs under both values agree with the guard.
  auto on = run(text, total({{"F", "ON"}}));
  ASSERT_EQ(events<DeclareDeliverable>(on).size(), 1u);
  EXPECT_TRUE(events<DeclareDeliverable>(on)[0].guard.is_true());
  EXPECT_TRUE(events<DeclareDeliverable>(run(text, total({{"F", "OFF"}}))).empty());
  EXPECT_TRUE(events<DeclareDeliverable>(run(text, total({}))).empty());
}

TEST(Evaluator, UnconditionalSources) {
  auto r = run("set(S a.c)\nadd_executable(x ${S})\n");
  auto attach = events<AttachSources>(r);
  ASSERT_EQ(attach.size(), 1u);
  EXPECT_EQ(attach[0].target, "x");
  EXPECT_TRUE(attach[0].guard.is_true());
  EXPECT_EQ(attach[0].source_paths, std::vector<std::string>{"a.c"});
}

TEST(Evaluator, Fig1Trace) {
  auto project = load_project(std::string(CMEXPOSE_FIXTURES) + "/fig1");
  auto r = evaluate_project(project);
  auto attach = events<AttachSources>(r);
  std::map<std::string, std::string> guard_of;
  for (const auto& a : attach)
    for (const auto& p : a.source_paths) guard_of[p] = a.guard.key();
  EXPECT_EQ(guard_of["src/client/cl_main.c"], "TRUE");
  EXPECT_EQ(guard_of["src/client/cl_input.c"], "TRUE");
  EXPECT_EQ(guard_of["src/client/cl_parse.c"], "TRUE");
  EXPECT_EQ(guard_of["src/qcommon/dl_main_curl.c"], "FEATURE_CURL");
  EXPECT_EQ(guard_of.size(), 4u);
  EXPECT_EQ(r.env.options().at("FEATURE_CURL").default_value, "ON");
}

TEST(Expand, Examples) {
  SymbolicEnv env;
  env.options()["F"] = ConfigOption{"F", {}, "OFF", OptionOrigin::option_command};
  env.bind("S", VariableValue::of({"a.c", "b.c"}));
  WarningList warnings;
  auto plain = expand({ArgumentKind::unquoted, "${S}", {}}, env, Condition::truth(), warnings);
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_TRUE(plain[0].guard.is_true());
  EXPECT_EQ(plain[0].strings, (std::vector<std::string>{"a.c", "b.c"}));

  VariableValue curl;
  curl.defined = Condition::truth();
  curl.items.push_back({T("F"), "curl.c"});
  env.bind("C", curl);
  auto branches = expand({ArgumentKind::unquoted, "${C}", {}}, env, Condition::truth(), warnings);
  std::map<std::string, std::vector<std::string>> by_guard;
  for (const auto& b : branches) by_guard[b.guard.key()] = b.strings;
  EXPECT_EQ(by_guard, (std::map<std::string, std::vector<std::string>>{
                          {"F", {"curl.c"}}, {"!F", {}}}));

  // The path condition is conjoined; a contradicting branch disappears.
  auto under = expand({ArgumentKind::unquoted, "${C}", {}}, env, T("F"), warnings);
  ASSERT_EQ(under.size(), 1u);
  EXPECT_EQ(under[0].strings, std::vector<std::string>{"curl.c"});
  EXPECT_TRUE(warnings.empty());

  auto undefined = expand({ArgumentKind::unquoted, "pre_${U}", {}}, env, Condition::truth(), warnings);
  ASSERT_EQ(undefined.size(), 1u);
  EXPECT_TRUE(undefined[0].guard.is_true());
  EXPECT_EQ(undefined[0].strings, std::vector<std::string>{"pre_"});
  EXPECT_TRUE(has_warning(warnings, warn::kUndefinedVariable));
}

TEST(Expand, NestedReferencesAndGeneratorExpressions) {
  SymbolicEnv env;
  env.bind("WHICH", VariableValue::of({"B"}));
  env.bind("VAR_B", VariableValue::of({"inner"}));
  WarningList warnings;
  auto nested = expand({ArgumentKind::quoted, "x${VAR_${WHICH}}y", {}}, env, Condition::truth(), warnings);
  ASSERT_EQ(nested.size(), 1u);
  EXPECT_EQ(nested[0].strings, std::vector<std::string>{"xinnery"});

  auto genex = expand({ArgumentKind::unquoted, "$<TARGET_OBJECTS:x>", {}}, env, Condition::truth(), warnings);
  ASSERT_EQ(genex.size(), 1u);
  EXPECT_EQ(genex[0].strings, std::vector<std::string>{"$<TARGET_OBJECTS:x>"});
  EXPECT_TRUE(has_warning(warnings, warn::kGeneratorExpression));
}

TEST(Expand, BranchOverflow) {
  SymbolicEnv env;
  std::string arg;
  for (int i = 0; i < 7; ++i) {
    std::string o = "O" + std::to_string(i);
    env.options()[o] = ConfigOption{o, {}, "OFF", OptionOrigin::option_command};
    VariableValue v;
    v.defined = Condition::truth();
    v.items.push_back({T(o), "x"});
    env.bind("V" + std::to_string(i), v);
    arg += "${V" + std::to_string(i) + "}";
  }
  WarningList warnings;
  auto out = expand({ArgumentKind::quoted, arg, {}}, env, Condition::truth(), warnings);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].guard.is_true());
  EXPECT_EQ(out[0].strings, std::vector<std::string>{arg});
  EXPECT_TRUE(has_warning(warnings, warn::kBranchOverflow));
}

TEST(If, ElseBranches) {
  auto r = run("option(A \"\" OFF)\nif(A)\n  set(X 1)\nelse()\n  set(X 2)\nendif()\n");
  EXPECT_EQ(alternatives(r, "X"), (std::set<std::pair<std::string, std::vector<std::string>>>{
                                      {"A", {"1"}}, {"!A", {"2"}}}));
  for (const char* v : {"ON", "OFF"}) {
    auto c = run("option(A \"\" OFF)\nif(A)\n  set(X 1)\nelse()\n  set(X 2)\nendif()\n", total({{"A", v}}));
    EXPECT_EQ(alternatives(c, "X"), (std::set<std::pair<std::string, std::vector<std::string>>>{
                                        {"TRUE", {std::string(v) == "ON" ? "1" : "2"}}}));
  }
}

TEST(If, ConstantsAndDeadClauses) {
  auto r = run("option(A \"\" OFF)\nif(TRUE)\n  add_executable(t t.c)\nendif()\n"
               "if(A)\n  add_executable(one a.c)\nelseif(A)\n  add_executable(two b.c)\nendif()\n"
               "if(0)\n  add_executable(never n.c)\nendif()\n");
  auto decls = events<DeclareDeliverable>(r);
  ASSERT_EQ(decls.size(), 2u);
  EXPECT_EQ(decls[0].name, "t");
  EXPECT_TRUE(decls[0].guard.is_true());
  EXPECT_EQ(decls[1].name, "one");
}

TEST(If, PredicatesAndOpaqueAtoms) {
  auto r = run("option(A \"\" OFF)\nset(MODE fast CACHE STRING \"\")\n"
               "if(MODE STREQUAL \"fast\" AND NOT A)\n  add_executable(f f.c)\nendif()\n"
               "if(EXISTS /x OR DEFINED ENV{HOME})\n  add_executable(g g.c)\nendif()\n"
               "if(CMAKE_VERSION VERSION_LESS 3.0)\n  add_executable(h h.c)\nendif()\n");
  auto decls = events<DeclareDeliverable>(r);
  ASSERT_EQ(decls.size(), 3u);
  EXPECT_EQ(decls[0].guard.key(), "(!A && MODE==\"fast\")");
  for (std::size_t i = 1; i < 3; ++i) {
    bool opaque = false;
    for (const auto& a : decls[i].guard.atoms()) opaque = opaque || a.kind == AtomKind::opaque;
    EXPECT_TRUE(opaque) << decls[i].guard.key();
  }
  EXPECT_TRUE(has_warning(r.warnings, warn::kUnsupportedPredicate));
  EXPECT_EQ(r.env.options().at("MODE").origin, OptionOrigin::cache_override);
  EXPECT_EQ(r.env.options().at("ENV{HOME}").origin, OptionOrigin::environment);
}

TEST(Foreach, UnrollsItems) {
  auto r = run("foreach(f a.c b.c)\n  list(APPEND S ${f})\nendforeach()\nadd_executable(x ${S})\n");
  auto attach = events<AttachSources>(r);
  ASSERT_EQ(attach.size(), 1u);
  EXPECT_EQ(attach[0].source_paths, (std::vector<std::string>{"a.c", "b.c"}));
}

TEST(Foreach, ConditionalList) {
  const char* text =
      "option(F \"\" OFF)\nset(L)\nif(F)\n  set(L x.c)\nendif()\nset(OUT)\n"
      "foreach(i IN LISTS L)\n  list(APPEND OUT ${i})\nendforeach()\n";
  auto r = run(text);
  // set(OUT) with no value unsets it, so under !F nothing is defined.
  EXPECT_EQ(alternatives(r, "OUT"),
            (std::set<std::pair<std::string, std::vector<std::string>>>{{"F", {"x.c"}}}));
  EXPECT_EQ(alternatives(run(text, total({{"F", "ON"}})), "OUT"),
            (std::set<std::pair<std::string, std::vector<std::string>>>{{"TRUE", {"x.c"}}}));
}

TEST(Foreach, UnrollCap) {
  EvaluatorOptions options;
  options.limits.unroll_cap = 4;
  auto r = run("foreach(f a b c d e)\n  list(APPEND S ${f})\nendforeach()\n", {}, options);
  EXPECT_TRUE(has_warning(r.warnings, warn::kUnrollCapExceeded));
  EXPECT_EQ(r.root_variables.count("S"), 0u);
}

TEST(Targets, LibrariesLinksAliases) {
  auto r = run("add_library(core STATIC core.c)\nadd_library(ui ALIAS core)\n"
               "add_library(iface INTERFACE)\nadd_executable(etl main.c)\n"
               "target_link_libraries(etl PRIVATE ui m)\n");
  auto decls = events<DeclareDeliverable>(r);
  ASSERT_EQ(decls.size(), 3u);
  EXPECT_EQ(decls[0].kind, DeliverableKind::static_library);
  EXPECT_EQ(decls[1].kind, DeliverableKind::interface_library);
  auto aliases = events<DeclareAlias>(r);
  ASSERT_EQ(aliases.size(), 1u);
  EXPECT_EQ(aliases[0].target, "core");
  auto links = events<LinkDependency>(r);
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0].from_target, "etl");

  WarningList warnings;
  Bdg g = build_bdg(r.trace, r.env, "/p", warnings);
  ASSERT_NE(g.find("m"), nullptr);
  EXPECT_EQ(g.find("m")->kind, NodeKind::external_library);
  bool linked_core = false;
  for (const auto& e : g.edges)
    linked_core = linked_core || (e.from == "etl" && e.to == "core" && e.kind == EdgeKind::links);
  EXPECT_TRUE(linked_core);
}

TEST(Functions, ParametersScopesAndMacros) {
  auto r = run(
      "function(add_srcs tgt)\n  target_sources(${tgt} PRIVATE ${ARGN})\n"
      "  set(LEAK 1)\n  set(UP 2 PARENT_SCOPE)\nendfunction()\n"
      "macro(m var)\n  set(${var} from_macro)\nendmacro()\n"
      "add_executable(x main.c)\nadd_srcs(x extra.c more.c)\nm(MV)\n");
  auto attach = events<AttachSources>(r);
  ASSERT_EQ(attach.size(), 2u);
  EXPECT_EQ(attach[1].source_paths, (std::vector<std::string>{"extra.c", "more.c"}));
  EXPECT_EQ(r.root_variables.count("LEAK"), 0u);
  EXPECT_EQ(alternatives(r, "UP"),
            (std::set<std::pair<std::string, std::vector<std::string>>>{{"TRUE", {"2"}}}));
  EXPECT_EQ(alternatives(r, "MV"),
            (std::set<std::pair<std::string, std::vector<std::string>>>{{"TRUE", {"from_macro"}}}));
}

TEST(Functions, RecursionHitsDepthCap) {
  auto r = run("function(f)\n  f()\nendfunction()\nf()\n");
  EXPECT_TRUE(has_warning(r.warnings, warn::kCallDepthExceeded));
}

TEST(Commands, UnsupportedWarnsWithSpan) {
  auto r = run("project(p)\ninstall(TARGETS x)\n");
  bool found = false;
  for (const auto& w : r.warnings) {
    if (w.code != warn::kUnsupportedCommand) continue;
    found = true;
    ASSERT_TRUE(w.span);
    EXPECT_EQ(w.span->line, 2u);
  }
  EXPECT_TRUE(found);
}

TEST(Commands, SubdirectoryPathsAndScopes) {
  auto project = project_of("set(TOP t.c)\nadd_subdirectory(lib)\nadd_executable(app ${TOP} ${SUB})\n",
                            {{"lib/CMakeLists.txt", "set(SUB s.c)\nadd_library(l ../shared/x.c ./y.c)\n"}});
  auto r = evaluate_project(project);
  auto attach = events<AttachSources>(r);
  ASSERT_EQ(attach.size(), 2u);
  EXPECT_EQ(attach[0].source_paths, (std::vector<std::string>{"shared/x.c", "lib/y.c"}));
  // SUB was set in the child scope only.
  EXPECT_EQ(attach[1].source_paths, std::vector<std::string>{"t.c"});
}

TEST(Evaluator, FatalErrorRemovesDeliverables) {
  auto r = run("option(A \"\" OFF)\noption(B \"\" OFF)\nadd_executable(x x.c)\n"
               "if(A AND B)\n  message(FATAL_ERROR \"no\")\nendif()\n"
               "if(EXISTS /nope)\n  message(FATAL_ERROR \"probe\")\nendif()\n");
  auto decls = events<DeclareDeliverable>(r);
  ASSERT_EQ(decls.size(), 1u);
  const auto& options = r.env.options();
  for (const char* a : {"ON", "OFF"})
    for (const char* b : {"ON", "OFF"}) {
      bool fires = std::string(a) == "ON" && std::string(b) == "ON";
      EXPECT_EQ(evaluate(decls[0].guard, total({{"A", a}, {"B", b}}), options),
                fires ? Tristate::no : Tristate::yes);
    }
  EXPECT_TRUE(has_warning(r.warnings, warn::kIgnoredFatalError));
}

TEST(Evaluator, Deterministic) {
  gen::Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    auto p = gen::generate_project(rng);
    auto a = evaluate_project(load_project_from_memory("/g", p.files));
    auto b = evaluate_project(load_project_from_memory("/g", p.files));
    WarningList wa, wb;
    EXPECT_EQ(save_bdg_string(build_bdg(a.trace, a.env, "/g", wa)),
              save_bdg_string(build_bdg(b.trace, b.env, "/g", wb)));
    EXPECT_EQ(a.warnings, b.warnings);
  }
}

// After every top-level command the flattened alternatives of every visible
// variable are pairwise exclusive and cover every configuration.
TEST(Property, FlattenPartition) {
  gen::Rng rng(8);
  for (int round = 0; round < 30; ++round) {
    auto p = gen::generate_project(rng, 5, 30);
    auto project = load_project_from_memory("/g", p.files);
    std::size_t checks = 0;
    EvaluatorOptions options;
    options.after_top_level_command = [&](const SymbolicEnv& env) {
      std::vector<std::string> names;
      for (const auto& [name, opt] : env.options())
        if (opt.domain.kind == DomainKind::boolean) names.push_back(name);
      auto rows = gen::all_valuations(names, env.options());
      for (const auto& [name, value] : env.visible()) {
        auto flat = flatten(name, value, env.options());
        if (!flat) continue;
        ++checks;
        for (const auto& row : rows) {
          ConfigurationAssignment a{row, false};
          int holding = 0;
          for (const auto& alt : flat->alternatives) {
            Tristate t = evaluate(alt.guard, a, env.options());
            ASSERT_NE(t, Tristate::unknown) << name << " " << alt.guard.key();
            holding += t == Tristate::yes;
          }
          ASSERT_EQ(holding, 1) << name;
        }
      }
    };
    evaluate_project(project, {}, options);
    EXPECT_GT(checks, 0u);
  }
}

// Symbolic edges that hold under a configuration are exactly the edges a
// concrete evaluation under that configuration produces.
TEST(Property, SymbolicMatchesConcreteEvaluation) {
  gen::Rng rng(12);
  for (int round = 0; round < 15; ++round) {
    auto p = gen::generate_project(rng, 5, 30);
    auto project = load_project_from_memory("/g", p.files);
    auto sym = evaluate_project(project);
    WarningList w;
    Bdg g = build_bdg(sym.trace, sym.env, "/g", w);

    for (const auto& row : gen::all_valuations(p.option_names, sym.env.options())) {
      ConfigurationAssignment config{row, true};
      auto conc = evaluate_project(project, config);
      for (const auto& e : conc.trace.events) {
        std::visit([](const auto& ev) { EXPECT_TRUE(ev.guard.is_true()); }, e);
      }
      WarningList wc;
      Bdg h = build_bdg(conc.trace, conc.env, "/g", wc);

      std::set<std::tuple<std::string, std::string, int>> expected, actual;
      for (const auto& e : g.edges) {
        const BdgNode* from = g.find(e.from);
        if (evaluate(conj(e.guard, from->exists_guard), config, sym.env.options()) == Tristate::yes)
          expected.insert({e.from, e.to, static_cast<int>(e.kind)});
      }
      for (const auto& e : h.edges) {
        // A link to a target that is not declared in this configuration
        // turns into a plain library name; the symbolic graph keeps it as
        // the absent deliverable instead.
        const BdgNode* sym_to = g.find(e.to);
        if (h.find(e.to)->kind == NodeKind::external_library && sym_to &&
            sym_to->kind == NodeKind::deliverable)
          continue;
        actual.insert({e.from, e.to, static_cast<int>(e.kind)});
      }
      ASSERT_EQ(actual, expected) << p.files.at("CMakeLists.txt");
    }
  }
}

TEST(Property, NoUnsatisfiableGuards) {
  gen::Rng rng(21);
  for (int round = 0; round < 20; ++round) {
    auto p = gen::generate_project(rng);
    auto r = evaluate_project(load_project_from_memory("/g", p.files));
    for (const auto& e : r.trace.events) {
      std::visit(
          [&](const auto& ev) {
            EXPECT_NE(satisfiable(ev.guard, r.env.options()), Tristate::no) << ev.guard.key();
          },
          e);
    }
  }
}
