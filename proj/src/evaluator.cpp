#include "cmexpose/evaluator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <cctype>
#include <set>
#include <tuple>

#include "cmexpose/condition_analysis.hpp"
#include "cmexpose/lexer.hpp"
#include "cmexpose/parser.hpp"
#include "cmexpose/paths.hpp"
#include "evaluator_internal.hpp"

namespace cmexpose {

std::string to_string(DeliverableKind kind) {
  switch (kind) {
    case DeliverableKind::executable: return "executable";
    case DeliverableKind::static_library: return "library(static)";
    case DeliverableKind::shared_library: return "library(shared)";
    case DeliverableKind::module_library: return "library(module)";
    case DeliverableKind::object_library: return "library(object)";
    case DeliverableKind::interface_library: return "library(interface)";
    case DeliverableKind::default_library: return "library(default)";
  }
  return "executable";
}

std::optional<DeliverableKind> parse_deliverable_kind(std::string_view text) {
  for (auto k : {DeliverableKind::executable, DeliverableKind::static_library,
                 DeliverableKind::shared_library, DeliverableKind::module_library,
                 DeliverableKind::object_library, DeliverableKind::interface_library,
                 DeliverableKind::default_library}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

using detail::Expander;
using detail::LookupMode;

const std::set<std::string, std::less<>>& platform_flags() {
  static const std::set<std::string, std::less<>> s{
      "ANDROID",          "APPLE",           "BORLAND",           "BSD",
      "BUILD_SHARED_LIBS", "CMAKE_COMPILER_IS_GNUCC", "CMAKE_COMPILER_IS_GNUCXX",
      "CMAKE_CROSSCOMPILING", "CMAKE_HOST_APPLE", "CMAKE_HOST_BSD", "CMAKE_HOST_LINUX",
      "CMAKE_HOST_UNIX",  "CMAKE_HOST_WIN32", "CYGWIN",            "EMSCRIPTEN",
      "IOS",              "LINUX",           "MINGW",             "MSVC",
      "MSVC_IDE",         "MSYS",            "UNIX",              "WATCOM",
      "WIN32",            "XCODE"};
  return s;
}

const std::set<std::string, std::less<>>& platform_strings() {
  static const std::set<std::string, std::less<>> s{
      "CMAKE_BUILD_TYPE",
      "CMAKE_C_COMPILER",
      "CMAKE_C_COMPILER_FRONTEND_VARIANT",
      "CMAKE_C_COMPILER_ID",
      "CMAKE_C_COMPILER_VERSION",
      "CMAKE_CONFIGURATION_TYPES",
      "CMAKE_CXX_COMPILER",
      "CMAKE_CXX_COMPILER_FRONTEND_VARIANT",
      "CMAKE_CXX_COMPILER_ID",
      "CMAKE_CXX_COMPILER_VERSION",
      "CMAKE_GENERATOR",
      "CMAKE_GENERATOR_PLATFORM",
      "CMAKE_HOST_SYSTEM_NAME",
      "CMAKE_HOST_SYSTEM_PROCESSOR",
      "CMAKE_INSTALL_PREFIX",
      "CMAKE_OSX_ARCHITECTURES",
      "CMAKE_SIZEOF_VOID_P",
      "CMAKE_SYSTEM_NAME",
      "CMAKE_SYSTEM_PROCESSOR",
      "CMAKE_SYSTEM_VERSION",
      "CMAKE_VERSION",
      "CMAKE_VS_PLATFORM_NAME",
      "MSVC_VERSION"};
  return s;
}

/// Commands with no bearing on targets, sources or variables.
const std::set<std::string, std::less<>>& silent_commands() {
  static const std::set<std::string, std::less<>> s{
      "cmake_minimum_required", "cmake_policy", "enable_language", "enable_testing",
      "mark_as_advanced"};
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool is_true_guard_of(const Condition& guard, const Condition& pc) { return guard == pc; }

struct ControlFrame {
  enum class Kind { file, function, loop, iteration };
  Kind kind;
  Condition exited = Condition::falsity();
};

struct DirContext {
  std::string source_dir;
  std::string binary_dir;
};

struct ParsedArgs {
  std::map<std::string, std::vector<GuardedItem>> values;  // keyword -> items
  std::set<std::string> present;
  std::vector<GuardedItem> unparsed;
};

class Interpreter final : public detail::ConditionHost {
 public:
  Interpreter(const ParsedProject& project, const ConfigurationAssignment& overrides,
              const EvaluatorOptions& options)
      : project_(project),
        overrides_(overrides),
        options_(options),
        limits_(options.limits),
        solver_(env_.options(), limits_.atom_cap),
        expander_([this](const std::string& n, LookupMode m) { return lookup(n, m); }, solver_,
                  env_.options(), warnings_, limits_) {}

  EvaluationResult run();

  Expander& expander() override { return expander_; }
  const VariableValue* lookup(const std::string& name, LookupMode mode) override;
  Atom opaque_atom(const std::string& text, const SourceSpan& span) override {
    return env_.opaque().intern(current_file(), text, span);
  }

 private:
  // Execution
  void exec_list(const AstNodeList& nodes, const Condition& pc);
  void exec_node(const AstNode& node, const Condition& pc);
  void exec_if(const IfBlock& block, const Condition& pc);
  void exec_foreach(const ForeachBlock& block, const Condition& pc);
  void exec_command(const CommandInvocation& cmd, const Condition& pc);
  Condition live(const Condition& pc) const;

  // Commands
  void cmd_set(const CommandInvocation& cmd, const Condition& pc);
  void cmd_unset(const CommandInvocation& cmd, const Condition& pc);
  void cmd_option(const CommandInvocation& cmd, const Condition& pc);
  void cmd_dependent_option(const CommandInvocation& cmd, const Condition& pc);
  void cmd_list(const CommandInvocation& cmd, const Condition& pc);
  void cmd_include(const CommandInvocation& cmd, const Condition& pc);
  void cmd_add_subdirectory(const CommandInvocation& cmd, const Condition& pc);
  void cmd_add_target(const CommandInvocation& cmd, const Condition& pc, bool executable);
  void cmd_target_sources(const CommandInvocation& cmd, const Condition& pc);
  void cmd_target_link_libraries(const CommandInvocation& cmd, const Condition& pc);
  void cmd_project(const CommandInvocation& cmd, const Condition& pc);
  void cmd_parse_arguments(const CommandInvocation& cmd, const Condition& pc);
  void cmd_set_property(const CommandInvocation& cmd, const Condition& pc);
  void call_function(const FunctionDef& def, const CommandInvocation& cmd, const Condition& pc);
  void call_macro(const FunctionDef& def, const CommandInvocation& cmd, const Condition& pc);

  // Variables
  VariableValue assigned(const VariableValue* old, std::vector<GuardedItem> fresh,
                         const Condition& pc);
  VariableValue unset_under(const VariableValue* old, const Condition& pc);
  void set_normal(const std::string& name, std::vector<GuardedItem> fresh, const Condition& pc);
  void set_plain(const std::string& name, const std::vector<std::string>& values);
  ConfigOption& register_option(ConfigOption option);
  VariableValue option_value(const ConfigOption& option) const;
  VariableValue restricted(VariableValue value, const Condition& pc);

  // Helpers
  std::vector<GuardedItem> items_of(const std::vector<Argument>& args, std::size_t from,
                                    const Condition& pc);
  std::vector<std::pair<Condition, std::string>> single_strings(const Argument& arg,
                                                                const Condition& pc,
                                                                const char* what);
  std::vector<GuardedItem> split_items(std::vector<GuardedItem> items) const;
  std::string source_path(const std::string& value, const SourceSpan& span);
  void declare(const std::string& name, DeliverableKind kind, const Condition& guard,
               const SourceSpan& span, bool imported);
  void check_target(const std::string& target, const Condition& guard, const SourceSpan& span);
  void attach(const std::string& target, const std::vector<GuardedItem>& items,
              const SourceSpan& span);
  const AstNodeList* listfile(const std::string& path);
  void run_file(const std::string& path, const AstNodeList& nodes, const Condition& pc,
                bool new_directory, const DirContext& dir);
  std::optional<ParsedArgs> parse_keywords(const std::vector<GuardedItem>& items,
                                           const Condition& pc,
                                           const std::set<std::string>& options,
                                           const std::set<std::string>& single,
                                           const std::set<std::string>& multi);
  void warn(const char* code, std::string message, const SourceSpan& span) {
    warnings_.push_back({code, std::move(message), span});
  }
  ControlFrame* nearest(std::initializer_list<ControlFrame::Kind> kinds);
  std::string current_file() const {
    return file_stack_.empty() ? std::string() : relativize(file_stack_.back(), project_.root_dir);
  }
  const DirContext& dir() const { return dir_stack_.back(); }
  bool pinned(const std::string& name) const { return overrides_.values.count(name) > 0; }

  const ParsedProject& project_;
  const ConfigurationAssignment& overrides_;
  const EvaluatorOptions& options_;
  const EvaluatorLimits& limits_;
  SymbolicEnv env_;
  detail::Solver solver_;
  WarningList warnings_;
  Expander expander_;
  DeclarationTrace trace_;

  std::map<std::string, const FunctionDef*> functions_;
  std::map<std::string, Condition> declared_;  // target -> disjunction of declaring guards
  std::map<std::string, std::optional<AstNodeList>> lazy_files_;
  std::deque<AstNodeList> owned_bodies_;
  std::map<std::string, std::size_t> entered_files_;
  std::vector<std::string> file_stack_;
  std::vector<DirContext> dir_stack_;
  std::vector<ControlFrame> frames_;
  Condition fatal_ = Condition::falsity();
  std::size_t call_depth_ = 0;
  std::size_t macro_calls_ = 0;
};

// ---------------------------------------------------------------------------
// Variables and options

VariableValue Interpreter::restricted(VariableValue value, const Condition& pc) {
  if (pc.is_true()) return value;
  VariableValue out;
  out.defined = conj(value.defined, pc);
  for (auto& item : value.items) {
    Condition g = conj(item.guard, pc);
    if (!solver_.possible(g)) continue;
    out.items.push_back({std::move(g), std::move(item.value)});
  }
  return out;
}

VariableValue Interpreter::assigned(const VariableValue* old, std::vector<GuardedItem> fresh,
                                    const Condition& pc) {
  VariableValue out;
  if (old && !pc.is_true()) {
    Condition outside = neg(pc);
    for (const auto& item : old->items) {
      Condition g = simplify(conj(item.guard, outside));
      if (!solver_.possible(g)) continue;
      out.items.push_back({std::move(g), item.value});
    }
    out.defined = simplify(disj(conj(old->defined, outside), pc));
  } else {
    out.defined = pc;
  }
  for (auto& item : fresh) out.items.push_back(std::move(item));
  return out;
}

VariableValue Interpreter::unset_under(const VariableValue* old, const Condition& pc) {
  VariableValue out;
  if (!old || pc.is_true()) return out;
  Condition outside = neg(pc);
  for (const auto& item : old->items) {
    Condition g = simplify(conj(item.guard, outside));
    if (!solver_.possible(g)) continue;
    out.items.push_back({std::move(g), item.value});
  }
  out.defined = simplify(conj(old->defined, outside));
  return out;
}

void Interpreter::set_normal(const std::string& name, std::vector<GuardedItem> fresh,
                             const Condition& pc) {
  env_.bind(name, assigned(env_.find_normal(name), std::move(fresh), pc));
}

void Interpreter::set_plain(const std::string& name, const std::vector<std::string>& values) {
  env_.bind(name, VariableValue::of(values));
}

ConfigOption& Interpreter::register_option(ConfigOption option) {
  auto [it, inserted] = env_.options().try_emplace(option.name, option);
  if (inserted) solver_.invalidate();
  return it->second;
}

VariableValue Interpreter::option_value(const ConfigOption& option) const {
  const std::string& name = option.name;
  if (auto it = overrides_.values.find(name); it != overrides_.values.end()) {
    return VariableValue::of(detail::split_list(it->second));
  }
  if (overrides_.total) {
    if (option.default_value) return VariableValue::of(detail::split_list(*option.default_value));
    return VariableValue::undefined();
  }
  VariableValue v;
  switch (option.domain.kind) {
    case DomainKind::boolean: {
      Condition on = Condition::from_atom(Atom::truthy(name));
      if (option.origin == OptionOrigin::environment) {
        v.defined = on;
        v.items.push_back({on, "ON"});
      } else {
        v.defined = Condition::truth();
        v.items.push_back({on, "ON"});
        v.items.push_back({neg(on), "OFF"});
      }
      break;
    }
    case DomainKind::enumerated: {
      v.defined = Condition::truth();
      for (const auto& value : option.domain.values) {
        if (value.empty()) continue;
        v.items.push_back({Condition::from_atom(Atom::equals(name, value)), value});
      }
      break;
    }
    case DomainKind::opaque: {
      if (option.origin == OptionOrigin::environment && !option.default_value) {
        // Unknown environment input: possibly undefined.
        Condition def = Condition::from_atom(Atom::defined(name));
        v.defined = def;
        v.items.push_back({def, symbolic_value(name)});
        break;
      }
      v.defined = Condition::truth();
      std::string d = option.default_value.value_or("");
      Condition is_default = Condition::from_atom(Atom::equals(name, d));
      if (!d.empty()) {
        for (auto& part : detail::split_list(d)) v.items.push_back({is_default, part});
      }
      v.items.push_back({neg(is_default), symbolic_value(name)});
      break;
    }
  }
  return v;
}

const VariableValue* Interpreter::lookup(const std::string& name, LookupMode mode) {
  if (name.rfind("CACHE{", 0) == 0 && name.size() > 7 && name.back() == '}') {
    return env_.find_cache(name.substr(6, name.size() - 7));
  }
  if (const auto* v = env_.find(name)) return v;

  ConfigOption option;
  option.name = name;
  option.origin = OptionOrigin::environment;
  bool is_env = name.rfind("ENV{", 0) == 0 && name.back() == '}';
  if (is_env) {
    option.domain.kind = DomainKind::opaque;
  } else if (pinned(name)) {
    option.domain.kind = DomainKind::opaque;
    option.origin = OptionOrigin::cache_override;
  } else if (platform_flags().count(name)) {
    option.domain.kind = DomainKind::boolean;
  } else if (platform_strings().count(name)) {
    option.domain.kind = DomainKind::opaque;
    option.default_value = std::string();
  } else if (mode == LookupMode::truthiness) {
    option.domain.kind = DomainKind::boolean;
  } else if (mode == LookupMode::defined) {
    option.domain.kind = DomainKind::opaque;
  } else {
    return nullptr;
  }
  const ConfigOption& registered = register_option(option);
  VariableValue value = option_value(registered);
  if (!is_env && platform_strings().count(name) && !pinned(name) && !overrides_.total) {
    // Always defined, value unknown.
    value = VariableValue::of({symbolic_value(name)});
  }
  env_.bind_cache(name, std::move(value));
  return env_.find_cache(name);
}

// ---------------------------------------------------------------------------
// Helpers

std::vector<GuardedItem> Interpreter::split_items(std::vector<GuardedItem> items) const {
  std::vector<GuardedItem> out;
  for (auto& item : items) {
    if (item.value.find(';') == std::string::npos) {
      if (!item.value.empty()) out.push_back(std::move(item));
      continue;
    }
    for (auto& part : detail::split_list(item.value)) out.push_back({item.guard, std::move(part)});
  }
  return out;
}

std::vector<GuardedItem> Interpreter::items_of(const std::vector<Argument>& args, std::size_t from,
                                               const Condition& pc) {
  std::vector<GuardedItem> out;
  for (std::size_t i = from; i < args.size(); ++i) {
    for (auto& item : expander_.expand_items(args[i], pc)) out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::pair<Condition, std::string>> Interpreter::single_strings(const Argument& arg,
                                                                           const Condition& pc,
                                                                           const char* what) {
  std::vector<std::pair<Condition, std::string>> out;
  for (auto& branch : expander_.expand(arg, pc)) {
    if (branch.strings.size() != 1) {
      if (!branch.strings.empty()) {
        warn(warn::kUnsupportedCommand,
             std::string(what) + " expands to a list, using its first element: " + arg.raw_text,
             arg.span);
      }
      if (branch.strings.empty()) continue;
    }
    out.emplace_back(branch.guard, branch.strings.front());
  }
  return out;
}

ControlFrame* Interpreter::nearest(std::initializer_list<ControlFrame::Kind> kinds) {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if (std::find(kinds.begin(), kinds.end(), it->kind) != kinds.end()) return &*it;
  }
  return nullptr;
}

bool mentions_opaque(const Condition& c) {
  if (c.kind() == Condition::Kind::atom) return c.atom().kind == AtomKind::opaque;
  if (c.is_constant()) return false;
  for (const auto& child : c.children()) {
    if (mentions_opaque(child)) return true;
  }
  return false;
}

// exited | (p & !exited) == exited | p. Keeping the redundant conjunct would
// double the condition with every exit.
Condition with_exit(const Condition& exited, const Condition& pc) {
  if (exited.is_false() || pc.kind() != Condition::Kind::conjunction) {
    return simplify(disj(exited, pc));
  }
  const std::string dropped = neg(exited).key();
  std::vector<Condition> kept;
  for (const auto& c : pc.children()) {
    if (c.key() != dropped) kept.push_back(c);
  }
  return simplify(disj(exited, conj_all(kept)));
}

Condition Interpreter::live(const Condition& pc) const {
  // A fatal error fails the whole configuration, so it is applied to the
  // declarations once at the end rather than to every guard on the way.
  Condition out = pc;
  for (const auto& f : frames_) {
    if (!f.exited.is_false()) out = conj(out, neg(f.exited));
  }
  return out;
}

std::string Interpreter::source_path(const std::string& value, const SourceSpan& span) {
  if (value.find("$<") != std::string::npos) return value;
  std::string shown = value;
  if (contains_symbolic(value)) {
    shown = render_symbolic(value);
    warn(warn::kSymbolicPath, "path depends on an unknown configuration value: " + shown, span);
  }
  return relativize(join_path(dir().source_dir, shown), project_.root_dir);
}

void Interpreter::declare(const std::string& name, DeliverableKind kind, const Condition& guard,
                          const SourceSpan& span, bool imported) {
  auto it = declared_.find(name);
  if (it != declared_.end()) {
    if (solver_.possible(conj(it->second, guard))) {
      warn(warn::kDuplicateTarget, "target '" + name + "' may be declared twice", span);
    }
    it->second = simplify(disj(it->second, guard));
  } else {
    declared_.emplace(name, guard);
  }
  trace_.events.push_back(DeclareDeliverable{name, kind, guard, span, imported});
}

void Interpreter::check_target(const std::string& target, const Condition& guard,
                               const SourceSpan& span) {
  auto it = declared_.find(target);
  if (it == declared_.end()) return;  // reported when the graph is built
  if (!solver_.possible(conj(it->second, guard))) {
    warn(warn::kTargetNotPresent,
         "target '" + target + "' does not exist under the guard of this command", span);
  }
}

void Interpreter::attach(const std::string& target, const std::vector<GuardedItem>& items,
                         const SourceSpan& span) {
  std::vector<AttachSources> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& item : items) {
    if (item.value.empty()) continue;
    auto [it, inserted] = index.try_emplace(item.guard.key(), groups.size());
    if (inserted) groups.push_back(AttachSources{target, item.guard, {}, span});
    groups[it->second].source_paths.push_back(source_path(item.value, span));
  }
  for (auto& g : groups) {
    check_target(target, g.guard, span);
    trace_.events.push_back(std::move(g));
  }
}

const AstNodeList* Interpreter::listfile(const std::string& path) {
  if (const auto* nodes = project_.find(path)) return nodes;
  auto it = lazy_files_.find(path);
  if (it == lazy_files_.end()) {
    std::optional<AstNodeList> parsed;
    if (project_.source) {
      if (auto text = project_.source->read(path)) {
        try {
          parsed = parse_text(std::move(*text), path, warnings_);
        } catch (const ParseError& e) {
          warn(warn::kParseError, e.what(), e.span().value_or(SourceSpan{path, 1, 1}));
          parsed = AstNodeList{};
        }
      }
    }
    it = lazy_files_.emplace(path, std::move(parsed)).first;
  }
  return it->second ? &*it->second : nullptr;
}

void Interpreter::run_file(const std::string& path, const AstNodeList& nodes, const Condition& pc,
                           bool new_directory, const DirContext& context) {
  std::string list_dir = parent_path(path);
  if (new_directory) {
    env_.push_scope();
    dir_stack_.push_back(context);
    set_plain("CMAKE_CURRENT_SOURCE_DIR", {context.source_dir});
    set_plain("CMAKE_CURRENT_BINARY_DIR", {context.binary_dir});
    set_plain("CMAKE_CURRENT_LIST_DIR", {list_dir});
    set_plain("CMAKE_CURRENT_LIST_FILE", {path});
  }
  std::optional<VariableValue> saved_dir;
  std::optional<VariableValue> saved_file;
  if (!new_directory) {
    if (const auto* v = env_.find_normal("CMAKE_CURRENT_LIST_DIR")) saved_dir = *v;
    if (const auto* v = env_.find_normal("CMAKE_CURRENT_LIST_FILE")) saved_file = *v;
    set_plain("CMAKE_CURRENT_LIST_DIR", {list_dir});
    set_plain("CMAKE_CURRENT_LIST_FILE", {path});
  }
  ++entered_files_[path];
  file_stack_.push_back(path);
  frames_.push_back({ControlFrame::Kind::file});
  exec_list(nodes, pc);
  frames_.pop_back();
  file_stack_.pop_back();
  if (new_directory) {
    dir_stack_.pop_back();
    env_.pop_scope();
  } else {
    env_.bind("CMAKE_CURRENT_LIST_DIR", saved_dir.value_or(VariableValue::undefined()));
    env_.bind("CMAKE_CURRENT_LIST_FILE", saved_file.value_or(VariableValue::undefined()));
  }
}

// ---------------------------------------------------------------------------
// Execution

void Interpreter::exec_list(const AstNodeList& nodes, const Condition& pc) {
  for (const auto& node : nodes) {
    Condition now = live(pc);
    if (!solver_.possible(now)) return;
    exec_node(node, now);
  }
}

void Interpreter::exec_node(const AstNode& node, const Condition& pc) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CommandInvocation>) {
          exec_command(n, pc);
        } else if constexpr (std::is_same_v<T, IfBlock>) {
          exec_if(n, pc);
        } else if constexpr (std::is_same_v<T, ForeachBlock>) {
          exec_foreach(n, pc);
        } else if constexpr (std::is_same_v<T, WhileBlock>) {
          warn(warn::kUnsupportedCommand, "while() loop is not evaluated", n.span);
        } else if constexpr (std::is_same_v<T, FunctionDef>) {
          functions_[n.name] = &n;
        }
      },
      node.node);
}

void Interpreter::exec_if(const IfBlock& block, const Condition& pc) {
  Condition remaining = pc;
  for (const auto& clause : block.clauses) {
    Condition c = detail::interpret_condition(clause.condition, clause.span, remaining, *this);
    Condition taken = simplify(conj(remaining, c));
    if (solver_.possible(taken)) exec_list(clause.body, taken);
    remaining = simplify(conj(remaining, neg(c)));
    if (!solver_.possible(remaining)) return;
  }
  if (block.has_else) exec_list(block.else_body, remaining);
}

void Interpreter::exec_foreach(const ForeachBlock& block, const Condition& pc) {
  const auto& args = block.header_args;
  if (args.empty()) return;
  std::string var = args[0].raw_text;

  std::vector<GuardedItem> items;
  std::size_t i = 1;
  if (i < args.size() && args[i].kind == ArgumentKind::unquoted && args[i].raw_text == "RANGE") {
    auto bounds = items_of(args, 2, pc);
    std::vector<long long> nums;
    for (const auto& b : bounds) {
      if (b.guard != pc) {
        warn(warn::kUnsupportedCommand, "foreach(RANGE) with conditional bounds", block.span);
        return;
      }
      try {
        nums.push_back(std::stoll(b.value));
      } catch (const std::exception&) {
        warn(warn::kUnsupportedCommand, "foreach(RANGE) with non-numeric bound", block.span);
        return;
      }
    }
    long long start = 0, stop = 0, step = 1;
    if (nums.size() == 1) {
      stop = nums[0];
    } else if (nums.size() >= 2) {
      start = nums[0];
      stop = nums[1];
      if (nums.size() >= 3) step = nums[2];
    } else {
      return;
    }
    if (step <= 0 || stop < start ||
        static_cast<unsigned long long>((stop - start) / step) >= limits_.unroll_cap) {
      warn(warn::kUnrollCapExceeded, "foreach(RANGE) exceeds the unroll cap or is invalid",
           block.span);
      return;
    }
    for (long long n = start; n <= stop; n += step) items.push_back({pc, std::to_string(n)});
  } else if (i < args.size() && args[i].kind == ArgumentKind::unquoted &&
             args[i].raw_text == "IN") {
    std::string mode;
    for (i = 2; i < args.size(); ++i) {
      const auto& a = args[i];
      if (a.kind == ArgumentKind::unquoted &&
          (a.raw_text == "LISTS" || a.raw_text == "ITEMS" || a.raw_text == "ZIP_LISTS")) {
        mode = a.raw_text;
        if (mode == "ZIP_LISTS") {
          warn(warn::kUnsupportedCommand, "foreach(IN ZIP_LISTS) is not evaluated", block.span);
          return;
        }
        continue;
      }
      if (mode == "ITEMS") {
        for (auto& item : expander_.expand_items(a, pc)) items.push_back(std::move(item));
      } else if (mode == "LISTS") {
        for (auto& [g, name] : single_strings(a, pc, "foreach list name")) {
          const VariableValue* v = lookup(name, LookupMode::value);
          if (!v) continue;
          for (const auto& item : v->items) {
            if (item.value.empty()) continue;
            Condition ig = conj(g, item.guard);
            if (!item.guard.is_true() && !solver_.possible(ig)) continue;
            items.push_back({ig, item.value});
          }
        }
      }
    }
  } else {
    items = items_of(args, 1, pc);
  }
  items = split_items(std::move(items));
  if (items.size() > limits_.unroll_cap) {
    warn(warn::kUnrollCapExceeded,
         "foreach() over " + std::to_string(items.size()) + " items exceeds the unroll cap",
         block.span);
    return;
  }

  std::optional<VariableValue> saved;
  if (const auto* v = env_.find_normal(var)) saved = *v;
  frames_.push_back({ControlFrame::Kind::loop});
  for (const auto& item : items) {
    Condition now = live(item.guard);
    if (!solver_.possible(now)) continue;
    set_plain(var, {item.value});
    frames_.push_back({ControlFrame::Kind::iteration});
    exec_list(block.body, now);
    frames_.pop_back();
  }
  frames_.pop_back();
  env_.bind(var, saved.value_or(VariableValue::undefined()));
}

void Interpreter::exec_command(const CommandInvocation& cmd, const Condition& pc) {
  const std::string& name = cmd.name;
  if (auto it = functions_.find(name); it != functions_.end()) {
    if (call_depth_ >= limits_.call_depth_cap) {
      warn(warn::kCallDepthExceeded, "call depth cap reached at " + name + "()", cmd.span);
      return;
    }
    ++call_depth_;
    if (it->second->is_macro) {
      call_macro(*it->second, cmd, pc);
    } else {
      call_function(*it->second, cmd, pc);
    }
    --call_depth_;
    return;
  }
  if (name == "set") return cmd_set(cmd, pc);
  if (name == "unset") return cmd_unset(cmd, pc);
  if (name == "option") return cmd_option(cmd, pc);
  if (name == "cmake_dependent_option") return cmd_dependent_option(cmd, pc);
  if (name == "list") return cmd_list(cmd, pc);
  if (name == "include") return cmd_include(cmd, pc);
  if (name == "add_subdirectory") return cmd_add_subdirectory(cmd, pc);
  if (name == "add_executable") return cmd_add_target(cmd, pc, true);
  if (name == "add_library") return cmd_add_target(cmd, pc, false);
  if (name == "target_sources") return cmd_target_sources(cmd, pc);
  if (name == "target_link_libraries") return cmd_target_link_libraries(cmd, pc);
  if (name == "project") return cmd_project(cmd, pc);
  if (name == "cmake_parse_arguments") return cmd_parse_arguments(cmd, pc);
  if (name == "set_property") return cmd_set_property(cmd, pc);
  if (name == "return") {
    if (auto* f = nearest({ControlFrame::Kind::function, ControlFrame::Kind::file})) {
      f->exited = with_exit(f->exited, pc);
    }
    return;
  }
  if (name == "break" || name == "continue") {
    auto kind = name == "break" ? ControlFrame::Kind::loop : ControlFrame::Kind::iteration;
    if (auto* f = nearest({kind})) f->exited = with_exit(f->exited, pc);
    return;
  }
  if (name == "message") {
    if (!cmd.args.empty() && cmd.args[0].kind == ArgumentKind::unquoted &&
        cmd.args[0].raw_text == "FATAL_ERROR") {
      // Failures that hinge on unmodelled probes (find_package results,
      // EXISTS, TARGET, ...) are assumed not to fire; otherwise every
      // deliverable would inherit an unknown.
      if (mentions_opaque(pc)) {
        warn(warn::kIgnoredFatalError,
             "FATAL_ERROR under an unmodelled condition is assumed not to fire", cmd.span);
      } else {
        fatal_ = with_exit(fatal_, pc);
      }
    }
    return;
  }
  if (name == "include_guard") {
    if (!file_stack_.empty() && entered_files_[file_stack_.back()] > 1) {
      if (auto* f = nearest({ControlFrame::Kind::file})) f->exited = with_exit(f->exited, pc);
    }
    return;
  }
  if (silent_commands().count(name)) return;
  warn(warn::kUnsupportedCommand, name + "() is not evaluated", cmd.span);
}

// ---------------------------------------------------------------------------
// Variable commands

void Interpreter::cmd_set(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "variable name")) {
    auto items = split_items(items_of(cmd.args, 1, guard));
    // Keywords are recognized by value, as CMake does after expansion.
    // A quoted argument defines the variable even when it is empty.
    bool quoted_value = std::any_of(cmd.args.begin() + 1, cmd.args.end(), [](const Argument& a) {
      return a.kind != ArgumentKind::unquoted;
    });
    std::size_t cache_at = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].value == "CACHE") {
        cache_at = i;
        break;
      }
    }
    if (cache_at == items.size()) {
      if (!items.empty() && items.back().value == "PARENT_SCOPE") {
        items.pop_back();
        const VariableValue* old = env_.find_parent(name);
        VariableValue v = items.empty() && !quoted_value ? unset_under(old, guard)
                                                         : assigned(old, items, guard);
        env_.bind_parent(name, std::move(v));
        continue;
      }
      if (items.empty() && !quoted_value) {
        env_.bind(name, unset_under(env_.find_normal(name), guard));
      } else {
        set_normal(name, std::move(items), guard);
      }
      continue;
    }

    std::vector<GuardedItem> values(items.begin(), items.begin() + cache_at);
    std::string type = cache_at + 1 < items.size() ? items[cache_at + 1].value : "STRING";
    bool force = type == "INTERNAL";
    for (std::size_t i = cache_at + 1; i < items.size(); ++i) {
      force = force || items[i].value == "FORCE";
    }

    const VariableValue* existing = env_.find_cache(name);
    if (existing && !force) continue;
    if (type != "INTERNAL") {
      ConfigOption option;
      option.name = name;
      option.origin = OptionOrigin::cache_override;
      std::vector<std::string> defaults;
      bool conditional = false;
      for (const auto& v : values) {
        defaults.push_back(v.value);
        conditional = conditional || v.guard != guard;
      }
      if (type == "BOOL") {
        option.domain.kind = DomainKind::boolean;
        if (!conditional) {
          option.default_value = cmake_truthy(detail::join_list(defaults)) ? "ON" : "OFF";
        }
      } else {
        option.domain.kind = DomainKind::opaque;
        if (!conditional) option.default_value = detail::join_list(defaults);
      }
      const ConfigOption& registered = register_option(option);
      if (!existing) {
        env_.bind_cache(name, restricted(option_value(registered), guard));
        existing = env_.find_cache(name);
      }
    }
    if (!force) continue;
    env_.bind_cache(name, assigned(existing, std::move(values), guard));
  }
}

void Interpreter::cmd_unset(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  bool cache = cmd.args.size() > 1 && cmd.args[1].raw_text == "CACHE";
  bool parent = cmd.args.size() > 1 && cmd.args[1].raw_text == "PARENT_SCOPE";
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "variable name")) {
    if (cache) {
      env_.bind_cache(name, unset_under(env_.find_cache(name), guard));
    } else if (parent) {
      env_.bind_parent(name, VariableValue::undefined());
    } else {
      env_.bind(name, unset_under(env_.find_normal(name), guard));
    }
  }
}

void Interpreter::cmd_option(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "option name")) {
    if (env_.find_cache(name)) continue;
    ConfigOption option;
    option.name = name;
    option.origin = OptionOrigin::option_command;
    option.domain.kind = DomainKind::boolean;
    option.default_value = "OFF";
    if (cmd.args.size() > 2) {
      auto defaults = items_of(cmd.args, 2, guard);
      bool conditional = std::any_of(defaults.begin(), defaults.end(),
                                     [&](const GuardedItem& i) { return i.guard != guard; });
      std::vector<std::string> values;
      for (const auto& d : defaults) values.push_back(d.value);
      if (conditional) {
        option.default_value.reset();
      } else {
        option.default_value = cmake_truthy(detail::join_list(values)) ? "ON" : "OFF";
      }
    }
    const ConfigOption& registered = register_option(option);
    env_.bind_cache(name, restricted(option_value(registered), guard));
  }
}

void Interpreter::cmd_dependent_option(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.size() < 5) {
    warn(warn::kUnsupportedCommand, "cmake_dependent_option() needs five arguments", cmd.span);
    return;
  }
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "option name")) {
    if (env_.find_cache(name)) continue;
    ConfigOption option;
    option.name = name;
    option.domain.kind = DomainKind::boolean;
    auto defaults = items_of(cmd.args, 2, guard);
    std::vector<std::string> dv;
    for (const auto& d : defaults) dv.push_back(d.value);
    option.default_value = cmake_truthy(detail::join_list(dv)) ? "ON" : "OFF";
    const ConfigOption& registered = register_option(option);

    // Each `;`-separated element of the depends argument is an if() condition.
    Condition depends = Condition::truth();
    for (const auto& branch : expander_.expand(cmd.args[3], guard)) {
      std::vector<Condition> parts;
      for (const auto& text : branch.strings) {
        for (const auto& element : detail::split_list(text)) {
          std::vector<Argument> args;
          try {
            auto nodes = parse_listfile("x(" + element + ")\n", cmd.span.file_path);
            if (!nodes.empty()) {
              if (const auto* inner = std::get_if<CommandInvocation>(&nodes[0].node)) {
                args = inner->args;
              }
            }
          } catch (const Error&) {
            warn(warn::kUnsupportedPredicate, "cannot parse dependency: " + element, cmd.span);
            continue;
          }
          parts.push_back(detail::interpret_condition(args, cmd.span, branch.guard, *this));
        }
      }
      depends = conj(depends, disj(neg(branch.guard), conj_all(parts)));
    }
    depends = simplify(depends);
    Condition on = simplify(conj(guard, depends));
    Condition off = simplify(conj(guard, neg(depends)));
    VariableValue v = restricted(option_value(registered), on);
    std::vector<GuardedItem> forced;
    for (auto& f : items_of(cmd.args, 4, off)) forced.push_back(std::move(f));
    if (solver_.possible(off)) v = assigned(&v, std::move(forced), off);
    env_.bind_cache(name, std::move(v));
  }
}

void Interpreter::cmd_list(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.size() < 2) return;
  std::string sub = upper(cmd.args[0].raw_text);
  if (sub != "APPEND" && sub != "PREPEND" && sub != "REMOVE_ITEM" && sub != "REMOVE_DUPLICATES") {
    warn(warn::kUnsupportedCommand, "list(" + sub + ") is not evaluated", cmd.span);
    return;
  }
  for (const auto& [guard, name] : single_strings(cmd.args[1], pc, "variable name")) {
    const VariableValue* old = env_.find(name);
    VariableValue current = old ? *old : VariableValue::undefined();
    if (sub == "APPEND" || sub == "PREPEND") {
      auto fresh = split_items(items_of(cmd.args, 2, guard));
      if (sub == "APPEND") {
        for (auto& f : fresh) current.items.push_back(std::move(f));
      } else {
        fresh.insert(fresh.end(), current.items.begin(), current.items.end());
        current.items = std::move(fresh);
      }
      current.defined = simplify(disj(current.defined, guard));
    } else if (sub == "REMOVE_ITEM") {
      auto removed = split_items(items_of(cmd.args, 2, guard));
      std::vector<GuardedItem> kept;
      for (auto& item : current.items) {
        std::vector<Condition> hits;
        for (const auto& r : removed) {
          if (r.value == item.value) hits.push_back(r.guard);
        }
        if (!hits.empty()) item.guard = simplify(conj(item.guard, neg(disj_all(hits))));
        if (solver_.possible(item.guard)) kept.push_back(std::move(item));
      }
      current.items = std::move(kept);
    } else {
      std::map<std::string, std::vector<Condition>> seen;
      std::vector<GuardedItem> kept;
      for (auto& item : current.items) {
        auto& earlier = seen[item.value];
        Condition g = item.guard;
        if (!earlier.empty()) g = simplify(conj(g, neg(conj(guard, disj_all(earlier)))));
        earlier.push_back(item.guard);
        if (solver_.possible(g)) kept.push_back({g, item.value});
      }
      current.items = std::move(kept);
    }
    env_.bind(name, std::move(current));
  }
}

void Interpreter::cmd_set_property(const CommandInvocation& cmd, const Condition& pc) {
  // Only set_property(CACHE <var> PROPERTY STRINGS ...) affects the analysis.
  const auto& a = cmd.args;
  if (a.size() >= 4 && a[0].raw_text == "CACHE" && a[2].raw_text == "PROPERTY" &&
      a[3].raw_text == "STRINGS") {
    for (const auto& [guard, name] : single_strings(a[1], pc, "cache entry")) {
      auto it = env_.options().find(name);
      if (it == env_.options().end() || it->second.domain.kind != DomainKind::opaque) continue;
      std::vector<std::string> values;
      for (const auto& item : split_items(items_of(a, 4, guard))) {
        if (std::find(values.begin(), values.end(), item.value) == values.end()) {
          values.push_back(item.value);
        }
      }
      if (it->second.default_value && !it->second.default_value->empty() &&
          std::find(values.begin(), values.end(), *it->second.default_value) == values.end()) {
        values.push_back(*it->second.default_value);
      }
      if (values.empty()) continue;
      it->second.domain = {DomainKind::enumerated, values};
      solver_.invalidate();
      env_.bind_cache(name, option_value(it->second));
    }
    return;
  }
  warn(warn::kUnsupportedCommand, "set_property() is not evaluated", cmd.span);
}

// ---------------------------------------------------------------------------
// Files and directories

void Interpreter::cmd_include(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  bool optional = false;
  for (std::size_t i = 1; i < cmd.args.size(); ++i) {
    optional = optional || cmd.args[i].raw_text == "OPTIONAL";
  }
  for (const auto& [guard, target] : single_strings(cmd.args[0], pc, "include()")) {
    if (contains_symbolic(target)) {
      warn(warn::kUnresolvedInclude,
           "include() of a configuration-dependent path: " + render_symbolic(target), cmd.span);
      continue;
    }
    std::string path;
    bool module = target.find('/') == std::string::npos &&
                  !(target.size() > 6 && target.substr(target.size() - 6) == ".cmake");
    if (module) {
      std::vector<std::string> dirs;
      if (const VariableValue* v = env_.find("CMAKE_MODULE_PATH")) {
        for (const auto& item : v->items) {
          for (const auto& d : detail::split_list(item.value)) {
            if (std::find(dirs.begin(), dirs.end(), d) == dirs.end()) dirs.push_back(d);
          }
        }
      }
      for (const auto& d : dirs) {
        std::string candidate = join_path(join_path(dir().source_dir, d), target + ".cmake");
        if (listfile(candidate)) {
          path = candidate;
          break;
        }
      }
      if (path.empty()) {
        if (!optional) {
          warn(warn::kBuiltinModule, "module '" + target + "' treated as a CMake builtin", cmd.span);
        }
        continue;
      }
    } else {
      path = join_path(dir().source_dir, target);
    }
    const AstNodeList* nodes = listfile(path);
    if (!nodes) {
      if (!optional) warn(warn::kUnresolvedInclude, "cannot find included file " + path, cmd.span);
      continue;
    }
    if (std::find(file_stack_.begin(), file_stack_.end(), path) != file_stack_.end()) {
      warn(warn::kIncludeCycle, "include cycle through " + relativize(path, project_.root_dir),
           cmd.span);
      continue;
    }
    if (file_stack_.size() >= limits_.include_depth_cap) {
      warn(warn::kIncludeDepthExceeded, "include depth cap reached at " + path, cmd.span);
      continue;
    }
    run_file(path, *nodes, guard, false, dir());
  }
}

void Interpreter::cmd_add_subdirectory(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  std::optional<std::string> binary_arg;
  if (cmd.args.size() > 1 && cmd.args[1].raw_text != "EXCLUDE_FROM_ALL" &&
      cmd.args[1].raw_text != "SYSTEM") {
    binary_arg = cmd.args[1].raw_text;
  }
  for (const auto& [guard, sub] : single_strings(cmd.args[0], pc, "add_subdirectory()")) {
    if (contains_symbolic(sub)) {
      warn(warn::kUnresolvedInclude,
           "add_subdirectory() of a configuration-dependent path: " + render_symbolic(sub),
           cmd.span);
      continue;
    }
    std::string source_dir = join_path(dir().source_dir, sub);
    std::string path = source_dir + "/CMakeLists.txt";
    const AstNodeList* nodes = listfile(path);
    if (!nodes) {
      warn(warn::kUnresolvedInclude, "no CMakeLists.txt in " + source_dir, cmd.span);
      continue;
    }
    if (std::find(file_stack_.begin(), file_stack_.end(), path) != file_stack_.end()) {
      warn(warn::kIncludeCycle, "add_subdirectory cycle through " + sub, cmd.span);
      continue;
    }
    if (file_stack_.size() >= limits_.include_depth_cap) {
      warn(warn::kIncludeDepthExceeded, "include depth cap reached at " + path, cmd.span);
      continue;
    }
    std::string bin = binary_arg ? *binary_arg : sub;
    if (is_absolute_path(bin)) {
      std::string rel = relativize(bin, project_.root_dir);
      bin = is_absolute_path(rel) ? rel.substr(rel.find_last_of('/') + 1) : rel;
    }
    DirContext context{source_dir, join_path(dir().binary_dir, bin)};
    run_file(path, *nodes, guard, true, context);
  }
}

void Interpreter::cmd_project(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "project name")) {
    auto put = [&](const std::string& var, const std::string& value, bool cache) {
      std::vector<GuardedItem> item{{guard, value}};
      set_normal(var, item, guard);
      if (cache) env_.bind_cache(var, assigned(env_.find_cache(var), item, guard));
    };
    put("PROJECT_NAME", name, false);
    put("PROJECT_SOURCE_DIR", dir().source_dir, false);
    put("PROJECT_BINARY_DIR", dir().binary_dir, false);
    put(name + "_SOURCE_DIR", dir().source_dir, true);
    put(name + "_BINARY_DIR", dir().binary_dir, true);
    if (dir_stack_.size() == 1 && !env_.find_normal("CMAKE_PROJECT_NAME")) {
      put("CMAKE_PROJECT_NAME", name, false);
    }
    for (std::size_t i = 1; i + 1 < cmd.args.size(); ++i) {
      if (cmd.args[i].raw_text != "VERSION") continue;
      for (const auto& [vg, version] : single_strings(cmd.args[i + 1], guard, "version")) {
        std::vector<GuardedItem> item{{vg, version}};
        set_normal("PROJECT_VERSION", item, vg);
        set_normal(name + "_VERSION", item, vg);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Target commands

void Interpreter::cmd_add_target(const CommandInvocation& cmd, const Condition& pc,
                                 bool executable) {
  if (cmd.args.empty()) return;
  for (const auto& [guard, name] : single_strings(cmd.args[0], pc, "target name")) {
    auto items = split_items(items_of(cmd.args, 1, guard));
    DeliverableKind kind = executable ? DeliverableKind::executable
                                      : DeliverableKind::default_library;
    bool imported = false;
    std::size_t i = 0;
    for (; i < items.size(); ++i) {
      const std::string& v = items[i].value;
      if (v == "IMPORTED") {
        imported = true;
      } else if (v == "ALIAS") {
        if (i + 1 < items.size()) {
          trace_.events.push_back(DeclareAlias{name, items[i + 1].value, guard, cmd.span});
        }
        i = items.size() + 1;
        break;
      } else if (executable && (v == "WIN32" || v == "MACOSX_BUNDLE")) {
      } else if (v == "EXCLUDE_FROM_ALL" || v == "GLOBAL") {
      } else if (!executable && v == "STATIC") {
        kind = DeliverableKind::static_library;
      } else if (!executable && v == "SHARED") {
        kind = DeliverableKind::shared_library;
      } else if (!executable && v == "MODULE") {
        kind = DeliverableKind::module_library;
      } else if (!executable && v == "OBJECT") {
        kind = DeliverableKind::object_library;
      } else if (!executable && v == "INTERFACE") {
        kind = DeliverableKind::interface_library;
      } else if (!executable && v == "UNKNOWN") {
      } else {
        break;
      }
    }
    if (i > items.size()) continue;  // alias
    declare(name, kind, guard, cmd.span, imported);
    if (imported) continue;
    std::vector<GuardedItem> sources(items.begin() + static_cast<std::ptrdiff_t>(i), items.end());
    attach(name, sources, cmd.span);
  }
}

void Interpreter::cmd_target_sources(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  for (const auto& [guard, target] : single_strings(cmd.args[0], pc, "target name")) {
    auto items = split_items(items_of(cmd.args, 1, guard));
    std::vector<GuardedItem> sources;
    enum class State { files, fileset_name, fileset_skip, fileset_files } state = State::files;
    for (auto& item : items) {
      const std::string& v = item.value;
      if (v == "PRIVATE" || v == "PUBLIC" || v == "INTERFACE") {
        state = State::files;
        continue;
      }
      if (v == "FILE_SET") {
        state = State::fileset_name;
        continue;
      }
      if (state == State::fileset_name) {
        state = State::fileset_skip;
        continue;
      }
      if (state == State::fileset_skip || state == State::fileset_files) {
        if (v == "TYPE" || v == "BASE_DIRS") {
          state = State::fileset_skip;
          continue;
        }
        if (v == "FILES") {
          state = State::fileset_files;
          continue;
        }
        if (state == State::fileset_skip) continue;
      }
      sources.push_back(std::move(item));
    }
    attach(target, sources, cmd.span);
  }
}

void Interpreter::cmd_target_link_libraries(const CommandInvocation& cmd, const Condition& pc) {
  if (cmd.args.empty()) return;
  static const std::set<std::string, std::less<>> keywords{
      "PRIVATE", "PUBLIC", "INTERFACE", "LINK_PRIVATE", "LINK_PUBLIC", "LINK_INTERFACE_LIBRARIES",
      "debug",   "optimized", "general"};
  for (const auto& [guard, target] : single_strings(cmd.args[0], pc, "target name")) {
    for (const auto& item : split_items(items_of(cmd.args, 1, guard))) {
      if (keywords.count(item.value)) continue;
      std::string to = item.value;
      if (contains_symbolic(to)) {
        to = render_symbolic(to);
        warn(warn::kSymbolicPath, "link item depends on an unknown configuration value: " + to,
             cmd.span);
      }
      check_target(target, item.guard, cmd.span);
      trace_.events.push_back(LinkDependency{target, to, item.guard, cmd.span});
    }
  }
}

// ---------------------------------------------------------------------------
// Functions and macros

std::optional<ParsedArgs> Interpreter::parse_keywords(const std::vector<GuardedItem>& items,
                                                      const Condition& pc,
                                                      const std::set<std::string>& options,
                                                      const std::set<std::string>& single,
                                                      const std::set<std::string>& multi) {
  ParsedArgs out;
  std::string current;
  bool single_filled = false;
  for (const auto& item : items) {
    bool keyword = options.count(item.value) || single.count(item.value) || multi.count(item.value);
    if (keyword) {
      if (!is_true_guard_of(item.guard, pc)) return std::nullopt;
      out.present.insert(item.value);
      if (options.count(item.value)) {
        current.clear();
      } else {
        current = item.value;
        single_filled = false;
        out.values[current];
      }
      continue;
    }
    if (current.empty()) {
      out.unparsed.push_back(item);
    } else if (single.count(current)) {
      if (single_filled) {
        out.unparsed.push_back(item);
        continue;
      }
      if (!is_true_guard_of(item.guard, pc)) return std::nullopt;
      out.values[current].push_back(item);
      single_filled = true;
    } else {
      out.values[current].push_back(item);
    }
  }
  return out;
}

void Interpreter::cmd_parse_arguments(const CommandInvocation& cmd, const Condition& pc) {
  const auto& a = cmd.args;
  std::size_t base = 0;
  std::vector<GuardedItem> input;
  if (!a.empty() && a[0].raw_text == "PARSE_ARGV") {
    if (a.size() < 5) return;
    std::size_t skip = 0;
    try {
      auto n = items_of(a, 1, pc);
      skip = n.empty() ? 0 : std::stoul(n[0].value);
    } catch (const std::exception&) {
      warn(warn::kUnsupportedCommand, "cmake_parse_arguments() with a bad PARSE_ARGV index",
           cmd.span);
      return;
    }
    base = 2;
    if (const VariableValue* argv = env_.find_normal("ARGV")) {
      for (const auto& item : argv->items) input.push_back({conj(pc, item.guard), item.value});
    }
    input.erase(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(std::min(skip, input.size())));
  } else {
    if (a.size() < 4) return;
    input = split_items(items_of(a, 4, pc));
  }
  auto names = [&](std::size_t i) {
    std::set<std::string> out;
    if (i >= a.size()) return out;
    for (const auto& item : split_items(expander_.expand_items(a[i], pc))) out.insert(item.value);
    return out;
  };
  std::string prefix;
  for (const auto& item : expander_.expand_items(a[base], pc)) prefix = item.value;
  auto options = names(base + 1);
  auto single = names(base + 2);
  auto multi = names(base + 3);

  auto bind_result = [&](const ParsedArgs& parsed, const Condition& guard) {
    for (const auto& o : options) {
      set_normal(prefix + "_" + o, {{guard, parsed.present.count(o) ? "TRUE" : "FALSE"}}, guard);
    }
    for (const auto* group : {&single, &multi}) {
      for (const auto& k : *group) {
        auto it = parsed.values.find(k);
        if (it == parsed.values.end() || it->second.empty()) {
          env_.bind(prefix + "_" + k, unset_under(env_.find_normal(prefix + "_" + k), guard));
        } else {
          set_normal(prefix + "_" + k, it->second, guard);
        }
      }
    }
    if (parsed.unparsed.empty()) {
      env_.bind(prefix + "_UNPARSED_ARGUMENTS",
                unset_under(env_.find_normal(prefix + "_UNPARSED_ARGUMENTS"), guard));
    } else {
      set_normal(prefix + "_UNPARSED_ARGUMENTS", parsed.unparsed, guard);
    }
  };

  if (auto parsed = parse_keywords(input, pc, options, single, multi)) {
    bind_result(*parsed, pc);
    return;
  }
  // Keywords in conditional positions: enumerate the concrete argument lists.
  VariableValue as_list;
  as_list.defined = Condition::truth();
  for (const auto& item : input) as_list.items.push_back(item);
  auto flat = expander_.flatten("ARGN", as_list);
  if (!flat) {
    warn(warn::kBranchOverflow, "cmake_parse_arguments() input has too many variants", cmd.span);
    return;
  }
  for (const auto& alt : flat->alternatives) {
    Condition g = conj(pc, alt.guard);
    if (!solver_.possible(g)) continue;
    std::vector<GuardedItem> concrete;
    for (const auto& v : alt.values) concrete.push_back({g, v});
    if (auto parsed = parse_keywords(concrete, g, options, single, multi)) bind_result(*parsed, g);
  }
}

void Interpreter::call_function(const FunctionDef& def, const CommandInvocation& cmd,
                                const Condition& pc) {
  auto args = items_of(cmd.args, 0, pc);
  std::size_t n = def.params.size();
  bool fixed_prefix = true;
  for (std::size_t i = 0; i < std::min(n, args.size()); ++i) {
    fixed_prefix = fixed_prefix && is_true_guard_of(args[i].guard, pc);
  }

  auto invoke = [&](const std::vector<GuardedItem>& argv, const Condition& guard) {
    env_.push_scope();
    for (std::size_t i = 0; i < n; ++i) {
      if (i < argv.size()) {
        set_plain(def.params[i], detail::split_list(argv[i].value));
      } else {
        env_.bind(def.params[i], VariableValue::undefined());
      }
    }
    VariableValue all;
    all.defined = Condition::truth();
    VariableValue rest;
    rest.defined = Condition::truth();
    bool unconditional = true;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      all.items.push_back(argv[i]);
      if (i >= n) rest.items.push_back(argv[i]);
      unconditional = unconditional && is_true_guard_of(argv[i].guard, guard);
      if (unconditional) set_plain("ARGV" + std::to_string(i), {argv[i].value});
    }
    if (unconditional) {
      set_plain("ARGC", {std::to_string(argv.size())});
    } else if (auto flat = expander_.flatten("ARGV", all)) {
      VariableValue argc;
      argc.defined = Condition::truth();
      for (const auto& alt : flat->alternatives) {
        argc.items.push_back({alt.guard, std::to_string(alt.values.size())});
      }
      env_.bind("ARGC", std::move(argc));
    }
    env_.bind("ARGV", std::move(all));
    env_.bind("ARGN", std::move(rest));
    frames_.push_back({ControlFrame::Kind::function});
    exec_list(def.body, guard);
    frames_.pop_back();
    env_.pop_scope();
  };

  if (fixed_prefix) {
    invoke(args, pc);
    return;
  }
  VariableValue as_list;
  as_list.defined = Condition::truth();
  for (const auto& item : args) as_list.items.push_back(item);
  auto flat = expander_.flatten("ARGV", as_list);
  if (!flat) {
    warn(warn::kBranchOverflow, "call to " + def.name + "() has too many argument variants",
         cmd.span);
    return;
  }
  for (const auto& alt : flat->alternatives) {
    Condition g = conj(pc, alt.guard);
    if (!solver_.possible(g)) continue;
    std::vector<GuardedItem> concrete;
    for (const auto& v : alt.values) concrete.push_back({g, v});
    invoke(concrete, g);
  }
}

namespace {

void substitute(AstNodeList& nodes, const std::map<std::string, std::string>& replacements);

void substitute_args(std::vector<Argument>& args,
                     const std::map<std::string, std::string>& replacements) {
  for (auto& arg : args) {
    if (arg.kind == ArgumentKind::bracket) continue;
    for (const auto& [from, to] : replacements) {
      std::size_t pos = 0;
      while ((pos = arg.raw_text.find(from, pos)) != std::string::npos) {
        arg.raw_text.replace(pos, from.size(), to);
        pos += to.size();
      }
    }
  }
}

void substitute(AstNodeList& nodes, const std::map<std::string, std::string>& replacements) {
  for (auto& node : nodes) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CommandInvocation>) {
            substitute_args(n.args, replacements);
          } else if constexpr (std::is_same_v<T, IfBlock>) {
            for (auto& clause : n.clauses) {
              substitute_args(clause.condition, replacements);
              substitute(clause.body, replacements);
            }
            substitute(n.else_body, replacements);
          } else if constexpr (std::is_same_v<T, ForeachBlock>) {
            substitute_args(n.header_args, replacements);
            substitute(n.body, replacements);
          } else if constexpr (std::is_same_v<T, WhileBlock>) {
            substitute_args(n.condition, replacements);
            substitute(n.body, replacements);
          } else if constexpr (std::is_same_v<T, FunctionDef>) {
            substitute(n.body, replacements);
          }
        },
        node.node);
  }
}

}  // namespace

void Interpreter::call_macro(const FunctionDef& def, const CommandInvocation& cmd,
                             const Condition& pc) {
  // Macro parameters are textual: `${p}` is rewritten to a reference to a
  // hidden variable holding the argument, which keeps guarded values intact.
  auto args = items_of(cmd.args, 0, pc);
  std::size_t n = def.params.size();
  std::string prefix = "__macro" + std::to_string(++macro_calls_) + "_";
  std::map<std::string, std::string> replacements;
  auto hidden = [&](const std::string& name) {
    replacements["${" + name + "}"] = "${" + prefix + name + "}";
    return prefix + name;
  };

  bool fixed_prefix = true;
  for (std::size_t i = 0; i < std::min(n, args.size()); ++i) {
    fixed_prefix = fixed_prefix && is_true_guard_of(args[i].guard, pc);
  }
  if (!fixed_prefix) {
    warn(warn::kUnsupportedCommand,
         "macro " + def.name + "() called with conditional leading arguments", cmd.span);
  }
  VariableValue all;
  all.defined = Condition::truth();
  VariableValue rest;
  rest.defined = Condition::truth();
  bool unconditional = true;
  for (std::size_t i = 0; i < args.size(); ++i) {
    all.items.push_back(args[i]);
    if (i >= n) rest.items.push_back(args[i]);
    unconditional = unconditional && is_true_guard_of(args[i].guard, pc);
    if (unconditional) set_plain(hidden("ARGV" + std::to_string(i)), {args[i].value});
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::string var = hidden(def.params[i]);
    if (i < args.size()) {
      set_plain(var, detail::split_list(args[i].value));
    } else {
      env_.bind(var, VariableValue::of({}));
    }
  }
  if (unconditional) set_plain(hidden("ARGC"), {std::to_string(args.size())});
  env_.bind(hidden("ARGV"), std::move(all));
  env_.bind(hidden("ARGN"), std::move(rest));

  AstNodeList& body = owned_bodies_.emplace_back(def.body);
  substitute(body, replacements);
  exec_list(body, pc);
}

// ---------------------------------------------------------------------------

EvaluationResult Interpreter::run() {
  const std::string root = project_.root_dir;
  const std::string root_file = project_.root_listfile();
  const AstNodeList* nodes = listfile(root_file);
  if (!nodes) throw LoadError("MissingRootListfile", "no CMakeLists.txt in " + root);

  DirContext top{root, root + "/<build>"};
  dir_stack_.push_back(top);
  set_plain("CMAKE_SOURCE_DIR", {root});
  set_plain("CMAKE_BINARY_DIR", {top.binary_dir});
  set_plain("CMAKE_CURRENT_SOURCE_DIR", {root});
  set_plain("CMAKE_CURRENT_BINARY_DIR", {top.binary_dir});
  set_plain("CMAKE_CURRENT_LIST_DIR", {root});
  set_plain("CMAKE_CURRENT_LIST_FILE", {root_file});

  ++entered_files_[root_file];
  file_stack_.push_back(root_file);
  frames_.push_back({ControlFrame::Kind::file});
  for (const auto& node : *nodes) {
    Condition now = live(Condition::truth());
    if (!solver_.possible(now)) break;
    exec_node(node, now);
    if (options_.after_top_level_command) options_.after_top_level_command(env_);
  }
  frames_.pop_back();
  file_stack_.pop_back();

  // Deduplicate warnings, keeping the first occurrence of each.
  WarningList unique;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (auto& w : warnings_) {
    auto key = std::make_tuple(w.code, w.message, w.span ? w.span->to_string() : std::string());
    if (seen.insert(key).second) unique.push_back(std::move(w));
  }

  if (!fatal_.is_false()) {
    Condition ok = neg(fatal_);
    for (auto& event : trace_.events) {
      if (auto* d = std::get_if<DeclareDeliverable>(&event)) d->guard = simplify(conj(d->guard, ok));
    }
  }

  EvaluationResult result;
  result.root_variables = env_.visible();
  result.env = std::move(env_);
  result.trace = std::move(trace_);
  result.warnings = std::move(unique);
  return result;
}

}  // namespace

EvaluationResult evaluate_project(const ParsedProject& project,
                                  const ConfigurationAssignment& overrides,
                                  const EvaluatorOptions& options) {
  Interpreter interpreter(project, overrides, options);
  return interpreter.run();
}

}  // namespace cmexpose
