#include <algorithm>
#include <map>

#include "evaluator_internal.hpp"

namespace cmexpose {
namespace detail {

bool Solver::possible(const Condition& c) {
  if (c.is_true()) return true;
  if (c.is_false()) return false;
  auto [it, inserted] = cache_.try_emplace(c.key(), true);
  if (inserted) it->second = satisfiable(c, options_, atom_cap_) != Tristate::no;
  return it->second;
}

namespace {

std::size_t parse_into(std::string_view raw, std::size_t pos, bool in_ref, bool process_escapes,
                       std::vector<Segment>& out, bool& closed) {
  std::string literal;
  auto flush = [&] {
    if (literal.empty()) return;
    Segment s;
    s.text = std::move(literal);
    out.push_back(std::move(s));
    literal.clear();
  };
  closed = false;
  while (pos < raw.size()) {
    char c = raw[pos];
    if (in_ref && c == '}') {
      flush();
      closed = true;
      return pos + 1;
    }
    if (c == '\\' && process_escapes && pos + 1 < raw.size()) {
      char e = raw[pos + 1];
      switch (e) {
        case 'n': literal.push_back('\n'); break;
        case 't': literal.push_back('\t'); break;
        case 'r': literal.push_back('\r'); break;
        case ';': literal.push_back(kEscapedSemicolon); break;
        case '\n': break;  // line continuation inside quotes
        default: literal.push_back(e); break;
      }
      pos += 2;
      continue;
    }
    if (c == '$') {
      Segment::Kind kind = Segment::Kind::ref;
      std::size_t open = std::string_view::npos;
      if (raw.substr(pos, 2) == "${") {
        open = pos + 2;
      } else if (raw.substr(pos, 5) == "$ENV{") {
        kind = Segment::Kind::env_ref;
        open = pos + 5;
      } else if (raw.substr(pos, 7) == "$CACHE{") {
        kind = Segment::Kind::cache_ref;
        open = pos + 7;
      }
      if (open != std::string_view::npos) {
        Segment ref;
        ref.kind = kind;
        bool inner_closed = false;
        std::size_t next = parse_into(raw, open, true, process_escapes, ref.name, inner_closed);
        if (inner_closed) {
          flush();
          out.push_back(std::move(ref));
          pos = next;
          continue;
        }
      }
    }
    literal.push_back(c);
    ++pos;
  }
  flush();
  return pos;
}

}  // namespace

std::vector<Segment> parse_segments(const Argument& argument) {
  std::vector<Segment> out;
  if (argument.kind == ArgumentKind::bracket) {
    if (!argument.raw_text.empty()) {
      Segment s;
      s.text = argument.raw_text;
      out.push_back(std::move(s));
    }
    return out;
  }
  bool closed = false;
  parse_into(argument.raw_text, 0, false, true, out, closed);
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ';') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c == kEscapedSemicolon ? ';' : c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_list(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(';');
    out += values[i];
  }
  return out;
}

namespace {

std::string restore_semicolons(std::string s) {
  std::replace(s.begin(), s.end(), kEscapedSemicolon, ';');
  return s;
}

std::optional<FlattenedVariable> flatten_with(const std::string& name, const VariableValue& value,
                                              Solver& solver, std::size_t cap) {
  FlattenedVariable out;
  out.name = name;
  struct Alt {
    Condition guard;
    std::vector<std::string> values;
    bool defined;
  };
  std::vector<Alt> alts;
  if (!value.defined.is_false()) alts.push_back({value.defined, {}, true});
  Condition undefined = neg(value.defined);
  if (solver.possible(undefined)) alts.push_back({undefined, {}, false});

  for (const auto& item : value.items) {
    std::vector<Alt> next;
    for (auto& alt : alts) {
      if (!alt.defined) {
        next.push_back(std::move(alt));
        continue;
      }
      if (item.guard.is_true()) {
        alt.values.push_back(item.value);
        next.push_back(std::move(alt));
        continue;
      }
      Condition with = conj(alt.guard, item.guard);
      Condition without = conj(alt.guard, neg(item.guard));
      bool keep_with = solver.possible(with);
      bool keep_without = solver.possible(without);
      if (keep_with && !keep_without) {
        alt.values.push_back(item.value);
        next.push_back(std::move(alt));
      } else if (!keep_with && keep_without) {
        next.push_back(std::move(alt));
      } else if (keep_with) {
        Alt a{with, alt.values, true};
        a.values.push_back(item.value);
        next.push_back(std::move(a));
        next.push_back({without, std::move(alt.values), true});
      }
    }
    if (next.size() > cap) return std::nullopt;
    alts = std::move(next);
  }

  // Merge alternatives that ended up with the same value.
  std::vector<ValueAlternative> merged;
  std::map<std::pair<bool, std::vector<std::string>>, std::size_t> index;
  std::vector<std::vector<Condition>> guards;
  for (auto& alt : alts) {
    auto key = std::make_pair(alt.defined, alt.values);
    auto [it, inserted] = index.try_emplace(key, merged.size());
    if (inserted) {
      merged.push_back({Condition::truth(), std::move(alt.values), alt.defined});
      guards.emplace_back();
    }
    guards[it->second].push_back(alt.guard);
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    merged[i].guard = guards[i].size() == 1 ? guards[i][0] : simplify(disj_all(guards[i]));
  }
  if (merged.empty()) merged.push_back({Condition::truth(), {}, false});
  out.alternatives = std::move(merged);
  return out;
}

}  // namespace

void Expander::warn(const char* code, std::string message, const SourceSpan& span) {
  warnings_.push_back({code, std::move(message), span});
}

std::optional<FlattenedVariable> Expander::flatten(const std::string& name,
                                                   const VariableValue& value) {
  return flatten_with(name, value, solver_, limits_.branch_cap);
}

std::optional<std::vector<std::pair<Condition, std::string>>> Expander::reference_values(
    Segment::Kind kind, const std::string& name, const SourceSpan& span) {
  const VariableValue* value = nullptr;
  std::string shown = name;
  switch (kind) {
    case Segment::Kind::env_ref:
      shown = "ENV{" + name + "}";
      value = lookup_(shown, LookupMode::value);
      break;
    case Segment::Kind::cache_ref:
      shown = "CACHE{" + name + "}";
      value = lookup_(shown, LookupMode::value);
      break;
    default:
      value = lookup_(name, LookupMode::value);
      break;
  }
  std::vector<std::pair<Condition, std::string>> out;
  if (!value || value->defined.is_false()) {
    warn(warn::kUndefinedVariable, "variable '" + shown + "' is not defined", span);
    out.emplace_back(Condition::truth(), std::string());
    return out;
  }
  bool unconditional = value->defined.is_true() &&
                       std::all_of(value->items.begin(), value->items.end(),
                                   [](const GuardedItem& i) { return i.guard.is_true(); });
  if (unconditional) {
    std::vector<std::string> values;
    for (const auto& i : value->items) values.push_back(i.value);
    out.emplace_back(Condition::truth(), join_list(values));
    return out;
  }
  auto flat = flatten(name, *value);
  if (!flat) return std::nullopt;
  for (const auto& alt : flat->alternatives) out.emplace_back(alt.guard, join_list(alt.values));
  return out;
}

bool Expander::expand_segments(const std::vector<Segment>& segments, Partials& partials,
                               const Condition& context, const SourceSpan& span) {
  for (const auto& seg : segments) {
    if (seg.kind == Segment::Kind::literal) {
      for (auto& p : partials) p.second += seg.text;
      continue;
    }
    Partials names{{Condition::truth(), std::string()}};
    if (!expand_segments(seg.name, names, context, span)) return false;
    Partials next;
    for (const auto& [guard, text] : partials) {
      for (const auto& [name_guard, name] : names) {
        Condition g1 = conj(guard, name_guard);
        if (!name_guard.is_true() && !solver_.possible(conj(context, g1))) continue;
        auto values = reference_values(seg.kind, restore_semicolons(name), span);
        if (!values) return false;
        for (const auto& [value_guard, value] : *values) {
          Condition g2 = conj(g1, value_guard);
          if (!value_guard.is_true() && !solver_.possible(conj(context, g2))) continue;
          next.emplace_back(std::move(g2), text + value);
          if (next.size() > limits_.branch_cap) return false;
        }
      }
    }
    partials = std::move(next);
  }
  return true;
}

std::vector<ExpansionBranch> Expander::expand_impl(const Argument& argument,
                                                   const Condition& start,
                                                   const Condition& context) {
  auto segments = parse_segments(argument);
  bool generator = argument.raw_text.find("$<") != std::string::npos;
  if (generator) {
    warn(warn::kGeneratorExpression,
         "generator expression kept verbatim: " + argument.raw_text, argument.span);
  }
  Partials partials{{start, std::string()}};
  if (!expand_segments(segments, partials, context, argument.span)) {
    warn(warn::kBranchOverflow,
         "more than " + std::to_string(limits_.branch_cap) +
             " expansion branches; argument kept as opaque text: " + argument.raw_text,
         argument.span);
    return {{start, {argument.raw_text}}};
  }

  std::vector<ExpansionBranch> out;
  std::map<std::vector<std::string>, std::size_t> index;
  std::vector<std::vector<Condition>> guards;
  for (auto& [guard, text] : partials) {
    std::vector<std::string> strings;
    if (argument.kind == ArgumentKind::unquoted) {
      strings = split_list(text);
    } else {
      strings.push_back(restore_semicolons(std::move(text)));
    }
    auto [it, inserted] = index.try_emplace(strings, out.size());
    if (inserted) {
      out.push_back({guard, std::move(strings)});
      guards.emplace_back();
    }
    guards[it->second].push_back(guard);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (guards[i].size() > 1) out[i].guard = simplify(disj_all(guards[i]));
  }
  return out;
}

std::vector<ExpansionBranch> Expander::expand(const Argument& argument, const Condition& pc) {
  return expand_impl(argument, pc, Condition::truth());
}

std::vector<ExpansionBranch> Expander::expand_relative(const Argument& argument,
                                                       const Condition& context) {
  return expand_impl(argument, Condition::truth(), context);
}

std::vector<GuardedItem> Expander::expand_items(const Argument& argument, const Condition& pc) {
  std::vector<GuardedItem> out;
  if (argument.kind == ArgumentKind::unquoted) {
    auto segments = parse_segments(argument);
    if (segments.size() == 1 && segments[0].kind == Segment::Kind::ref &&
        segments[0].name.size() == 1 && segments[0].name[0].kind == Segment::Kind::literal) {
      const std::string& name = segments[0].name[0].text;
      const VariableValue* value = lookup_(name, LookupMode::value);
      if (!value || value->defined.is_false()) {
        warn(warn::kUndefinedVariable, "variable '" + name + "' is not defined", argument.span);
        return out;
      }
      for (const auto& item : value->items) {
        if (item.value.empty()) continue;
        Condition g = conj(pc, item.guard);
        if (!item.guard.is_true() && !solver_.possible(g)) continue;
        out.push_back({std::move(g), item.value});
      }
      return out;
    }
  }
  for (auto& branch : expand(argument, pc)) {
    for (auto& s : branch.strings) out.push_back({branch.guard, std::move(s)});
  }
  return out;
}

}  // namespace detail

std::optional<FlattenedVariable> flatten(const std::string& name, const VariableValue& value,
                                         const OptionTable& options, std::size_t cap) {
  detail::Solver solver(options, kDefaultAtomCap);
  return detail::flatten_with(name, value, solver, cap);
}

std::vector<ExpansionBranch> expand(const Argument& argument, const SymbolicEnv& env,
                                    const Condition& pc, WarningList& warnings,
                                    const EvaluatorLimits& limits) {
  detail::Solver solver(env.options(), limits.atom_cap);
  detail::Expander expander(
      [&env](const std::string& name, detail::LookupMode) { return env.find(name); }, solver,
      env.options(), warnings, limits);
  return expander.expand(argument, pc);
}

}  // namespace cmexpose
