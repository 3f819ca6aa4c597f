#include "cmexpose/bdg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmexpose/condition_analysis.hpp"
#include "cmexpose/paths.hpp"
#include "cmexpose/project_loader.hpp"

#ifndef CMEXPOSE_VERSION
#define CMEXPOSE_VERSION "0.0.0"
#endif

namespace cmexpose {

using nlohmann::json;

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::deliverable: return "deliverable";
    case NodeKind::external_library: return "external_library";
    case NodeKind::source_file: return "source_file";
  }
  return "source_file";
}

std::string to_string(EdgeKind kind) { return kind == EdgeKind::compiles ? "compiles" : "links"; }

const BdgNode* Bdg::find(const std::string& id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const BdgNode& n, const std::string& key) { return n.id < key; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

std::vector<const BdgNode*> Bdg::deliverables() const {
  std::vector<const BdgNode*> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::deliverable) out.push_back(&n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct EdgeAccumulator {
  std::vector<Condition> guards;
  std::vector<SourceSpan> spans;
};

SourceSpan relative_span(SourceSpan span, const std::string& root) {
  span.file_path = relativize(span.file_path, root);
  return span;
}

}  // namespace

Bdg build_bdg(const DeclarationTrace& trace, const SymbolicEnv& env, const std::string& root,
              WarningList& warnings) {
  Bdg bdg;
  bdg.options = env.options();
  bdg.metadata.root = root;
  bdg.metadata.analyzer_version = CMEXPOSE_VERSION;

  auto possible = [&](const Condition& c) {
    return satisfiable(c, env.options()) != Tristate::no;
  };

  // Deliverables and imported targets.
  std::map<std::string, std::vector<Condition>> exists;
  std::map<std::string, DeliverableKind> kinds;
  std::set<std::string> imported;
  struct Alias {
    std::string target;
    Condition guard;
  };
  std::map<std::string, Alias> aliases;
  for (const auto& event : trace.events) {
    if (const auto* d = std::get_if<DeclareDeliverable>(&event)) {
      if (d->imported) {
        imported.insert(d->name);
      } else {
        exists[d->name].push_back(d->guard);
        kinds.try_emplace(d->name, d->kind);
      }
    } else if (const auto* a = std::get_if<DeclareAlias>(&event)) {
      aliases[a->alias] = {a->target, a->guard};
    }
  }
  std::map<std::string, Condition> exists_guard;
  for (auto& [name, guards] : exists) {
    exists_guard[name] = guards.size() == 1 ? guards[0] : simplify(disj_all(guards));
  }

  // Follows alias chains; the guard accumulates the alias declarations.
  auto resolve = [&](std::string name, Condition& guard) {
    std::set<std::string> seen;
    while (true) {
      auto it = aliases.find(name);
      if (it == aliases.end() || !seen.insert(name).second) return name;
      guard = conj(guard, it->second.guard);
      name = it->second.target;
    }
  };

  std::map<std::pair<std::string, std::string>, EdgeAccumulator> compiles;
  std::map<std::pair<std::string, std::string>, EdgeAccumulator> links;
  std::set<std::string> sources;
  std::set<std::string> externals;

  for (const auto& event : trace.events) {
    if (const auto* a = std::get_if<AttachSources>(&event)) {
      Condition guard = a->guard;
      std::string target = resolve(a->target, guard);
      if (!exists_guard.count(target)) {
        warnings.push_back({warn::kDanglingReference,
                            "sources attached to undeclared target '" + a->target + "'", a->span});
        continue;
      }
      for (const auto& path : a->source_paths) {
        sources.insert(path);
        auto& acc = compiles[{target, path}];
        acc.guards.push_back(guard);
        acc.spans.push_back(relative_span(a->span, root));
      }
    } else if (const auto* l = std::get_if<LinkDependency>(&event)) {
      Condition guard = l->guard;
      std::string from = resolve(l->from_target, guard);
      if (!exists_guard.count(from)) {
        if (!imported.count(from)) {
          warnings.push_back({warn::kDanglingReference,
                              "link from undeclared target '" + l->from_target + "'", l->span});
        }
        continue;
      }
      std::string to = resolve(l->to, guard);
      if (to == from) continue;
      if (auto it = exists_guard.find(to); it != exists_guard.end()) {
        guard = conj(guard, it->second);
      } else {
        externals.insert(to);
      }
      auto& acc = links[{from, to}];
      acc.guards.push_back(guard);
      acc.spans.push_back(relative_span(l->span, root));
    }
  }

  // Node ids: deliverables keep their names; colliding files and externals
  // get a kind prefix.
  std::map<std::string, std::string> source_id;
  std::map<std::string, std::string> external_id;
  for (const auto& path : sources) {
    std::string id = path;
    if (exists_guard.count(path)) {
      id = "source:" + path;
      warnings.push_back({warn::kNodeIdCollision,
                          "source file '" + path + "' shares its name with a target", std::nullopt});
    }
    source_id[path] = id;
  }
  for (const auto& name : externals) {
    std::string id = name;
    if (sources.count(name) || exists_guard.count(name)) {
      id = "external:" + name;
      warnings.push_back({warn::kNodeIdCollision,
                          "external library '" + name + "' shares its name with another node",
                          std::nullopt});
    }
    external_id[name] = id;
  }

  for (const auto& [name, guard] : exists_guard) {
    bdg.nodes.push_back({name, NodeKind::deliverable, kinds.at(name), name, guard});
  }
  for (const auto& [path, id] : source_id) {
    bdg.nodes.push_back({id, NodeKind::source_file, std::nullopt, path, Condition::truth()});
  }
  for (const auto& [name, id] : external_id) {
    bdg.nodes.push_back({id, NodeKind::external_library, std::nullopt, name, Condition::truth()});
  }
  std::sort(bdg.nodes.begin(), bdg.nodes.end(),
            [](const BdgNode& a, const BdgNode& b) { return a.id < b.id; });

  auto emit = [&](auto& accumulated, EdgeKind kind, auto&& map_to) {
    for (auto& [key, acc] : accumulated) {
      Condition guard = acc.guards.size() == 1 ? acc.guards[0] : simplify(disj_all(acc.guards));
      if (!possible(guard)) continue;
      std::sort(acc.spans.begin(), acc.spans.end());
      acc.spans.erase(std::unique(acc.spans.begin(), acc.spans.end()), acc.spans.end());
      bdg.edges.push_back({key.first, map_to(key.second), kind, guard, acc.spans});
    }
  };
  emit(compiles, EdgeKind::compiles, [&](const std::string& p) { return source_id.at(p); });
  emit(links, EdgeKind::links, [&](const std::string& to) {
    auto it = external_id.find(to);
    return it == external_id.end() ? to : it->second;
  });
  std::sort(bdg.edges.begin(), bdg.edges.end(), [](const BdgEdge& a, const BdgEdge& b) {
    return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
  });

  // Link cycles among deliverables.
  std::map<std::string, std::vector<std::string>> out_links;
  for (const auto& e : bdg.edges) {
    if (e.kind == EdgeKind::links && exists_guard.count(e.to)) out_links[e.from].push_back(e.to);
  }
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::set<std::string> reported;
  std::function<void(const std::string&, std::vector<std::string>&)> dfs =
      [&](const std::string& n, std::vector<std::string>& stack) {
        state[n] = 1;
        stack.push_back(n);
        for (const auto& m : out_links[n]) {
          if (state[m] == 1) {
            auto start = std::find(stack.begin(), stack.end(), m);
            std::vector<std::string> cycle(start, stack.end());
            std::string text;
            for (const auto& c : cycle) text += c + " -> ";
            text += m;
            if (reported.insert(*std::min_element(cycle.begin(), cycle.end())).second) {
              warnings.push_back({warn::kLinkCycle, "link cycle: " + text, std::nullopt});
            }
          } else if (state[m] == 0) {
            dfs(m, stack);
          }
        }
        stack.pop_back();
        state[n] = 2;
      };
  for (const auto& [name, _] : exists_guard) {
    std::vector<std::string> stack;
    if (state[name] == 0) dfs(name, stack);
  }

  for (const auto& [id, atom] : env.opaque().atoms()) {
    std::optional<SourceSpan> span;
    if (atom.span) span = relative_span(*atom.span, root);
    bdg.metadata.opaque_atoms[id] = {atom.source_text, span};
  }
  bdg.metadata.warning_summary = summarize(warnings);
  return bdg;
}

Bdg analyze_parsed_project(const ParsedProject& project, WarningList& warnings) {
  for (const auto& w : project.warnings) warnings.push_back(w);
  auto result = evaluate_project(project);
  for (auto& w : result.warnings) warnings.push_back(std::move(w));
  return build_bdg(result.trace, result.env, project.root_dir, warnings);
}

Bdg analyze_project(const std::string& root_dir, WarningList& warnings) {
  auto project = load_project(root_dir);
  return analyze_parsed_project(project, warnings);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

[[noreturn]] void corrupt(const std::string& why) {
  throw Error("CorruptPayload", "corrupt graph payload: " + why);
}

json span_to_json(const SourceSpan& s) {
  return json{{"file", s.file_path}, {"line", s.line}, {"column", s.column}};
}

SourceSpan span_from_json(const json& j) {
  SourceSpan s;
  s.file_path = j.at("file").get<std::string>();
  s.line = j.at("line").get<std::size_t>();
  s.column = j.at("column").get<std::size_t>();
  if (s.line < 1 || s.column < 1) corrupt("span position below 1");
  return s;
}

std::string digest_of(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const Bdg& bdg) {
  json options = json::array();
  for (const auto& [name, o] : bdg.options) {
    options.push_back({{"name", o.name},
                       {"domain", {{"kind", to_string(o.domain.kind)}, {"values", o.domain.values}}},
                       {"default", o.default_value ? json(*o.default_value) : json(nullptr)},
                       {"origin", to_string(o.origin)}});
  }
  json nodes = json::array();
  for (const auto& n : bdg.nodes) {
    json j{{"id", n.id},
           {"kind", to_string(n.kind)},
           {"display_name", n.display_name},
           {"exists_guard", n.exists_guard.key()}};
    if (n.deliverable_kind) j["subkind"] = to_string(*n.deliverable_kind);
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : bdg.edges) {
    json spans = json::array();
    for (const auto& s : e.spans) spans.push_back(span_to_json(s));
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"kind", to_string(e.kind)},
                     {"guard", e.guard.key()},
                     {"spans", std::move(spans)}});
  }
  json opaque = json::array();
  for (const auto& [id, info] : bdg.metadata.opaque_atoms) {
    json j{{"id", id}, {"text", info.source_text}};
    j["span"] = info.span ? span_to_json(*info.span) : json(nullptr);
    opaque.push_back(std::move(j));
  }
  json summary = json::object();
  for (const auto& [code, count] : bdg.metadata.warning_summary) summary[code] = count;
  return json{{"schema_version", kBdgSchemaVersion},
              {"options", std::move(options)},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"metadata",
               {{"root", bdg.metadata.root},
                {"analyzer_version", bdg.metadata.analyzer_version},
                {"warning_summary", std::move(summary)},
                {"opaque_atoms", std::move(opaque)}}}};
}

}  // namespace

std::string save_bdg_string(const Bdg& bdg) {
  json j = to_json(bdg);
  j["digest"] = digest_of(j.dump());
  return j.dump(2) + "\n";
}

std::size_t save_bdg(const Bdg& bdg, const std::string& path) {
  std::string text = save_bdg_string(bdg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", "cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw Error("IoError", "cannot write " + path);
  return text.size();
}

Condition parse_bdg_condition(const Bdg& bdg, const std::string& text) {
  return parse_condition(text, [&](std::uint32_t id) -> std::optional<Atom> {
    auto it = bdg.metadata.opaque_atoms.find(id);
    if (it == bdg.metadata.opaque_atoms.end()) {
      throw Error("CorruptPayload", "opaque atom #" + std::to_string(id) + " is not in the metadata");
    }
    return Atom::opaque(id, it->second.source_text, it->second.span);
  });
}

Bdg load_bdg_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(std::string("not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) corrupt("top level is not an object");
  auto version = j.find("schema_version");
  if (version == j.end() || !version->is_number_integer()) corrupt("missing schema_version");
  if (version->get<long long>() != kBdgSchemaVersion) {
    throw Error("SchemaVersionMismatch",
                "graph schema version " + std::to_string(version->get<long long>()) +
                    " is not supported (expected " + std::to_string(kBdgSchemaVersion) + ")");
  }
  auto digest = j.find("digest");
  if (digest == j.end() || !digest->is_string()) corrupt("missing digest");
  std::string expected = digest->get<std::string>();
  json body = j;
  body.erase("digest");
  if (digest_of(body.dump()) != expected) corrupt("digest mismatch");

  Bdg bdg;
  try {
    const json& meta = j.at("metadata");
    bdg.metadata.root = meta.at("root").get<std::string>();
    bdg.metadata.analyzer_version = meta.at("analyzer_version").get<std::string>();
    for (const auto& [code, count] : meta.at("warning_summary").items()) {
      bdg.metadata.warning_summary[code] = count.get<std::size_t>();
    }
    for (const auto& o : meta.at("opaque_atoms")) {
      OpaqueAtomInfo info{o.at("text").get<std::string>(), std::nullopt};
      if (!o.at("span").is_null()) info.span = span_from_json(o.at("span"));
      bdg.metadata.opaque_atoms[o.at("id").get<std::uint32_t>()] = std::move(info);
    }
    for (const auto& o : j.at("options")) {
      ConfigOption option;
      option.name = o.at("name").get<std::string>();
      auto kind = parse_domain_kind(o.at("domain").at("kind").get<std::string>());
      auto origin = parse_option_origin(o.at("origin").get<std::string>());
      if (!kind || !origin) corrupt("bad option domain or origin");
      option.domain.kind = *kind;
      option.domain.values = o.at("domain").at("values").get<std::vector<std::string>>();
      option.origin = *origin;
      if (!o.at("default").is_null()) option.default_value = o.at("default").get<std::string>();
      if (!bdg.options.emplace(option.name, option).second) corrupt("duplicate option");
    }
    for (const auto& n : j.at("nodes")) {
      BdgNode node;
      node.id = n.at("id").get<std::string>();
      std::string kind = n.at("kind").get<std::string>();
      if (kind == "deliverable") {
        node.kind = NodeKind::deliverable;
        auto sub = parse_deliverable_kind(n.at("subkind").get<std::string>());
        if (!sub) corrupt("bad deliverable subkind");
        node.deliverable_kind = sub;
      } else if (kind == "external_library") {
        node.kind = NodeKind::external_library;
      } else if (kind == "source_file") {
        node.kind = NodeKind::source_file;
      } else {
        corrupt("bad node kind " + kind);
      }
      node.display_name = n.at("display_name").get<std::string>();
      node.exists_guard = parse_bdg_condition(bdg, n.at("exists_guard").get<std::string>());
      bdg.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
      BdgEdge edge;
      edge.from = e.at("from").get<std::string>();
      edge.to = e.at("to").get<std::string>();
      std::string kind = e.at("kind").get<std::string>();
      if (kind == "compiles") {
        edge.kind = EdgeKind::compiles;
      } else if (kind == "links") {
        edge.kind = EdgeKind::links;
      } else {
        corrupt("bad edge kind " + kind);
      }
      edge.guard = parse_bdg_condition(bdg, e.at("guard").get<std::string>());
      for (const auto& s : e.at("spans")) edge.spans.push_back(span_from_json(s));
      bdg.edges.push_back(std::move(edge));
    }
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const Error& e) {
    if (e.kind() == "CorruptPayload") throw;
    corrupt(e.what());
  }

  for (std::size_t i = 1; i < bdg.nodes.size(); ++i) {
    if (!(bdg.nodes[i - 1].id < bdg.nodes[i].id)) corrupt("nodes not sorted or duplicated");
  }
  for (const auto& e : bdg.edges) {
    const BdgNode* from = bdg.find(e.from);
    const BdgNode* to = bdg.find(e.to);
    if (!from || !to) corrupt("edge references a missing node");
    if (from->kind != NodeKind::deliverable) corrupt("edge does not start at a deliverable");
    if (e.kind == EdgeKind::compiles && to->kind != NodeKind::source_file) {
      corrupt("compiles edge does not end at a source file");
    }
    if (e.kind == EdgeKind::links && to->kind == NodeKind::source_file) {
      corrupt("links edge ends at a source file");
    }
  }
  return bdg;
}

Bdg load_bdg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_bdg_string(buffer.str());
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const Bdg& bdg) {
  std::ostringstream out;
  out << "digraph bdg {\n";
  for (const auto& n : bdg.nodes) {
    out << "  " << dot_quote(n.id) << " [";
    switch (n.kind) {
      case NodeKind::deliverable: {
        std::string label = n.display_name + "\n" + to_string(*n.deliverable_kind);
        if (!n.exists_guard.is_true()) label += "\nwhen " + n.exists_guard.key();
        out << "shape=box, label=" << dot_quote(label);
        break;
      }
      case NodeKind::external_library:
        out << "shape=ellipse, style=dashed, label=" << dot_quote(n.display_name);
        break;
      case NodeKind::source_file:
        out << "shape=note, label=" << dot_quote(n.display_name);
        break;
    }
    out << "];\n";
  }
  for (const auto& e : bdg.edges) {
    out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to);
    std::vector<std::string> attrs;
    if (!e.guard.is_true()) attrs.push_back("label=" + dot_quote(e.guard.key()));
    if (e.kind == EdgeKind::links) attrs.push_back("style=dashed");
    if (!attrs.empty()) {
      out << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? ", " : "") << attrs[i];
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace cmexpose
