#include "cmexpose/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmexpose/bdg.hpp"
#include "cmexpose/change_ingest.hpp"
#include "cmexpose/exposure.hpp"
#include "cmexpose/project_loader.hpp"
#include "cmexpose/report_json.hpp"
#include "cmexpose/scoring.hpp"

namespace cmexpose {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "human";
  bool strict = false;
  int verbosity = 0;
};

struct ChangeInput {
  std::string diff;
  std::vector<std::string> files;
  std::string file_list;
  std::optional<int> strip;
  std::string id = "change";
};

struct PatchInput {
  std::vector<std::string> diffs;       // ID=DIFF_FILE
  std::vector<std::string> file_lists;  // ID=LIST_FILE
  std::optional<int> strip;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void warn(const std::string& code, const std::string& message) {
    warned_ = true;
    err_ << "warning: [" << code << "] " << message << "\n";
  }

  bool json_output() const { return common.format == "json"; }

  int finish() const { return common.strict && warned_ ? kExitWarnings : kExitOk; }

  ChangeSet read_changes(const ChangeInput& in) {
    if (in.diff.empty() && in.files.empty() && in.file_list.empty()) {
      throw UsageError("give changed files with --diff, --files or --file-list");
    }
    std::vector<std::string> files = in.files;
    if (!in.diff.empty()) {
      auto doc = parse_unified_diff(read_input(in.diff), DiffOptions{in.strip});
      auto cs = to_changeset(doc, in.id);
      files.insert(files.end(), cs.changed_files.begin(), cs.changed_files.end());
    }
    if (!in.file_list.empty()) {
      auto listed = parse_file_list(read_input(in.file_list));
      files.insert(files.end(), listed.begin(), listed.end());
    }
    return ChangeSet::make(in.id, files);
  }

  std::vector<ChangeSet> read_patches(const PatchInput& in) {
    std::vector<ChangeSet> patches;
    std::set<std::string> ids;
    auto split = [&](const std::string& spec) {
      auto eq = spec.find('=');
      if (eq == 0 || eq == std::string::npos || eq + 1 == spec.size()) {
        throw UsageError("patch specs look like ID=FILE, got '" + spec + "'");
      }
      std::string id = spec.substr(0, eq);
      if (!ids.insert(id).second) throw UsageError("duplicate patch id '" + id + "'");
      return std::make_pair(id, spec.substr(eq + 1));
    };
    for (const auto& spec : in.diffs) {
      auto [id, path] = split(spec);
      patches.push_back(to_changeset(parse_unified_diff(read_input(path), DiffOptions{in.strip}), id));
    }
    for (const auto& spec : in.file_lists) {
      auto [id, path] = split(spec);
      patches.push_back(ChangeSet::make(id, parse_file_list(read_input(path))));
    }
    return patches;
  }

  /// -D NAME=VALUE (or NAME:TYPE=VALUE). Unknown names are registered on the
  /// graph so later lookups see them.
  ConfigurationAssignment read_assignment(const std::vector<std::string>& defines, bool partial,
                                          Bdg& bdg) {
    ConfigurationAssignment a;
    a.total = !partial;
    for (const auto& d : defines) {
      auto eq = d.find('=');
      if (eq == 0 || eq == std::string::npos) throw UsageError("-D expects NAME=VALUE, got '" + d + "'");
      std::string name = d.substr(0, eq);
      if (auto colon = name.find(':'); colon != std::string::npos) name.resize(colon);
      if (name.empty()) throw UsageError("-D expects NAME=VALUE, got '" + d + "'");
      if (!bdg.options.count(name)) {
        warn(warn::kUnknownOption, "'" + name + "' is not an option of the analyzed project");
        ConfigOption o;
        o.name = name;
        o.domain.kind = DomainKind::opaque;
        o.origin = OptionOrigin::cache_override;
        bdg.options.emplace(name, o);
      }
      a.values[name] = d.substr(eq + 1);
    }
    return a;
  }

  /// Condition text for humans, remembering opaque atoms for the legend.
  std::string show(const Condition& c) {
    for (const auto& atom : c.atoms()) {
      if (atom.kind == AtomKind::opaque) legend_.insert(atom.opaque_id);
    }
    return c.key();
  }

  void print_legend(const Bdg& bdg) {
    if (legend_.empty()) return;
    out_ << "\nopaque predicates:\n";
    for (auto id : legend_) {
      out_ << "  OPAQUE#" << id;
      auto it = bdg.metadata.opaque_atoms.find(id);
      if (it != bdg.metadata.opaque_atoms.end()) {
        out_ << ": " << it->second.source_text;
        if (it->second.span) out_ << " (" << it->second.span->to_string() << ")";
      }
      out_ << "\n";
    }
  }

  std::string describe(const ConfigurationAssignment& a) {
    std::string s;
    for (const auto& [k, v] : a.values) s += (s.empty() ? "" : " ") + k + "=" + v;
    if (s.empty()) s = "(none)";
    s += a.total ? ", defaults for the rest" : ", the rest unassigned";
    return s;
  }

  int analyze(const std::string& dir, const std::string& out_path) {
    WarningList warnings;
    Bdg bdg = analyze_project(dir, warnings);
    std::size_t bytes = 0;
    if (!out_path.empty()) bytes = save_bdg(bdg, out_path);
    for (const auto& w : warnings) {
      warned_ = true;
      if (common.verbosity > 0 && !json_output()) err_ << "warning: " << w.to_string() << "\n";
    }
    std::vector<std::string> deliverables;
    for (const auto* d : bdg.deliverables()) deliverables.push_back(d->id);
    if (json_output()) {
      json j{{"schema_version", kReportSchemaVersion},
             {"kind", "analysis"},
             {"node_count", bdg.nodes.size()},
             {"edge_count", bdg.edges.size()},
             {"deliverables", deliverables},
             {"warning_summary", summarize(warnings)},
             {"warnings", warnings_to_json(warnings)}};
      if (!out_path.empty()) j["output"] = {{"path", out_path}, {"bytes", bytes}};
      out_ << dump_json(j);
    } else {
      if (!out_path.empty()) out_ << "wrote " << out_path << " (" << bytes << " bytes)\n";
      out_ << "nodes: " << bdg.nodes.size() << ", edges: " << bdg.edges.size()
           << ", deliverables: " << deliverables.size() << "\n";
      auto summary = summarize(warnings);
      out_ << "warnings: " << warnings.size() << "\n";
      for (const auto& [code, n] : summary) out_ << "  " << code << ": " << n << "\n";
    }
    return finish();
  }

  int impact(const std::string& bdg_path, const ChangeInput& in,
             const std::vector<std::string>& defines, bool partial, bool all_configs) {
    if (all_configs && (!defines.empty() || partial)) {
      throw UsageError("--all-configs cannot be combined with -D or --partial");
    }
    Bdg bdg = load_bdg(bdg_path);
    ChangeSet changes = read_changes(in);
    if (all_configs) {
      if (json_output()) {
        out_ << dump_json(propagation_to_json(bdg, changes));
        return finish();
      }
      out_ << "changeset: " << changes.id << "\n";
      auto objects = paths_for_change(bdg, changes);
      for (const auto* d : bdg.deliverables()) {
        Condition c = propagation_conditions(bdg, changes, d->id);
        if (c.is_false()) continue;
        auto v = count_variants(c, bdg.options);
        out_ << d->id << ": " << show(c) << "  (" << v.count << (v.exact ? "" : "+")
             << " variants)\n";
        print_files(objects, d->id);
      }
      print_legend(bdg);
      return finish();
    }
    auto assignment = read_assignment(defines, partial, bdg);
    auto report = impacted_deliverables(bdg, changes, assignment);
    if (json_output()) {
      out_ << dump_json(report_to_json(report));
      return finish();
    }
    out_ << "changeset: " << changes.id << "\n";
    out_ << "assignment: " << describe(assignment) << "\n";
    auto objects = paths_for_change(bdg, changes);
    for (Tristate t : {Tristate::yes, Tristate::unknown}) {
      for (const auto& d : report.deliverables) {
        if (d.impacted != t) continue;
        out_ << d.deliverable << ": " << to_string(t) << "\n";
        print_files(objects, d.deliverable);
      }
    }
    auto yes = report.with(Tristate::yes);
    auto unknown = report.with(Tristate::unknown);
    out_ << "impacted: " << yes.size() << ", unknown: " << unknown.size()
         << ", not impacted: " << report.with(Tristate::no).size() << "\n";
    print_legend(bdg);
    return finish();
  }

  void print_files(const std::vector<PathObject>& objects, const std::string& deliverable) {
    for (const auto& po : objects) {
      for (const auto& e : po.entries) {
        if (e.deliverable == deliverable) {
          out_ << "  " << po.changed_file << ": " << show(e.aggregate_guard) << "\n";
        }
      }
    }
  }

  int paths(const std::string& bdg_path, const ChangeInput& in, std::size_t cap) {
    if (cap == 0) throw UsageError("--path-cap must be at least 1");
    Bdg bdg = load_bdg(bdg_path);
    auto objects = paths_for_change(bdg, read_changes(in), cap);
    if (json_output()) {
      out_ << dump_json(paths_to_json(objects));
      return finish();
    }
    for (const auto& po : objects) {
      out_ << po.changed_file << "\n";
      if (po.entries.empty()) out_ << "  (no deliverable depends on this file)\n";
      for (const auto& e : po.entries) {
        out_ << "  " << e.deliverable << "  [" << show(e.aggregate_guard) << "]\n";
        for (const auto& p : e.paths) {
          out_ << "    ";
          for (std::size_t i = 0; i < p.nodes.size(); ++i) out_ << (i ? " -> " : "") << p.nodes[i];
          out_ << "  [" << show(p.guard) << "]\n";
        }
        if (e.truncated) out_ << "    ... more paths omitted\n";
      }
    }
    print_legend(bdg);
    return finish();
  }

  int rank(const std::string& bdg_path, const PatchInput& in, const std::string& by,
           const std::vector<std::string>& defines, bool partial) {
    Bdg bdg = load_bdg(bdg_path);
    auto patches = read_patches(in);
    RankKey key = by == "variants" ? RankKey::variant_count : RankKey::deliverable_count;
    if (key == RankKey::variant_count && (!defines.empty() || partial)) {
      throw UsageError("--by variants does not take -D or --partial");
    }
    ConfigurationAssignment assignment;
    if (key == RankKey::deliverable_count) assignment = read_assignment(defines, partial, bdg);
    auto ranking = rank_patches(bdg, patches, key, assignment);
    if (json_output()) {
      out_ << dump_json(ranking_to_json(ranking, key, assignment));
      return finish();
    }
    out_ << (key == RankKey::variant_count ? "impacted variants" : "impacted deliverables");
    if (key == RankKey::deliverable_count) out_ << " under " << describe(assignment);
    out_ << "\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      out_ << (i + 1) << ". " << ranking[i].id << "  " << ranking[i].score
           << (ranking[i].exact ? "" : " (estimate)") << "\n";
    }
    return finish();
  }

  int filter(const std::string& bdg_path, const PatchInput& in, const std::string& deliverable,
             const std::vector<std::string>& defines, bool partial) {
    if (deliverable.empty() == defines.empty()) {
      throw UsageError("filter needs exactly one target: --deliverable or -D assignments");
    }
    if (partial) throw UsageError("variant filters use total assignments; drop --partial");
    Bdg bdg = load_bdg(bdg_path);
    auto patches = read_patches(in);
    std::vector<std::string> ids;
    json target;
    if (!deliverable.empty()) {
      ids = filter_patches_by_deliverable(bdg, patches, deliverable);
      target = {{"deliverable", deliverable}};
    } else {
      auto assignment = read_assignment(defines, false, bdg);
      ids = filter_patches_by_variant(bdg, patches, assignment);
      target = {{"assignment", assignment_to_json(assignment)}};
    }
    if (json_output()) {
      out_ << dump_json(json{{"schema_version", kReportSchemaVersion},
                             {"kind", "filter"},
                             {"target", target},
                             {"patches", ids}});
    } else {
      for (const auto& id : ids) out_ << id << "\n";
    }
    return finish();
  }

  int score(const std::string& mode, const std::string& answer, const std::string& truth) {
    auto load = [&](const std::string& path, const char* key) {
      json j;
      try {
        j = json::parse(read_input(path));
      } catch (const json::parse_error& e) {
        throw Error("MalformedInput", path + ": " + e.what());
      }
      if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
        throw Error("MalformedInput", path + ": expected an object with a '" + key + "' array");
      }
      std::vector<std::string> ids;
      for (const auto& v : j.at(key)) {
        if (!v.is_string()) throw Error("MalformedInput", path + ": ids must be strings");
        ids.push_back(v.get<std::string>());
      }
      return ids;
    };
    if (mode == "list") {
      auto s = score_list(load(answer, "deliverables"), load(truth, "deliverables"));
      if (s.empty_estimate) warn("EMPTY_ESTIMATE", "the answer is empty; precision is reported as 0");
      if (json_output()) {
        out_ << dump_json(list_score_to_json(s));
      } else {
        out_ << "precision: " << s.precision << (s.empty_estimate ? " (empty answer)" : "") << "\n"
             << "recall: " << s.recall << "\nf-measure: " << s.f_measure << "\n";
      }
    } else {
      auto s = score_ranking(load(answer, "ranking"), load(truth, "ranking"));
      if (json_output()) {
        out_ << dump_json(rank_score_to_json(s));
      } else {
        out_ << "kendall tau distance: " << s.tau_distance << " (" << s.discordant_pairs << " of "
             << s.total_pairs << " pairs discordant)\n";
      }
    }
    return finish();
  }

  int export_dot_file(const std::string& bdg_path, const std::string& out_path) {
    Bdg bdg = load_bdg(bdg_path);
    std::string dot = export_dot(bdg);
    if (out_path.empty() || out_path == "-") {
      out_ << dot;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f || !(f << dot)) throw Error("IoError", "cannot write " + out_path);
    }
    return finish();
  }

  Common common;

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::set<std::uint32_t> legend_;
  bool warned_ = false;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "human"}));
  sub->add_flag("--strict", common.strict, "Exit with status 1 when warnings were reported");
  sub->add_flag("-v,--verbose", common.verbosity, "Print every warning");
}

void add_change_input(CLI::App* sub, ChangeInput& in) {
  sub->add_option("--diff", in.diff, "Unified diff file ('-' for standard input)");
  sub->add_option("--files", in.files, "Changed files, relative to the project root");
  sub->add_option("--file-list", in.file_list, "File with one changed path per line");
  sub->add_option("--strip", in.strip, "Leading path components to drop from diff paths")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--id", in.id, "Label for the change set");
}

void add_patch_input(CLI::App* sub, PatchInput& in) {
  sub->add_option("--patch", in.diffs, "Patch as ID=DIFF_FILE");
  sub->add_option("--patch-files", in.file_lists, "Patch as ID=FILE_LIST");
  sub->add_option("--strip", in.strip, "Leading path components to drop from diff paths")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Configuration-aware change exposure analysis for CMake projects", "cmexpose"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CMEXPOSE_VERSION);

  Runner runner(out, err);
  Common& common = runner.common;

  std::string project_dir, out_path, bdg_path, by = "deliverables", deliverable;
  std::string mode, answer, truth;
  std::vector<std::string> defines;
  bool partial = false, all_configs = false;
  std::size_t path_cap = kDefaultPathCap;
  ChangeInput change_in;
  PatchInput patch_in;

  auto* analyze = app.add_subcommand("analyze", "Build the dependency graph of a project");
  analyze->add_option("project_dir", project_dir, "Directory holding the root CMakeLists.txt")
      ->required();
  analyze->add_option("-o,--out", out_path, "Where to write the graph JSON");
  add_common(analyze, common);

  auto add_assignment = [&](CLI::App* sub) {
    sub->add_option("-D", defines, "Option value as NAME=VALUE")->allow_extra_args(false);
    sub->add_flag("--partial", partial, "Leave options without -D unassigned instead of defaulted");
  };

  auto* impact = app.add_subcommand("impact", "List deliverables impacted by a change");
  impact->add_option("--bdg", bdg_path, "Graph JSON written by analyze")->required();
  add_change_input(impact, change_in);
  add_assignment(impact);
  impact->add_flag("--all-configs", all_configs, "Report propagation conditions instead");
  add_common(impact, common);

  auto* paths = app.add_subcommand("paths", "Dependency paths from deliverables to changed files");
  paths->add_option("--bdg", bdg_path, "Graph JSON written by analyze")->required();
  add_change_input(paths, change_in);
  paths->add_option("--path-cap", path_cap, "Paths listed per deliverable and file");
  add_common(paths, common);

  auto* rank = app.add_subcommand("rank", "Rank patches by exposure");
  rank->add_option("--bdg", bdg_path, "Graph JSON written by analyze")->required();
  add_patch_input(rank, patch_in);
  rank->add_option("--by", by, "Ranking key")
      ->required()
      ->check(CLI::IsMember({"deliverables", "variants"}));
  add_assignment(rank);
  add_common(rank, common);

  auto* filter = app.add_subcommand("filter", "Patches that affect a deliverable or a variant");
  filter->add_option("--bdg", bdg_path, "Graph JSON written by analyze")->required();
  add_patch_input(filter, patch_in);
  filter->add_option("--deliverable", deliverable, "Target deliverable id");
  add_assignment(filter);
  add_common(filter, common);

  auto* score = app.add_subcommand("score", "Score an answer against ground truth");
  score->add_option("--mode", mode, "list or rank")
      ->required()
      ->check(CLI::IsMember({"list", "rank"}));
  score->add_option("--answer", answer, "JSON answer file")->required();
  score->add_option("--truth", truth, "JSON ground-truth file")->required();
  add_common(score, common);

  auto* dot = app.add_subcommand("export-dot", "Render the graph in DOT");
  dot->add_option("--bdg", bdg_path, "Graph JSON written by analyze")->required();
  dot->add_option("-o,--out", out_path, "Output file (standard output by default)");
  add_common(dot, common);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("cmexpose");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return runner.analyze(project_dir, out_path);
    if (*impact) return runner.impact(bdg_path, change_in, defines, partial, all_configs);
    if (*paths) return runner.paths(bdg_path, change_in, path_cap);
    if (*rank) return runner.rank(bdg_path, patch_in, by, defines, partial);
    if (*filter) return runner.filter(bdg_path, patch_in, deliverable, defines, partial);
    if (*score) return runner.score(mode, answer, truth);
    if (*dot) return runner.export_dot_file(bdg_path, out_path);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace cmexpose
