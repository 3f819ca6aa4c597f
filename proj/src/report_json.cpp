#include "cmexpose/report_json.hpp"

namespace cmexpose {

using nlohmann::json;

namespace {

constexpr const char* kVariantDefinition =
    "a variant is one assignment of the options mentioned in a guard; boolean options range "
    "over ON and OFF, enumerated options over their values; counts involving opaque options "
    "or opaque predicates are marked inexact";

constexpr const char* kRankingVariantDefinition =
    "a variant is one assignment of the options mentioned by the guard of any ranked patch, so "
    "scores are comparable across patches; boolean options range over ON and OFF, enumerated "
    "options over their values; counts involving opaque options or opaque predicates are "
    "marked inexact";

json variants_to_json(const VariantCount& v) {
  return json{{"count", v.count}, {"exact", v.exact}};
}

json header(const char* kind) { return json{{"schema_version", kReportSchemaVersion}, {"kind", kind}}; }

}  // namespace

json assignment_to_json(const ConfigurationAssignment& assignment) {
  json values = json::object();
  for (const auto& [k, v] : assignment.values) values[k] = v;
  return json{{"values", values}, {"total", assignment.total}};
}

json paths_to_json(const std::vector<PathObject>& objects) {
  json out = header("paths");
  json list = json::array();
  for (const auto& po : objects) {
    json entries = json::array();
    for (const auto& e : po.entries) {
      json paths = json::array();
      for (const auto& p : e.paths) paths.push_back(json{{"nodes", p.nodes}, {"guard", p.guard.key()}});
      entries.push_back(json{{"deliverable", e.deliverable},
                             {"aggregate_guard", e.aggregate_guard.key()},
                             {"truncated", e.truncated},
                             {"paths", paths}});
    }
    list.push_back(json{{"changed_file", po.changed_file}, {"entries", entries}});
  }
  out["path_objects"] = list;
  return out;
}

json report_to_json(const ExposureReport& report) {
  json out = header("impact");
  out["changeset"] = report.changeset_id;
  out["assignment"] = assignment_to_json(report.assignment);
  out["variant_definition"] = kVariantDefinition;
  json deliverables = json::array();
  for (const auto& d : report.deliverables) {
    deliverables.push_back(json{{"id", d.deliverable},
                                {"impacted", to_string(d.impacted)},
                                {"guard", d.guard.key()},
                                {"variant_count", variants_to_json(d.variants)}});
  }
  out["deliverables"] = deliverables;
  out["impacted"] = json{{"yes", report.with(Tristate::yes)},
                         {"no", report.with(Tristate::no)},
                         {"unknown", report.with(Tristate::unknown)}};
  return out;
}

json propagation_to_json(const Bdg& bdg, const ChangeSet& changes) {
  json out = header("propagation");
  out["changeset"] = changes.id;
  out["variant_definition"] = kVariantDefinition;
  json deliverables = json::array();
  for (const BdgNode* d : bdg.deliverables()) {
    Condition c = propagation_conditions(bdg, changes, d->id);
    deliverables.push_back(json{{"id", d->id},
                                {"condition", c.key()},
                                {"variant_count", variants_to_json(count_variants(c, bdg.options))}});
  }
  out["deliverables"] = deliverables;
  return out;
}

json ranking_to_json(const std::vector<RankedPatch>& ranking, RankKey key,
                     const ConfigurationAssignment& assignment) {
  json out = header("ranking");
  if (key == RankKey::deliverable_count) {
    out["key"] = "deliverable_count";
    out["assignment"] = assignment_to_json(assignment);
  } else {
    out["key"] = "variant_count";
    out["variant_definition"] = kRankingVariantDefinition;
  }
  json list = json::array();
  for (const auto& r : ranking) list.push_back(json{{"id", r.id}, {"score", r.score}, {"exact", r.exact}});
  out["ranking"] = list;
  return out;
}

json list_score_to_json(const ListScore& s) {
  json out = header("list_score");
  out["precision"] = s.precision;
  out["recall"] = s.recall;
  out["f_measure"] = s.f_measure;
  out["eid_size"] = s.eid_size;
  out["aid_size"] = s.aid_size;
  out["intersection_size"] = s.intersection_size;
  out["empty_estimate"] = s.empty_estimate;
  return out;
}

json rank_score_to_json(const RankScore& s) {
  json out = header("rank_score");
  out["tau_distance"] = s.tau_distance;
  out["discordant_pairs"] = s.discordant_pairs;
  out["total_pairs"] = s.total_pairs;
  return out;
}

json warnings_to_json(const WarningList& warnings) {
  json list = json::array();
  for (const auto& w : warnings) {
    json j{{"code", w.code}, {"message", w.message}};
    if (w.span) {
      j["span"] = json{{"file", w.span->file_path}, {"line", w.span->line}, {"column", w.span->column}};
    }
    list.push_back(j);
  }
  return list;
}

std::string dump_json(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace cmexpose
