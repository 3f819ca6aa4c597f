#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmexpose/bdg.hpp"
#include "cmexpose/change_ingest.hpp"
#include "cmexpose/exposure.hpp"
#include "cmexpose/report_json.hpp"
#include "cmexpose/scoring.hpp"

namespace py = pybind11;
using namespace cmexpose;

namespace {

ConfigurationAssignment make_assignment(const std::map<std::string, std::string>& values,
                                        bool total) {
  ConfigurationAssignment a;
  a.values = values;
  a.total = total;
  return a;
}

std::vector<ChangeSet> make_patches(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& patches) {
  std::vector<ChangeSet> out;
  for (const auto& [id, files] : patches) out.push_back(ChangeSet::make(id, files));
  return out;
}

}  // namespace

PYBIND11_MODULE(_cmexpose, m) {
  m.doc() = "Native core of cmexpose; use the cmexpose package instead.";
  m.attr("__version__") = CMEXPOSE_VERSION;

  static py::exception<Error> error_type(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(e.what());
    }
  });

  py::class_<Bdg>(m, "Graph")
      .def_static("load", &load_bdg, py::arg("path"))
      .def_static("from_json", &load_bdg_string, py::arg("text"))
      .def("save", &save_bdg, py::arg("path"))
      .def("to_json", &save_bdg_string)
      .def("export_dot", &export_dot)
      .def("deliverables",
           [](const Bdg& g) {
             std::vector<std::string> ids;
             for (const auto* d : g.deliverables()) ids.push_back(d->id);
             return ids;
           })
      .def_property_readonly("node_count", [](const Bdg& g) { return g.nodes.size(); })
      .def_property_readonly("edge_count", [](const Bdg& g) { return g.edges.size(); })
      .def("__eq__", [](const Bdg& a, const Bdg& b) { return a == b; });

  m.def(
      "analyze",
      [](const std::string& root) {
        WarningList warnings;
        Bdg g = analyze_project(root, warnings);
        return std::make_pair(std::move(g), warnings_to_json(warnings).dump());
      },
      py::arg("root"));

  m.def(
      "impact_json",
      [](const Bdg& g, const std::vector<std::string>& files,
         const std::map<std::string, std::string>& values, bool total, const std::string& id) {
        return report_to_json(impacted_deliverables(g, ChangeSet::make(id, files),
                                                    make_assignment(values, total)))
            .dump();
      },
      py::arg("graph"), py::arg("files"), py::arg("values"), py::arg("total"), py::arg("id"));

  m.def(
      "propagation_condition",
      [](const Bdg& g, const std::vector<std::string>& files, const std::string& deliverable) {
        return propagation_conditions(g, ChangeSet::make("change", files), deliverable).key();
      },
      py::arg("graph"), py::arg("files"), py::arg("deliverable"));

  m.def(
      "paths_json",
      [](const Bdg& g, const std::vector<std::string>& files, std::size_t cap) {
        return paths_to_json(paths_for_change(g, ChangeSet::make("change", files), cap)).dump();
      },
      py::arg("graph"), py::arg("files"), py::arg("cap") = kDefaultPathCap);

  m.def(
      "rank_json",
      [](const Bdg& g, const std::vector<std::pair<std::string, std::vector<std::string>>>& patches,
         const std::string& key, const std::map<std::string, std::string>& values, bool total) {
        RankKey k = key == "variants" ? RankKey::variant_count : RankKey::deliverable_count;
        auto a = make_assignment(values, total);
        return ranking_to_json(rank_patches(g, make_patches(patches), k, a), k, a).dump();
      },
      py::arg("graph"), py::arg("patches"), py::arg("key"), py::arg("values"), py::arg("total"));

  m.def(
      "filter_by_deliverable",
      [](const Bdg& g, const std::vector<std::pair<std::string, std::vector<std::string>>>& patches,
         const std::string& deliverable) {
        return filter_patches_by_deliverable(g, make_patches(patches), deliverable);
      },
      py::arg("graph"), py::arg("patches"), py::arg("deliverable"));

  m.def(
      "filter_by_variant",
      [](const Bdg& g, const std::vector<std::pair<std::string, std::vector<std::string>>>& patches,
         const std::map<std::string, std::string>& values) {
        return filter_patches_by_variant(g, make_patches(patches), make_assignment(values, true));
      },
      py::arg("graph"), py::arg("patches"), py::arg("values"));

  m.def(
      "parse_diff",
      [](const std::string& text, std::optional<int> strip) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& e : parse_unified_diff(text, DiffOptions{strip}).entries) {
          out.emplace_back(e.old_path, e.new_path, to_string(e.status));
        }
        return out;
      },
      py::arg("text"), py::arg("strip") = std::nullopt);

  m.def(
      "diff_files",
      [](const std::string& text, std::optional<int> strip) {
        return to_changeset(parse_unified_diff(text, DiffOptions{strip}), "diff").changed_files;
      },
      py::arg("text"), py::arg("strip") = std::nullopt);

  m.def(
      "score_list_json",
      [](const std::vector<std::string>& eid, const std::vector<std::string>& aid) {
        return list_score_to_json(score_list(eid, aid)).dump();
      },
      py::arg("eid"), py::arg("aid"));

  m.def(
      "score_ranking_json",
      [](const std::vector<std::string>& estimate, const std::vector<std::string>& truth) {
        return rank_score_to_json(score_ranking(estimate, truth)).dump();
      },
      py::arg("estimate"), py::arg("truth"));
}
