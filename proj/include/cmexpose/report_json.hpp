#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmexpose/diagnostics.hpp"
#include "cmexpose/exposure.hpp"
#include "cmexpose/scoring.hpp"

namespace cmexpose {

/// Version of the query payloads below; the BDG file has its own.
inline constexpr int kReportSchemaVersion = 1;

nlohmann::json assignment_to_json(const ConfigurationAssignment& assignment);
nlohmann::json paths_to_json(const std::vector<PathObject>& objects);
nlohmann::json report_to_json(const ExposureReport& report);
/// Per-deliverable propagation condition and variant count of `changes`.
nlohmann::json propagation_to_json(const Bdg& bdg, const ChangeSet& changes);
nlohmann::json ranking_to_json(const std::vector<RankedPatch>& ranking, RankKey key,
                               const ConfigurationAssignment& assignment);
nlohmann::json list_score_to_json(const ListScore& score);
nlohmann::json rank_score_to_json(const RankScore& score);
nlohmann::json warnings_to_json(const WarningList& warnings);

/// Two-space indented text with a trailing newline. Keys come out sorted.
std::string dump_json(const nlohmann::json& j);

}  // namespace cmexpose
