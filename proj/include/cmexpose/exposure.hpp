#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cmexpose/bdg.hpp"
#include "cmexpose/condition.hpp"
#include "cmexpose/condition_analysis.hpp"
#include "cmexpose/config.hpp"

namespace cmexpose {

inline constexpr std::size_t kDefaultPathCap = 100;

/// One patch: its label and the files it touches.
struct ChangeSet {
  std::string id;
  std::vector<std::string> changed_files;  // normalized, sorted, unique

  /// Normalizes, sorts and deduplicates `files`. Throws
  /// Error("InvalidChangeSet") for an empty id.
  static ChangeSet make(std::string id, const std::vector<std::string>& files);
};

struct DependencyPath {
  std::vector<std::string> nodes;  // deliverable ... source file
  Condition guard;                 // exists(deliverable) and every edge guard
};

struct PathEntry {
  std::string deliverable;
  std::vector<DependencyPath> paths;  // shortest first, at most path_cap
  bool truncated = false;
  /// Disjunction over every path, including those not listed.
  Condition aggregate_guard;
};

struct PathObject {
  std::string changed_file;
  std::vector<PathEntry> entries;  // sorted by deliverable id
};

std::vector<PathObject> paths_for_change(const Bdg& bdg, const ChangeSet& changes,
                                         std::size_t path_cap = kDefaultPathCap);

struct DeliverableImpact {
  std::string deliverable;
  Tristate impacted = Tristate::no;
  Condition guard;
  VariantCount variants;
};

struct ExposureReport {
  std::string changeset_id;
  ConfigurationAssignment assignment;
  std::vector<DeliverableImpact> deliverables;  // every deliverable, sorted by id

  std::vector<std::string> with(Tristate value) const;
};

ExposureReport impacted_deliverables(const Bdg& bdg, const ChangeSet& changes,
                                     const ConfigurationAssignment& assignment);

/// Condition under which `changes` reach `deliverable`, in canonical DNF when
/// it fits the clause cap. Throws Error("UnknownDeliverable").
Condition propagation_conditions(const Bdg& bdg, const ChangeSet& changes,
                                 const std::string& deliverable);

enum class RankKey { deliverable_count, variant_count };

struct RankedPatch {
  std::string id;
  std::uint64_t score = 0;
  bool exact = true;  // variant counts over opaque options are estimates
};

/// Highest score first; equal scores in ascending id order. The assignment
/// only matters for deliverable_count.
std::vector<RankedPatch> rank_patches(const Bdg& bdg, const std::vector<ChangeSet>& patches,
                                      RankKey key,
                                      const ConfigurationAssignment& assignment = {});

/// Patches that can reach `deliverable` under some configuration, in input
/// order. Throws Error("UnknownDeliverable").
std::vector<std::string> filter_patches_by_deliverable(const Bdg& bdg,
                                                       const std::vector<ChangeSet>& patches,
                                                       const std::string& deliverable);

/// Patches impacting at least one deliverable in the variant fixed by
/// `assignment` (unassigned options take their defaults), in input order.
std::vector<std::string> filter_patches_by_variant(const Bdg& bdg,
                                                   const std::vector<ChangeSet>& patches,
                                                   const ConfigurationAssignment& assignment);

}  // namespace cmexpose
