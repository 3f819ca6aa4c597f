#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cmexpose {

/// Precision and recall of an estimated set (EID) against the actual one (AID).
struct ListScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t eid_size = 0;
  std::size_t aid_size = 0;
  std::size_t intersection_size = 0;
  /// Set when the estimate was empty and precision was defined as 0.
  bool empty_estimate = false;
};

struct RankScore {
  double tau_distance = 0.0;
  std::size_t discordant_pairs = 0;
  std::size_t total_pairs = 0;
};

/// Duplicate ids count once. Throws Error("EmptyGroundTruth") when `aid` is
/// empty.
ListScore score_list(const std::vector<std::string>& eid, const std::vector<std::string>& aid);

/// Normalized Kendall tau distance. Throws Error("NotAPermutation") when the
/// lists differ as sets or repeat an id, Error("TooShort") below two items.
RankScore score_ranking(const std::vector<std::string>& estimate,
                        const std::vector<std::string>& truth);

}  // namespace cmexpose
