#include "cmexpose/scoring.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

ListScore score_list(const std::vector<std::string>& eid, const std::vector<std::string>& aid) {
  std::set<std::string> estimated(eid.begin(), eid.end());
  std::set<std::string> actual(aid.begin(), aid.end());
  if (actual.empty()) throw Error("EmptyGroundTruth", "the actual impacted set is empty");

  ListScore s;
  s.eid_size = estimated.size();
  s.aid_size = actual.size();
  for (const auto& id : estimated) s.intersection_size += actual.count(id);
  s.recall = static_cast<double>(s.intersection_size) / static_cast<double>(s.aid_size);
  if (estimated.empty()) {
    s.empty_estimate = true;
    s.precision = 0.0;
  } else {
    s.precision = static_cast<double>(s.intersection_size) / static_cast<double>(s.eid_size);
  }
  double sum = s.precision + s.recall;
  s.f_measure = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

RankScore score_ranking(const std::vector<std::string>& estimate,
                        const std::vector<std::string>& truth) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!position.emplace(truth[i], i).second) {
      throw Error("NotAPermutation", "ground truth repeats '" + truth[i] + "'");
    }
  }
  if (estimate.size() != truth.size()) {
    throw Error("NotAPermutation", "rankings have different lengths");
  }
  std::vector<std::size_t> ranks;
  std::set<std::string> seen;
  for (const auto& id : estimate) {
    auto it = position.find(id);
    if (it == position.end()) throw Error("NotAPermutation", "'" + id + "' is not ranked in the truth");
    if (!seen.insert(id).second) throw Error("NotAPermutation", "estimate repeats '" + id + "'");
    ranks.push_back(it->second);
  }
  if (truth.size() < 2) throw Error("TooShort", "a ranking needs at least two items");

  RankScore s;
  std::size_t n = ranks.size();
  s.total_pairs = n * (n - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ranks[i] > ranks[j]) ++s.discordant_pairs;
    }
  }
  s.tau_distance = static_cast<double>(s.discordant_pairs) / static_cast<double>(s.total_pairs);
  return s;
}

}  // namespace cmexpose
