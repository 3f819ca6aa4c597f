#include "cmexpose/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cmexpose/diagnostics.hpp"

using namespace cmexpose;

namespace {

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

// Pair enumeration straight from the definition, as the oracle.
double tau_by_pairs(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  auto pos = [](const std::vector<std::string>& v, const std::string& id) {
    return std::find(v.begin(), v.end(), id) - v.begin();
  };
  std::size_t discordant = 0, total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++total;
      bool in_x = pos(x, x[i]) < pos(x, x[j]);
      bool in_y = pos(y, x[i]) < pos(y, x[j]);
      if (in_x != in_y) ++discordant;
    }
  }
  return static_cast<double>(discordant) / static_cast<double>(total);
}

}  // namespace

TEST(ScoreList, Identity) {
  auto s = score_list({"a", "b"}, {"a", "b"});
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.f_measure, 1.0);
  EXPECT_FALSE(s.empty_estimate);
}

TEST(ScoreList, HalfOverlap) {
  auto s = score_list({"a", "b"}, {"b", "c"});
  EXPECT_NEAR(s.precision, 0.5, 1e-12);
  EXPECT_NEAR(s.recall, 0.5, 1e-12);
  EXPECT_NEAR(s.f_measure, 0.5, 1e-12);
  EXPECT_EQ(s.intersection_size, 1u);
  EXPECT_EQ(s.eid_size, 2u);
  EXPECT_EQ(s.aid_size, 2u);
}

TEST(ScoreList, EmptyEstimateIsFlagged) {
  auto s = score_list({}, {"a"});
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f_measure, 0.0);
  EXPECT_TRUE(s.empty_estimate);
}

TEST(ScoreList, EmptyTruthRejected) {
  EXPECT_EQ(error_kind([] { score_list({"a"}, {}); }), "EmptyGroundTruth");
}

TEST(ScoreList, DuplicatesCountOnce) {
  auto s = score_list({"a", "a", "b"}, {"a"});
  EXPECT_EQ(s.eid_size, 2u);
  EXPECT_NEAR(s.precision, 0.5, 1e-12);
}

TEST(ScoreList, RandomSetsMatchFormulasAndRelabeling) {
  std::mt19937_64 rng(7);
  std::vector<std::string> alphabet{"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int round = 0; round < 500; ++round) {
    std::vector<std::string> eid, aid;
    for (const auto& id : alphabet) {
      if (rng() % 2) eid.push_back(id);
      if (rng() % 2) aid.push_back(id);
    }
    if (aid.empty()) aid.push_back("a");
    auto s = score_list(eid, aid);

    std::set<std::string> e(eid.begin(), eid.end()), a(aid.begin(), aid.end()), both;
    std::set_intersection(e.begin(), e.end(), a.begin(), a.end(), std::inserter(both, both.end()));
    double p = e.empty() ? 0.0 : double(both.size()) / double(e.size());
    double r = double(both.size()) / double(a.size());
    double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    EXPECT_NEAR(s.precision, p, 1e-12);
    EXPECT_NEAR(s.recall, r, 1e-12);
    EXPECT_NEAR(s.f_measure, f, 1e-12);
    EXPECT_LE(s.f_measure, (s.precision + s.recall) / 2 + 1e-12);
    EXPECT_LE(s.intersection_size, std::min(s.eid_size, s.aid_size));

    std::vector<std::string> relabeled = alphabet;
    std::shuffle(relabeled.begin(), relabeled.end(), rng);
    auto map = [&](std::vector<std::string> v) {
      for (auto& id : v) id = relabeled[std::find(alphabet.begin(), alphabet.end(), id) - alphabet.begin()];
      return v;
    };
    auto t = score_list(map(eid), map(aid));
    EXPECT_EQ(t.precision, s.precision);
    EXPECT_EQ(t.recall, s.recall);
    EXPECT_EQ(t.f_measure, s.f_measure);
  }
}

TEST(ScoreRanking, Identical) {
  auto s = score_ranking({"a", "b", "c"}, {"a", "b", "c"});
  EXPECT_EQ(s.tau_distance, 0.0);
  EXPECT_EQ(s.total_pairs, 3u);
}

TEST(ScoreRanking, Reversed) {
  auto s = score_ranking({"c", "b", "a"}, {"a", "b", "c"});
  EXPECT_EQ(s.tau_distance, 1.0);
  EXPECT_EQ(s.discordant_pairs, 3u);
}

TEST(ScoreRanking, OneSwap) {
  auto s = score_ranking({"a", "c", "b"}, {"a", "b", "c"});
  EXPECT_NEAR(s.tau_distance, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(s.discordant_pairs, 1u);
}

TEST(ScoreRanking, Errors) {
  EXPECT_EQ(error_kind([] { score_ranking({"a"}, {"a"}); }), "TooShort");
  EXPECT_EQ(error_kind([] { score_ranking({"a", "b"}, {"a", "c"}); }), "NotAPermutation");
  EXPECT_EQ(error_kind([] { score_ranking({"a", "a"}, {"a", "b"}); }), "NotAPermutation");
  EXPECT_EQ(error_kind([] { score_ranking({"a", "b"}, {"a", "b", "c"}); }), "NotAPermutation");
  EXPECT_EQ(error_kind([] { score_ranking({"a", "b"}, {"b", "b"}); }), "NotAPermutation");
}

TEST(ScoreRanking, RandomPermutationsAgainstPairEnumeration) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 2 + rng() % 9;
    std::vector<std::string> truth;
    for (std::size_t i = 0; i < n; ++i) truth.push_back("p" + std::to_string(i));
    auto estimate = truth;
    std::shuffle(estimate.begin(), estimate.end(), rng);

    auto s = score_ranking(estimate, truth);
    EXPECT_NEAR(s.tau_distance, tau_by_pairs(estimate, truth), 1e-12);
    EXPECT_EQ(s.total_pairs, n * (n - 1) / 2);
    EXPECT_EQ(s.tau_distance, score_ranking(truth, estimate).tau_distance);
    EXPECT_EQ(s.tau_distance == 0.0, estimate == truth);
    auto reversed = truth;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_EQ(s.tau_distance == 1.0, estimate == reversed);
  }
}
