#include "cmexpose/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

using cmexpose::run_cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fig1() { return std::string(CMEXPOSE_FIXTURES) + "/fig1"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cmexpose_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    bdg_ = (dir_ / "g.json").string();
    ASSERT_EQ(cli({"analyze", fig1(), "-o", bdg_}).code, 0);
  }

  std::string write(const std::string& name, const std::string& text) {
    fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  fs::path dir_;
  std::string bdg_;
};

}  // namespace

TEST_F(Cli, AnalyzeReportsJson) {
  auto r = cli({"analyze", fig1(), "-o", (dir_ / "h.json").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["kind"], "analysis");
  EXPECT_EQ(j["node_count"], 5);
  EXPECT_EQ(j["edge_count"], 4);
  EXPECT_EQ(j["deliverables"], json::array({"etl"}));
  EXPECT_TRUE(j["warning_summary"].empty());
}

TEST_F(Cli, ImpactUnderAssignments) {
  auto off = cli({"impact", "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "-D", "FEATURE_CURL=OFF",
                  "--format", "json"});
  ASSERT_EQ(off.code, 0) << off.err;
  auto j = json::parse(off.out);
  EXPECT_EQ(j["impacted"]["no"], json::array({"etl"}));
  EXPECT_EQ(j["assignment"]["values"]["FEATURE_CURL"], "OFF");

  auto def = json::parse(cli({"impact", "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "--format", "json"}).out);
  EXPECT_EQ(def["impacted"]["yes"], json::array({"etl"}));
  auto partial = json::parse(
      cli({"impact", "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "--partial", "--format", "json"}).out);
  EXPECT_EQ(partial["impacted"]["unknown"], json::array({"etl"}));

  auto all = json::parse(
      cli({"impact", "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "--all-configs", "--format", "json"}).out);
  EXPECT_EQ(all["kind"], "propagation");
  EXPECT_EQ(all["deliverables"][0]["condition"], "FEATURE_CURL");
}

TEST_F(Cli, ImpactFromDiffAndFileList) {
  std::string diff = write("p.diff",
                           "diff --git a/src/client/cl_main.c b/src/client/cl_main.c\n"
                           "--- a/src/client/cl_main.c\n+++ b/src/client/cl_main.c\n"
                           "@@ -1 +1 @@\n-a\n+b\n");
  auto r = cli({"impact", "--bdg", bdg_, "--diff", diff, "-D", "FEATURE_CURL=OFF", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["impacted"]["yes"], json::array({"etl"}));

  std::string list = write("files.txt", "# changed\nsrc/qcommon/dl_main_curl.c\n");
  auto l = cli({"impact", "--bdg", bdg_, "--file-list", list, "--id", "mine", "--format", "json"});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_EQ(json::parse(l.out)["changeset"], "mine");
}

TEST_F(Cli, PathsOutput) {
  auto r = cli({"paths", "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  const auto& entry = j["path_objects"][0]["entries"][0];
  EXPECT_EQ(entry["deliverable"], "etl");
  EXPECT_EQ(entry["paths"][0]["nodes"], json::array({"etl", "src/qcommon/dl_main_curl.c"}));
  EXPECT_EQ(entry["paths"][0]["guard"], "FEATURE_CURL");
}

TEST_F(Cli, RankAndFilter) {
  std::string a = write("a.txt", "src/client/cl_main.c\n");
  std::string b = write("b.txt", "src/qcommon/dl_main_curl.c\n");
  auto rank = cli({"rank", "--bdg", bdg_, "--patch-files", "b=" + b, "a=" + a, "--by", "variants", "--format", "json"});
  ASSERT_EQ(rank.code, 0) << rank.err;
  auto j = json::parse(rank.out);
  EXPECT_EQ(j["ranking"][0]["id"], "a");
  EXPECT_EQ(j["ranking"][0]["score"], 2);
  EXPECT_EQ(j["ranking"][1]["score"], 1);

  auto filter = cli({"filter", "--bdg", bdg_, "--patch-files", "b=" + b, "a=" + a, "-D", "FEATURE_CURL=OFF",
                     "--format", "json"});
  ASSERT_EQ(filter.code, 0) << filter.err;
  EXPECT_EQ(json::parse(filter.out)["patches"], json::array({"a"}));

  auto empty = cli({"rank", "--bdg", bdg_, "--by", "deliverables", "--format", "json"});
  ASSERT_EQ(empty.code, 0) << empty.err;
  EXPECT_TRUE(json::parse(empty.out)["ranking"].empty());
}

TEST_F(Cli, Score) {
  std::string answer = write("answer.json", R"({"deliverables": ["a", "b"], "ranking": ["a", "c", "b"]})");
  std::string truth = write("truth.json", R"({"deliverables": ["b", "c"], "ranking": ["a", "b", "c"]})");
  auto list = cli({"score", "--mode", "list", "--answer", answer, "--truth", truth, "--format", "json"});
  ASSERT_EQ(list.code, 0) << list.err;
  EXPECT_NEAR(json::parse(list.out)["precision"].get<double>(), 0.5, 1e-12);
  auto rank = cli({"score", "--mode", "rank", "--answer", answer, "--truth", truth, "--format", "json"});
  ASSERT_EQ(rank.code, 0) << rank.err;
  EXPECT_NEAR(json::parse(rank.out)["tau_distance"].get<double>(), 1.0 / 3.0, 1e-12);
}

TEST_F(Cli, ExportDot) {
  auto r = cli({"export-dot", "--bdg", bdg_});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[label=\"FEATURE_CURL\"]"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"impact", "--bdg", bdg_}).code, 2);  // no change input
  EXPECT_EQ(cli({"rank", "--bdg", bdg_}).code, 2);    // --by is required
  EXPECT_EQ(cli({"impact", "--bdg", bdg_, "--files", "x.c", "-D", "NOEQUALS"}).code, 2);
  EXPECT_EQ(cli({"analyze", (dir_ / "nowhere").string()}).code, 3);
  EXPECT_EQ(cli({"impact", "--bdg", (dir_ / "missing.json").string(), "--files", "x.c"}).code, 3);
  EXPECT_EQ(cli({"impact", "--bdg", bdg_, "--diff", write("bad.diff", "not a diff\n")}).code, 3);
  EXPECT_EQ(cli({"filter", "--bdg", bdg_, "--deliverable", "nope"}).code, 3);
  EXPECT_EQ(cli({"impact", "--bdg", write("corrupt.json", "{\"schema_version\": 1}"), "--files", "x.c"}).code, 3);
  EXPECT_EQ(cli({"analyze", write("broken/CMakeLists.txt", "if(X)\n")}).code, 3);  // not a directory
  EXPECT_EQ(cli({"analyze", (dir_ / "broken").string()}).code, 3);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, StrictTurnsWarningsIntoStatusOne) {
  write("warned/CMakeLists.txt", "add_executable(x a.c)\ninstall(TARGETS x)\n");
  std::string project = (dir_ / "warned").string();
  auto plain = cli({"analyze", project, "-o", (dir_ / "w.json").string()});
  EXPECT_EQ(plain.code, 0);
  EXPECT_NE(plain.out.find("UNSUPPORTED_COMMAND: 1"), std::string::npos);
  EXPECT_EQ(cli({"analyze", project, "-o", (dir_ / "w.json").string(), "--strict"}).code, 1);
  EXPECT_EQ(cli({"analyze", fig1(), "-o", (dir_ / "f.json").string(), "--strict"}).code, 0);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  std::string again = (dir_ / "again.json").string();
  ASSERT_EQ(cli({"analyze", fig1(), "-o", again}).code, 0);
  std::ifstream x(bdg_, std::ios::binary), y(again, std::ios::binary);
  std::stringstream sx, sy;
  sx << x.rdbuf();
  sy << y.rdbuf();
  EXPECT_EQ(sx.str(), sy.str());

  for (const char* cmd : {"impact", "paths"}) {
    std::vector<std::string> args{cmd, "--bdg", bdg_, "--files", "src/qcommon/dl_main_curl.c", "src/client/cl_main.c",
                                  "--format", "json"};
    auto first = cli(args);
    ASSERT_EQ(first.code, 0);
    EXPECT_EQ(first.out, cli(args).out);
  }
}
