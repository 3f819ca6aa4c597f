#include "cmexpose/change_ingest.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmexpose;

namespace {

std::size_t malformed_line(const std::string& text) {
  try {
    parse_unified_diff(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "MalformedDiff");
    return e.span() ? e.span()->line : 0;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return 0;
}

}  // namespace

TEST(Diff, MinimalGitDiff) {
  const char* text =
      "diff --git a/src/a.c b/src/a.c\n"
      "index 83db48f..bf269f4 100644\n"
      "--- a/src/a.c\n"
      "+++ b/src/a.c\n"
      "@@ -1,3 +1,3 @@\n"
      " int x;\n"
      "-int y;\n"
      "+int z;\n"
      " int w;\n";
  auto doc = parse_unified_diff(text);
  ASSERT_EQ(doc.entries.size(), 1u);
  EXPECT_EQ(doc.entries[0], (DiffEntry{"src/a.c", "src/a.c", FileStatus::modified}));
  EXPECT_EQ(to_changeset(doc, "p").changed_files, std::vector<std::string>{"src/a.c"});
}

TEST(Diff, RenameAddDelete) {
  const char* text =
      "diff --git a/old.c b/new.c\n"
      "similarity index 90%\n"
      "rename from old.c\n"
      "rename to new.c\n"
      "diff --git a/added.c b/added.c\n"
      "new file mode 100644\n"
      "--- /dev/null\n"
      "+++ b/added.c\n"
      "@@ -0,0 +1 @@\n"
      "+int a;\n"
      "diff --git a/gone.c b/gone.c\n"
      "deleted file mode 100644\n"
      "--- a/gone.c\n"
      "+++ /dev/null\n"
      "@@ -1 +0,0 @@\n"
      "-int g;\n";
  auto doc = parse_unified_diff(text);
  ASSERT_EQ(doc.entries.size(), 3u);
  EXPECT_EQ(doc.entries[0], (DiffEntry{"old.c", "new.c", FileStatus::renamed}));
  EXPECT_EQ(doc.entries[1], (DiffEntry{"", "added.c", FileStatus::added}));
  EXPECT_EQ(doc.entries[2], (DiffEntry{"gone.c", "", FileStatus::deleted}));
  EXPECT_EQ(to_changeset(doc, "p").changed_files,
            (std::vector<std::string>{"added.c", "gone.c", "new.c", "old.c"}));
}

TEST(Diff, PlainDiffWithTimestamps) {
  const char* text =
      "--- src/x.c\t2020-01-01 00:00:00.000000000 +0000\n"
      "+++ src/x.c\t2020-01-02 00:00:00.000000000 +0000\n"
      "@@ -1 +1 @@\n"
      "-a\n"
      "+b\n"
      "--- lib/y.c\n"
      "+++ lib/y.c\n"
      "@@ -1,2 +1,2 @@\n"
      " a\n"
      "-b\n"
      "+c\n"
      "\\ No newline at end of file\n";
  auto doc = parse_unified_diff(text);
  ASSERT_EQ(doc.entries.size(), 2u);
  EXPECT_EQ(doc.entries[0].new_path, "src/x.c");
  EXPECT_EQ(doc.entries[1].new_path, "lib/y.c");
}

TEST(Diff, HunkBodyLinesAreData) {
  // A removed line that looks like a header must not open a new section.
  const char* text =
      "--- a/f.c\n"
      "+++ b/f.c\n"
      "@@ -1,2 +1,1 @@\n"
      "--- a/evil.c\n"
      " keep\n";
  auto doc = parse_unified_diff(text);
  ASSERT_EQ(doc.entries.size(), 1u);
  EXPECT_EQ(doc.entries[0].new_path, "f.c");
}

TEST(Diff, BinaryAndQuotedPaths) {
  const char* text =
      "diff --git \"a/dir/sp ace.png\" \"b/dir/sp ace.png\"\n"
      "index 1..2 100644\n"
      "Binary files \"a/dir/sp ace.png\" and \"b/dir/sp ace.png\" differ\n";
  auto doc = parse_unified_diff(text);
  ASSERT_EQ(doc.entries.size(), 1u);
  EXPECT_EQ(doc.entries[0], (DiffEntry{"dir/sp ace.png", "dir/sp ace.png", FileStatus::modified}));

  // `diff -r old new` output: the tree prefix goes with --strip.
  auto plain = parse_unified_diff("Binary files old/img/logo.bin and new/img/logo.bin differ\n", {1});
  ASSERT_EQ(plain.entries.size(), 1u);
  EXPECT_EQ(plain.entries[0], (DiffEntry{"img/logo.bin", "img/logo.bin", FileStatus::modified}));
}

TEST(Diff, StripComponents) {
  const char* text =
      "--- project/src/a.c\n"
      "+++ project/src/a.c\n"
      "@@ -1 +1 @@\n"
      "-a\n"
      "+b\n";
  EXPECT_EQ(parse_unified_diff(text, {1}).entries[0].new_path, "src/a.c");
  EXPECT_EQ(parse_unified_diff(text, {0}).entries[0].new_path, "project/src/a.c");
  EXPECT_THROW(parse_unified_diff(text, {-1}), Error);
}

TEST(Diff, MalformedInputsCarryLineNumbers) {
  EXPECT_EQ(malformed_line(""), 1u);
  EXPECT_EQ(malformed_line("just some text\n"), 1u);
  EXPECT_EQ(malformed_line("--- a/x\nnot a header\n"), 1u);
  EXPECT_EQ(malformed_line("+++ b/x\n"), 1u);
  EXPECT_EQ(malformed_line("@@ -1 +1 @@\n-a\n+b\n"), 1u);
  EXPECT_EQ(malformed_line("--- a/x\n+++ b/x\n@@ -1,3 +1,3 @@\n a\n"), 4u);
  EXPECT_EQ(malformed_line("--- a/x\n+++ b/x\n@@ bogus @@\n"), 3u);
  EXPECT_EQ(malformed_line("--- a/x\n+++ b/x\n@@ -1 +1 @@\n?x\n"), 4u);
}

TEST(Diff, RenameYieldsBothPaths) {
  DiffDocument doc{{{"a.c", "b.c", FileStatus::renamed}}};
  EXPECT_EQ(to_changeset(doc, "r").changed_files, (std::vector<std::string>{"a.c", "b.c"}));
  DiffDocument del{{{"x.c", "", FileStatus::deleted}}};
  EXPECT_EQ(to_changeset(del, "d").changed_files, std::vector<std::string>{"x.c"});
}

// Generated diffs: paths survive a parse, at most two files per entry, and
// extracting paths again from the extracted entries changes nothing.
TEST(Diff, GeneratedDiffsRoundTrip) {
  std::mt19937_64 rng(3);
  std::vector<std::string> dirs{"src", "lib/core", "tools", "a", "b"};
  for (int round = 0; round < 200; ++round) {
    std::string text;
    std::vector<DiffEntry> expected;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      std::string path = dirs[rng() % dirs.size()] + "/f" + std::to_string(rng() % 50) + ".c";
      switch (rng() % 4) {
        case 0:
          text += "diff --git a/" + path + " b/" + path + "\n--- a/" + path + "\n+++ b/" + path +
                  "\n@@ -1,2 +1,2 @@\n x\n-y\n+z\n";
          expected.push_back({path, path, FileStatus::modified});
          break;
        case 1:
          text += "diff --git a/" + path + " b/" + path + "\nnew file mode 100644\n--- /dev/null\n+++ b/" +
                  path + "\n@@ -0,0 +1 @@\n+x\n";
          expected.push_back({"", path, FileStatus::added});
          break;
        case 2:
          text += "diff --git a/" + path + " b/" + path + "\ndeleted file mode 100644\n--- a/" + path +
                  "\n+++ /dev/null\n@@ -1 +0,0 @@\n-x\n";
          expected.push_back({path, "", FileStatus::deleted});
          break;
        default: {
          std::string to = path + ".moved";
          text += "diff --git a/" + path + " b/" + to + "\nsimilarity index 100%\nrename from " + path +
                  "\nrename to " + to + "\n";
          expected.push_back({path, to, FileStatus::renamed});
        }
      }
    }
    auto doc = parse_unified_diff(text);
    ASSERT_EQ(doc.entries.size(), expected.size()) << text;
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(doc.entries[i], expected[i]) << text;
    auto cs = to_changeset(doc, "g");
    EXPECT_LE(cs.changed_files.size(), 2 * doc.entries.size());
    EXPECT_EQ(ChangeSet::make("g", cs.changed_files).changed_files, cs.changed_files);
  }
}

TEST(FileList, SkipsBlanksAndComments) {
  auto files = parse_file_list("# header\n\nsrc/a.c\n  src/b.c  \r\n#x\n");
  EXPECT_EQ(files, (std::vector<std::string>{"src/a.c", "src/b.c"}));
}

TEST(ChangeSetMake, NormalizesSortsDedups) {
  auto cs = ChangeSet::make("id", {"./b.c", "a//x/../a.c", "b.c"});
  EXPECT_EQ(cs.changed_files, (std::vector<std::string>{"a/a.c", "b.c"}));
  EXPECT_THROW(ChangeSet::make("", {"a.c"}), Error);
}
