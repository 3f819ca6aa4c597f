#include "cmexpose/change_ingest.hpp"

#include <charconv>

#include "cmexpose/paths.hpp"

namespace cmexpose {

std::string to_string(FileStatus status) {
  switch (status) {
    case FileStatus::modified:
      return "modified";
    case FileStatus::added:
      return "added";
    case FileStatus::deleted:
      return "deleted";
    case FileStatus::renamed:
      return "renamed";
  }
  return "modified";
}

namespace {

constexpr std::string_view kDevNull = "/dev/null";

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error("MalformedDiff", "line " + std::to_string(line) + ": " + what,
              SourceSpan{"<diff>", line, 1});
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

/// Git quotes paths with unusual characters C-style.
std::string unquote(std::string_view s, std::size_t line) {
  std::string out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') return out;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i >= s.size()) break;
    char e = s[i];
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'a': out.push_back('\a'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'v': out.push_back('\v'); break;
      case 'r': out.push_back('\r'); break;
      default:
        if (e >= '0' && e <= '7' && i + 2 < s.size()) {
          int v = (e - '0') * 64 + (s[i + 1] - '0') * 8 + (s[i + 2] - '0');
          out.push_back(static_cast<char>(v));
          i += 2;
        } else {
          out.push_back(e);
        }
    }
  }
  malformed(line, "unterminated quoted path");
}

/// Path of a `---`/`+++` header: quoted, or up to a tab-separated timestamp.
std::string header_path(std::string_view rest, std::size_t line) {
  if (!rest.empty() && rest.front() == '"') return unquote(rest, line);
  std::size_t tab = rest.find('\t');
  if (tab != std::string_view::npos) rest = rest.substr(0, tab);
  while (!rest.empty() && rest.back() == ' ') rest.remove_suffix(1);
  return std::string(rest);
}

std::string strip_path(const std::string& path, const DiffOptions& options, char side) {
  if (path.empty() || path == kDevNull) return {};
  if (!options.strip) {
    if (path.size() > 2 && path[0] == side && path[1] == '/') return normalize_path(path.substr(2));
    return normalize_path(path);
  }
  std::string_view rest = path;
  for (int i = 0; i < *options.strip; ++i) {
    std::size_t slash = rest.find('/');
    if (slash == std::string_view::npos) return {};
    rest.remove_prefix(slash + 1);
  }
  return normalize_path(rest);
}

/// Splits `a/x b/y` from a `diff --git` line. Ambiguous with spaces in names;
/// later headers (---/+++, rename from/to) override the guess.
std::pair<std::string, std::string> git_header_paths(std::string_view rest, std::size_t line) {
  if (!rest.empty() && rest.front() == '"') {
    std::string a = unquote(rest, line);
    std::size_t close = 1;
    while (close < rest.size() && !(rest[close] == '"' && rest[close - 1] != '\\')) ++close;
    std::string_view tail = rest.substr(std::min(close + 1, rest.size()));
    while (!tail.empty() && tail.front() == ' ') tail.remove_prefix(1);
    return {a, header_path(tail, line)};
  }
  // Prefer the split where both halves name the same file.
  for (std::size_t pos = rest.find(' '); pos != std::string_view::npos;
       pos = rest.find(' ', pos + 1)) {
    std::string_view a = rest.substr(0, pos);
    std::string_view b = rest.substr(pos + 1);
    if (a.size() > 2 && b.size() > 2 && a.substr(2) == b.substr(2)) {
      return {std::string(a), std::string(b)};
    }
  }
  std::size_t pos = rest.find(" b/");
  if (pos == std::string_view::npos) pos = rest.find(' ');
  if (pos == std::string_view::npos) malformed(line, "cannot split 'diff --git' paths");
  return {std::string(rest.substr(0, pos)), header_path(rest.substr(pos + 1), line)};
}

/// "-l,s +l,s" counts from a hunk header; a missing count means 1.
std::pair<long, long> hunk_counts(std::string_view header, std::size_t line) {
  auto field = [&](char sign) -> long {
    std::size_t at = header.find(std::string(" ") + sign);
    if (at == std::string_view::npos) malformed(line, "bad hunk header");
    std::string_view s = header.substr(at + 2);
    long start = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), start);
    if (ec != std::errc()) malformed(line, "bad hunk header");
    if (p < s.data() + s.size() && *p == ',') {
      long count = 0;
      auto [p2, ec2] = std::from_chars(p + 1, s.data() + s.size(), count);
      if (ec2 != std::errc()) malformed(line, "bad hunk header");
      return count;
    }
    return 1;
  };
  return {field('-'), field('+')};
}

struct Section {
  std::string old_raw, new_raw;
  std::string rename_from, rename_to;
  bool added = false, deleted = false, renamed = false;
  bool have_headers = false;
  bool open = false;
};

}  // namespace

DiffDocument parse_unified_diff(std::string_view text, const DiffOptions& options) {
  if (options.strip && *options.strip < 0) {
    throw Error("InvalidArgument", "strip count must be non-negative");
  }
  auto lines = split_lines(text);
  DiffDocument doc;
  Section cur;

  auto finish = [&]() {
    if (!cur.open) return;
    DiffEntry e;
    std::string old_path = cur.renamed ? normalize_path(cur.rename_from)
                                       : strip_path(cur.old_raw, options, 'a');
    std::string new_path = cur.renamed ? normalize_path(cur.rename_to)
                                       : strip_path(cur.new_raw, options, 'b');
    if (cur.old_raw == kDevNull || cur.added) {
      e.status = FileStatus::added;
      old_path.clear();
    } else if (cur.new_raw == kDevNull || cur.deleted) {
      e.status = FileStatus::deleted;
      new_path.clear();
    } else if (cur.renamed || (!old_path.empty() && !new_path.empty() && old_path != new_path)) {
      e.status = FileStatus::renamed;
    }
    e.old_path = old_path;
    e.new_path = new_path;
    if (e.status == FileStatus::modified && e.old_path.empty()) e.old_path = e.new_path;
    if (e.status == FileStatus::modified && e.new_path.empty()) e.new_path = e.old_path;
    if (!e.old_path.empty() || !e.new_path.empty()) doc.entries.push_back(std::move(e));
    cur = Section{};
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    std::size_t lineno = i + 1;
    if (starts_with(l, "diff --git ")) {
      finish();
      cur.open = true;
      auto [a, b] = git_header_paths(l.substr(11), lineno);
      cur.old_raw = a;
      cur.new_raw = b;
    } else if (starts_with(l, "--- ") && i + 1 < lines.size() && starts_with(lines[i + 1], "+++ ")) {
      // A plain diff starts a new section here; in git output this refines
      // the paths guessed from the `diff --git` line.
      if (!cur.open || cur.have_headers) finish();
      cur.open = true;
      cur.have_headers = true;
      cur.old_raw = header_path(l.substr(4), lineno);
      cur.new_raw = header_path(lines[i + 1].substr(4), lineno + 1);
      ++i;
    } else if (starts_with(l, "--- ")) {
      malformed(lineno, "'---' header without a following '+++' header");
    } else if (starts_with(l, "+++ ")) {
      malformed(lineno, "'+++' header without a preceding '---' header");
    } else if (starts_with(l, "@@ ")) {
      if (!cur.open) malformed(lineno, "hunk outside of a file section");
      auto [old_count, new_count] = hunk_counts(l, lineno);
      // Consume the body by count so lines like "--- x" inside it are data.
      while ((old_count > 0 || new_count > 0)) {
        ++i;
        if (i >= lines.size()) malformed(lines.size(), "truncated hunk");
        std::string_view b = lines[i];
        char c = b.empty() ? ' ' : b[0];
        if (c == ' ') {
          --old_count;
          --new_count;
        } else if (c == '-') {
          --old_count;
        } else if (c == '+') {
          --new_count;
        } else if (c == '\\') {
          // "\ No newline at end of file"
        } else {
          malformed(i + 1, "unexpected line inside hunk");
        }
        if (old_count < 0 || new_count < 0) malformed(i + 1, "hunk longer than its header says");
      }
      while (i + 1 < lines.size() && starts_with(lines[i + 1], "\\")) ++i;
    } else if (cur.open && starts_with(l, "rename from ")) {
      cur.renamed = true;
      cur.rename_from = header_path(l.substr(12), lineno);
    } else if (cur.open && starts_with(l, "rename to ")) {
      cur.renamed = true;
      cur.rename_to = header_path(l.substr(10), lineno);
    } else if (cur.open && starts_with(l, "new file mode")) {
      cur.added = true;
    } else if (cur.open && starts_with(l, "deleted file mode")) {
      cur.deleted = true;
    } else if (starts_with(l, "Binary files ")) {
      // Plain `diff` prints this with no other header.
      if (!cur.open) {
        std::string_view rest = l.substr(13);
        std::size_t and_pos = rest.find(" and ");
        std::size_t differ = rest.rfind(" differ");
        if (and_pos == std::string_view::npos || differ == std::string_view::npos ||
            differ < and_pos) {
          malformed(lineno, "unrecognized binary marker");
        }
        cur.open = true;
        cur.old_raw = std::string(rest.substr(0, and_pos));
        cur.new_raw = std::string(rest.substr(and_pos + 5, differ - and_pos - 5));
        finish();
      }
    }
    // Everything else (commit preamble, index lines, mode lines) is ignored.
  }
  finish();
  if (doc.entries.empty()) malformed(lines.empty() ? 1 : lines.size(), "no file sections found");
  return doc;
}

ChangeSet to_changeset(const DiffDocument& doc, const std::string& id) {
  std::vector<std::string> files;
  for (const auto& e : doc.entries) {
    switch (e.status) {
      case FileStatus::added:
      case FileStatus::modified:
        files.push_back(e.new_path);
        break;
      case FileStatus::deleted:
        files.push_back(e.old_path);
        break;
      case FileStatus::renamed:
        files.push_back(e.old_path);
        files.push_back(e.new_path);
        break;
    }
  }
  return ChangeSet::make(id, files);
}

std::vector<std::string> parse_file_list(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view l : split_lines(text)) {
    while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
    while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.remove_suffix(1);
    if (l.empty() || l.front() == '#') continue;
    out.emplace_back(l);
  }
  return out;
}

}  // namespace cmexpose
