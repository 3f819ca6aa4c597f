#include "cmexpose/project_loader.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmexpose/lexer.hpp"
#include "cmexpose/parser.hpp"
#include "cmexpose/paths.hpp"

namespace cmexpose {

namespace {

class DiskSource final : public FileSource {
 public:
  std::optional<std::string> read(const std::string& path) const override {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }
};

class MemorySource final : public FileSource {
 public:
  explicit MemorySource(std::map<std::string, std::string> files) : files_(std::move(files)) {}

  std::optional<std::string> read(const std::string& path) const override {
    const auto it = files_.find(path);
    if (it == files_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, std::string> files_;
};

// Resolves `${NAME}` references against a flat map. Returns nullopt if any
// reference is unknown or the text contains constructs that need evaluation.
std::optional<std::string> resolve_static(const std::string& text,
                                          const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
      const auto close = text.find('}', i + 2);
      if (close == std::string::npos) return std::nullopt;
      const std::string name = text.substr(i + 2, close - i - 2);
      if (name.find('$') != std::string::npos) return std::nullopt;
      const auto it = vars.find(name);
      if (it == vars.end()) return std::nullopt;
      out += it->second;
      i = close + 1;
      continue;
    }
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '<') return std::nullopt;
    if (text[i] == '\\' && i + 1 < text.size()) {
      out += text[i + 1];
      i += 2;
      continue;
    }
    out += text[i++];
  }
  return out;
}

bool looks_like_module_name(const std::string& arg) {
  return arg.find('/') == std::string::npos && arg.find('\\') == std::string::npos &&
         !(arg.size() > 6 && arg.compare(arg.size() - 6, 6, ".cmake") == 0);
}

class Loader {
 public:
  Loader(std::string root, std::shared_ptr<const FileSource> source) {
    project_.root_dir = normalize_path(root);
    project_.source = std::move(source);
    vars_["CMAKE_SOURCE_DIR"] = project_.root_dir;
    vars_["PROJECT_SOURCE_DIR"] = project_.root_dir;
    vars_["CMAKE_ROOT"] = "<cmake-root>";
  }

  ParsedProject run() {
    const std::string root_file = project_.root_listfile();
    auto text = project_.source->read(root_file);
    if (!text)
      throw LoadError("MissingRootListfile", "no CMakeLists.txt in " + project_.root_dir);
    // Root parse errors propagate.
    auto nodes = parse_text(std::move(*text), root_file, project_.warnings);
    project_.files.emplace(root_file, nodes);
    project_.load_order.push_back(root_file);
    stack_.push_back(root_file);
    scan(project_.files.at(root_file), project_.root_dir, root_file, 0);
    stack_.pop_back();
    return std::move(project_);
  }

 private:
  void load(const std::string& path, const std::string& source_dir, std::size_t depth,
            const SourceSpan& from, bool optional) {
    if (std::find(stack_.begin(), stack_.end(), path) != stack_.end()) {
      project_.warnings.push_back(
          {warn::kIncludeCycle, "include cycle through " + path + "; not descending", from});
      return;
    }
    if (depth >= kIncludeDepthCap) {
      project_.warnings.push_back({warn::kIncludeDepthExceeded,
                                   "include depth cap of " + std::to_string(kIncludeDepthCap) +
                                       " reached at " + path,
                                   from});
      return;
    }
    if (project_.files.count(path)) return;
    auto text = project_.source->read(path);
    if (!text) {
      if (!optional)
        project_.warnings.push_back(
            {warn::kUnresolvedInclude, "listfile not found: " + path, from});
      return;
    }
    AstNodeList nodes;
    try {
      nodes = parse_text(std::move(*text), path, project_.warnings);
    } catch (const ParseError& err) {
      project_.warnings.push_back({warn::kParseError, err.what(), err.span()});
      return;
    }
    project_.files.emplace(path, std::move(nodes));
    project_.load_order.push_back(path);
    stack_.push_back(path);
    scan(project_.files.at(path), source_dir, path, depth + 1);
    stack_.pop_back();
  }

  void scan(const AstNodeList& nodes, const std::string& source_dir, const std::string& list_file,
            std::size_t depth) {
    for (const auto& node : nodes) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CommandInvocation>) {
              scan_command(n, source_dir, list_file, depth);
            } else if constexpr (std::is_same_v<T, IfBlock>) {
              for (const auto& c : n.clauses) scan(c.body, source_dir, list_file, depth);
              scan(n.else_body, source_dir, list_file, depth);
            } else {
              scan(n.body, source_dir, list_file, depth);
            }
          },
          node.node);
    }
  }

  void scan_command(const CommandInvocation& cmd, const std::string& source_dir,
                    const std::string& list_file, std::size_t depth) {
    vars_["CMAKE_CURRENT_SOURCE_DIR"] = source_dir;
    vars_["CMAKE_CURRENT_LIST_DIR"] = parent_path(list_file);
    vars_["CMAKE_CURRENT_LIST_FILE"] = list_file;

    if (cmd.name == "set" && !cmd.args.empty()) {
      const std::string& name = cmd.args[0].raw_text;
      std::string joined;
      bool ok = true;
      for (std::size_t i = 1; i < cmd.args.size(); ++i) {
        const auto& raw = cmd.args[i].raw_text;
        if (raw == "CACHE" || raw == "PARENT_SCOPE") break;
        auto v = resolve_static(raw, vars_);
        if (!v) {
          ok = false;
          break;
        }
        if (!joined.empty()) joined += ';';
        joined += *v;
      }
      if (ok) {
        vars_[name] = joined;
      } else {
        vars_.erase(name);
      }
      return;
    }
    if (cmd.name == "list" && cmd.args.size() >= 2 &&
        (cmd.args[0].raw_text == "APPEND" || cmd.args[0].raw_text == "PREPEND")) {
      const std::string& name = cmd.args[1].raw_text;
      std::vector<std::string> items;
      for (std::size_t i = 2; i < cmd.args.size(); ++i) {
        auto v = resolve_static(cmd.args[i].raw_text, vars_);
        if (!v) {
          vars_.erase(name);
          return;
        }
        items.push_back(*v);
      }
      std::string joined;
      for (const auto& item : items) joined += (joined.empty() ? "" : ";") + item;
      auto& existing = vars_[name];
      if (cmd.args[0].raw_text == "APPEND") {
        existing = existing.empty() ? joined : existing + ";" + joined;
      } else {
        existing = existing.empty() ? joined : joined + ";" + existing;
      }
      return;
    }
    if (cmd.name == "project" && !cmd.args.empty()) {
      if (auto name = resolve_static(cmd.args[0].raw_text, vars_)) {
        vars_["PROJECT_NAME"] = *name;
        vars_["PROJECT_SOURCE_DIR"] = source_dir;
        vars_[*name + "_SOURCE_DIR"] = source_dir;
      }
      return;
    }
    if (cmd.name == "include" && !cmd.args.empty()) {
      const bool optional =
          std::any_of(cmd.args.begin() + 1, cmd.args.end(),
                      [](const Argument& a) { return a.raw_text == "OPTIONAL"; });
      auto target = resolve_static(cmd.args[0].raw_text, vars_);
      if (!target) {
        project_.warnings.push_back(
            {warn::kUnresolvedInclude,
             "cannot resolve include(" + cmd.args[0].raw_text + ") without evaluation", cmd.span});
        return;
      }
      if (looks_like_module_name(*target)) {
        if (auto found = find_module(*target)) {
          load(*found, source_dir, depth, cmd.span, optional);
        } else {
          project_.warnings.push_back(
              {warn::kBuiltinModule, "module " + *target + " is not part of the project", cmd.span});
        }
        return;
      }
      load(join_path(source_dir, *target), source_dir, depth, cmd.span, optional);
      return;
    }
    if (cmd.name == "add_subdirectory" && !cmd.args.empty()) {
      auto target = resolve_static(cmd.args[0].raw_text, vars_);
      if (!target) {
        project_.warnings.push_back({warn::kUnresolvedInclude,
                                     "cannot resolve add_subdirectory(" + cmd.args[0].raw_text +
                                         ") without evaluation",
                                     cmd.span});
        return;
      }
      const std::string dir = join_path(source_dir, *target);
      const auto saved = vars_;
      load(dir + "/CMakeLists.txt", dir, depth, cmd.span, false);
      vars_ = saved;
      return;
    }
  }

  std::optional<std::string> find_module(const std::string& name) {
    const auto it = vars_.find("CMAKE_MODULE_PATH");
    if (it == vars_.end()) return std::nullopt;
    std::size_t pos = 0;
    const std::string& list = it->second;
    while (pos <= list.size()) {
      const auto next = list.find(';', pos);
      const std::string dir = list.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (!dir.empty()) {
        const std::string candidate = join_path(dir, name + ".cmake");
        if (project_.files.count(candidate) || project_.source->read(candidate)) return candidate;
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return std::nullopt;
  }

  ParsedProject project_;
  std::map<std::string, std::string> vars_;
  std::vector<std::string> stack_;
};

}  // namespace

const AstNodeList* ParsedProject::find(const std::string& path) const {
  const auto it = files.find(path);
  return it == files.end() ? nullptr : &it->second;
}

std::shared_ptr<const FileSource> make_disk_source() { return std::make_shared<DiskSource>(); }

std::shared_ptr<const FileSource> make_memory_source(std::map<std::string, std::string> files) {
  return std::make_shared<MemorySource>(std::move(files));
}

AstNodeList parse_text(std::string text, const std::string& path, WarningList& warnings) {
  if (sanitize_utf8(text))
    warnings.push_back({warn::kInvalidUtf8, "invalid UTF-8 replaced", SourceSpan{path, 1, 1}});
  return parse_listfile(text, path);
}

ParsedProject load_project(const std::string& root_dir, std::shared_ptr<const FileSource> source) {
  return Loader(root_dir, std::move(source)).run();
}

ParsedProject load_project(const std::string& root_dir) {
  std::error_code ec;
  auto absolute = std::filesystem::absolute(root_dir, ec);
  const std::string root = normalize_path(ec ? root_dir : absolute.generic_string());
  if (!std::filesystem::is_directory(root, ec))
    throw LoadError("MissingRootListfile", root + " is not a directory");
  return load_project(root, make_disk_source());
}

ParsedProject load_project_from_memory(const std::string& root_dir,
                                       const std::map<std::string, std::string>& sources) {
  std::map<std::string, std::string> files;
  const std::string root = normalize_path(root_dir);
  for (const auto& [rel, text] : sources) files.emplace(join_path(root, rel), text);
  return load_project(root, make_memory_source(std::move(files)));
}

}  // namespace cmexpose
