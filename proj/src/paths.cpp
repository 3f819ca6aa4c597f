#include "cmexpose/paths.hpp"

#include <vector>

namespace cmexpose {

bool is_absolute_path(std::string_view path) {
  if (!path.empty() && (path.front() == '/' || path.front() == '\\')) return true;
  // Windows drive letters, e.g. C:/foo
  return path.size() >= 2 && path[1] == ':' &&
         ((path[0] >= 'A' && path[0] <= 'Z') || (path[0] >= 'a' && path[0] <= 'z'));
}

std::string normalize_path(std::string_view path) {
  std::string unified(path);
  for (auto& ch : unified)
    if (ch == '\\') ch = '/';

  const bool absolute = !unified.empty() && unified.front() == '/';
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= unified.size()) {
    const auto next = unified.find('/', pos);
    const auto end = next == std::string::npos ? unified.size() : next;
    std::string segment = unified.substr(pos, end - pos);
    if (segment.empty() || segment == ".") {
      // skip
    } else if (segment == "..") {
      if (!parts.empty() && parts.back() != "..") {
        parts.pop_back();
      } else if (!absolute) {
        parts.push_back(std::move(segment));
      }
    } else {
      parts.push_back(std::move(segment));
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }

  std::string out = absolute ? "/" : "";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '/';
    out += parts[i];
  }
  if (out.empty()) out = ".";
  return out;
}

std::string join_path(std::string_view base, std::string_view relative) {
  if (is_absolute_path(relative) || base.empty()) return normalize_path(relative);
  std::string joined(base);
  joined += '/';
  joined += relative;
  return normalize_path(joined);
}

std::string relativize(std::string_view path, std::string_view root) {
  const std::string p = normalize_path(path);
  const std::string r = normalize_path(root);
  if (p == r) return ".";
  if (r == "/") return p.substr(1);
  if (p.size() > r.size() && p.compare(0, r.size(), r) == 0 && p[r.size()] == '/')
    return p.substr(r.size() + 1);
  return p;
}

std::string parent_path(std::string_view path) {
  const auto slash = path.rfind('/');
  if (slash == std::string_view::npos) return "";
  if (slash == 0) return "/";
  return std::string(path.substr(0, slash));
}

}  // namespace cmexpose
