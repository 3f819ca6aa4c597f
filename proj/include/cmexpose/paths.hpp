#pragma once

#include <string>
#include <string_view>

namespace cmexpose {

/// Lexically normalizes a `/`-separated path: backslashes become `/`,
/// repeated separators and `.` segments are dropped, `..` collapses against
/// a preceding segment. Leading `..` segments of relative paths are kept.
/// Never touches the filesystem.
std::string normalize_path(std::string_view path);

bool is_absolute_path(std::string_view path);

/// Joins `relative` onto `base` unless it is already absolute, then
/// normalizes.
std::string join_path(std::string_view base, std::string_view relative);

/// Expresses `path` relative to `root` when it lies underneath it; otherwise
/// returns the normalized `path` unchanged. Both inputs should be absolute.
std::string relativize(std::string_view path, std::string_view root);

/// Directory part of a normalized path ("" for a bare file name).
std::string parent_path(std::string_view path);

}  // namespace cmexpose
