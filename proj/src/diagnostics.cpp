#include "cmexpose/diagnostics.hpp"

namespace cmexpose {

std::string SourceSpan::to_string() const {
  return file_path + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::string Warning::to_string() const {
  std::string out;
  if (span) out += span->to_string() + ": ";
  out += code;
  if (!message.empty()) out += ": " + message;
  return out;
}

std::map<std::string, std::size_t> summarize(const WarningList& warnings) {
  std::map<std::string, std::size_t> counts;
  for (const auto& w : warnings) ++counts[w.code];
  return counts;
}

Error::Error(std::string kind, const std::string& message,
             std::optional<SourceSpan> span)
    : std::runtime_error(span ? span->to_string() + ": " + kind + ": " + message
                              : kind + ": " + message),
      kind_(std::move(kind)),
      span_(std::move(span)) {}

}  // namespace cmexpose
