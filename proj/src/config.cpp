#include "cmexpose/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace cmexpose {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// Parses the whole string as a decimal number.
std::optional<double> as_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size()) return std::nullopt;
  // strtod accepts things like "inf" and hex; CMake's constant rules do not.
  for (char c : copy)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' ||
          c == 'e' || c == 'E'))
      return std::nullopt;
  return v;
}

}  // namespace

bool is_false_constant(std::string_view value) {
  if (value.empty()) return true;
  const std::string u = upper(value);
  if (u == "0" || u == "OFF" || u == "NO" || u == "FALSE" || u == "N" || u == "IGNORE" ||
      u == "NOTFOUND")
    return true;
  if (u.size() >= 9 && u.compare(u.size() - 9, 9, "-NOTFOUND") == 0) return true;
  if (auto n = as_number(value)) return *n == 0.0;
  return false;
}

bool is_true_constant(std::string_view value) {
  const std::string u = upper(value);
  if (u == "1" || u == "ON" || u == "YES" || u == "TRUE" || u == "Y") return true;
  if (auto n = as_number(value)) return *n != 0.0;
  return false;
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::boolean:
      return "boolean";
    case DomainKind::enumerated:
      return "enumerated";
    case DomainKind::opaque:
      return "opaque";
  }
  return {};
}

std::string to_string(OptionOrigin origin) {
  switch (origin) {
    case OptionOrigin::option_command:
      return "option_command";
    case OptionOrigin::cache_override:
      return "cache_override";
    case OptionOrigin::environment:
      return "environment";
  }
  return {};
}

std::optional<DomainKind> parse_domain_kind(std::string_view text) {
  if (text == "boolean") return DomainKind::boolean;
  if (text == "enumerated") return DomainKind::enumerated;
  if (text == "opaque") return DomainKind::opaque;
  return std::nullopt;
}

std::optional<OptionOrigin> parse_option_origin(std::string_view text) {
  if (text == "option_command") return OptionOrigin::option_command;
  if (text == "cache_override") return OptionOrigin::cache_override;
  if (text == "environment") return OptionOrigin::environment;
  return std::nullopt;
}

}  // namespace cmexpose
