#include "cmexpose/symbolic_env.hpp"

#include <stdexcept>

namespace cmexpose {

namespace {
constexpr char kMarker = '\x1A';
}

VariableValue VariableValue::of(std::vector<std::string> values, const Condition& guard) {
  VariableValue v;
  v.defined = guard;
  for (auto& s : values) v.items.push_back({guard, std::move(s)});
  return v;
}

std::string symbolic_value(std::string_view option) {
  std::string out;
  out.reserve(option.size() + 2);
  out.push_back(kMarker);
  out.append(option);
  out.push_back(kMarker);
  return out;
}

std::optional<std::string> symbolic_option(std::string_view value) {
  if (value.size() < 3 || value.front() != kMarker || value.back() != kMarker) return std::nullopt;
  std::string_view inner = value.substr(1, value.size() - 2);
  if (inner.find(kMarker) != std::string_view::npos) return std::nullopt;
  return std::string(inner);
}

bool contains_symbolic(std::string_view value) {
  return value.find(kMarker) != std::string_view::npos;
}

std::string render_symbolic(std::string_view value) {
  std::string out;
  bool open = false;
  for (char c : value) {
    if (c == kMarker) {
      out += open ? "}" : "${";
      open = !open;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

Atom OpaqueRegistry::intern(const std::string& file, const std::string& text,
                            const SourceSpan& span) {
  auto key = std::make_pair(file, text);
  auto it = ids_.find(key);
  if (it != ids_.end()) return by_id_.at(it->second);
  auto id = static_cast<std::uint32_t>(by_id_.size() + 1);
  ids_.emplace(std::move(key), id);
  Atom atom = Atom::opaque(id, text, span);
  by_id_.emplace(id, atom);
  return atom;
}

SymbolicEnv::SymbolicEnv() : scopes_(1) {}

void SymbolicEnv::push_scope() { scopes_.push_back(scopes_.back()); }

void SymbolicEnv::pop_scope() {
  if (scopes_.size() <= 1) throw std::logic_error("pop of the root scope");
  scopes_.pop_back();
}

const VariableValue* SymbolicEnv::find_normal(const std::string& name) const {
  const auto& scope = scopes_.back();
  auto it = scope.find(name);
  return it == scope.end() ? nullptr : &it->second;
}

const VariableValue* SymbolicEnv::find_cache(const std::string& name) const {
  auto it = cache_.find(name);
  return it == cache_.end() ? nullptr : &it->second;
}

const VariableValue* SymbolicEnv::find_parent(const std::string& name) const {
  if (scopes_.size() < 2) return nullptr;
  const auto& scope = scopes_[scopes_.size() - 2];
  auto it = scope.find(name);
  return it == scope.end() ? nullptr : &it->second;
}

const VariableValue* SymbolicEnv::find(const std::string& name) const {
  if (const auto* v = find_normal(name)) return v;
  return find_cache(name);
}

void SymbolicEnv::bind(const std::string& name, VariableValue value) {
  scopes_.back()[name] = std::move(value);
}

void SymbolicEnv::bind_parent(const std::string& name, VariableValue value) {
  if (scopes_.size() < 2) return;  // CMake ignores PARENT_SCOPE at the top
  scopes_[scopes_.size() - 2][name] = std::move(value);
}

void SymbolicEnv::bind_cache(const std::string& name, VariableValue value) {
  cache_[name] = std::move(value);
}

void SymbolicEnv::erase_cache(const std::string& name) { cache_.erase(name); }

std::map<std::string, VariableValue> SymbolicEnv::visible() const {
  std::map<std::string, VariableValue> out = cache_;
  for (const auto& [name, value] : scopes_.back()) out[name] = value;
  return out;
}

}  // namespace cmexpose
