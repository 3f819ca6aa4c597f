#include "cmexpose/exposure.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "cmexpose/paths.hpp"

namespace cmexpose {

ChangeSet ChangeSet::make(std::string id, const std::vector<std::string>& files) {
  if (id.empty()) throw Error("InvalidChangeSet", "a change set needs a non-empty id");
  ChangeSet cs;
  cs.id = std::move(id);
  for (const auto& f : files) {
    std::string n = normalize_path(f);
    if (!n.empty() && n != ".") cs.changed_files.push_back(std::move(n));
  }
  std::sort(cs.changed_files.begin(), cs.changed_files.end());
  cs.changed_files.erase(std::unique(cs.changed_files.begin(), cs.changed_files.end()),
                         cs.changed_files.end());
  return cs;
}

std::vector<std::string> ExposureReport::with(Tristate value) const {
  std::vector<std::string> out;
  for (const auto& d : deliverables) {
    if (d.impacted == value) out.push_back(d.deliverable);
  }
  return out;
}

namespace {

/// Backward reachability from one source file over the graph.
class Reach {
 public:
  Reach(const Bdg& bdg, std::string target) : bdg_(bdg), target_(std::move(target)) {
    for (std::size_t i = 0; i < bdg.edges.size(); ++i) out_[bdg.edges[i].from].push_back(i);
    cyclic_ = detect_cycle();
  }

  /// Disjunction over every acyclic path from `node` to the target of the
  /// conjunction of its edge guards (exists guards excluded).
  Condition to_target(const std::string& node) {
    if (node == target_) return Condition::truth();
    if (!cyclic_) return memoized(node);
    std::set<std::string> on_path;
    return enumerate(node, on_path);
  }

  const std::vector<std::size_t>& edges_from(const std::string& node) {
    static const std::vector<std::size_t> none;
    auto it = out_.find(node);
    return it == out_.end() ? none : it->second;
  }

 private:
  Condition memoized(const std::string& node) {
    if (node == target_) return Condition::truth();
    if (auto it = memo_.find(node); it != memo_.end()) return it->second;
    std::vector<Condition> parts;
    for (std::size_t i : edges_from(node)) {
      const auto& e = bdg_.edges[i];
      Condition rest = memoized(e.to);
      if (!rest.is_false()) parts.push_back(conj(e.guard, rest));
    }
    Condition c = parts.empty() ? Condition::falsity() : simplify(disj_all(parts));
    memo_.emplace(node, c);
    return c;
  }

  Condition enumerate(const std::string& node, std::set<std::string>& on_path) {
    if (node == target_) return Condition::truth();
    on_path.insert(node);
    std::vector<Condition> parts;
    for (std::size_t i : edges_from(node)) {
      const auto& e = bdg_.edges[i];
      if (on_path.count(e.to)) continue;
      Condition rest = enumerate(e.to, on_path);
      if (!rest.is_false()) parts.push_back(conj(e.guard, rest));
    }
    on_path.erase(node);
    return parts.empty() ? Condition::falsity() : simplify(disj_all(parts));
  }

  bool detect_cycle() {
    std::map<std::string, int> state;
    std::function<bool(const std::string&)> visit = [&](const std::string& n) {
      state[n] = 1;
      for (std::size_t i : edges_from(n)) {
        const auto& to = bdg_.edges[i].to;
        if (state[to] == 1) return true;
        if (state[to] == 0 && visit(to)) return true;
      }
      state[n] = 2;
      return false;
    };
    for (const auto& [n, _] : out_) {
      if (state[n] == 0 && visit(n)) return true;
    }
    return false;
  }

  const Bdg& bdg_;
  std::string target_;
  std::map<std::string, std::vector<std::size_t>> out_;
  std::map<std::string, Condition> memo_;
  bool cyclic_ = false;
};

std::vector<DependencyPath> list_paths(const Bdg& bdg, Reach& reach, const BdgNode& start,
                                       const std::string& target, std::size_t cap,
                                       bool& truncated) {
  std::vector<DependencyPath> out;
  truncated = false;
  struct Partial {
    std::vector<std::string> nodes;
    std::vector<Condition> guards;
  };
  std::deque<Partial> queue;
  queue.push_back({{start.id}, {start.exists_guard}});
  std::map<std::string, bool> useful;
  auto can_reach = [&](const std::string& n) {
    auto [it, inserted] = useful.try_emplace(n, false);
    if (inserted) it->second = !reach.to_target(n).is_false();
    return it->second;
  };
  while (!queue.empty()) {
    Partial p = std::move(queue.front());
    queue.pop_front();
    const std::string& last = p.nodes.back();
    if (last == target) {
      if (out.size() == cap) {
        truncated = true;
        break;
      }
      out.push_back({p.nodes, conj_all(p.guards)});
      continue;
    }
    for (std::size_t i : reach.edges_from(last)) {
      const auto& e = bdg.edges[i];
      if (std::find(p.nodes.begin(), p.nodes.end(), e.to) != p.nodes.end()) continue;
      if (e.to != target && !can_reach(e.to)) continue;
      Partial next = p;
      next.nodes.push_back(e.to);
      next.guards.push_back(e.guard);
      queue.push_back(std::move(next));
    }
  }
  return out;
}

/// Per deliverable, the disjunction over changed files of its aggregate guard.
std::map<std::string, Condition> impact_guards(const Bdg& bdg, const ChangeSet& changes) {
  std::map<std::string, std::vector<Condition>> parts;
  for (const auto& file : changes.changed_files) {
    const BdgNode* node = bdg.find(file);
    if (!node || node->kind != NodeKind::source_file) continue;
    Reach reach(bdg, file);
    for (const BdgNode* d : bdg.deliverables()) {
      Condition r = reach.to_target(d->id);
      if (r.is_false()) continue;
      parts[d->id].push_back(conj(d->exists_guard, r));
    }
  }
  std::map<std::string, Condition> out;
  for (auto& [d, guards] : parts) out[d] = simplify(disj_all(guards));
  return out;
}

const BdgNode& require_deliverable(const Bdg& bdg, const std::string& id) {
  const BdgNode* node = bdg.find(id);
  if (!node || node->kind != NodeKind::deliverable) {
    throw Error("UnknownDeliverable", "no deliverable named '" + id + "'");
  }
  return *node;
}

}  // namespace

std::vector<PathObject> paths_for_change(const Bdg& bdg, const ChangeSet& changes,
                                         std::size_t path_cap) {
  if (path_cap == 0) path_cap = 1;
  std::vector<PathObject> out;
  for (const auto& file : changes.changed_files) {
    PathObject po;
    po.changed_file = file;
    const BdgNode* node = bdg.find(file);
    if (node && node->kind == NodeKind::source_file) {
      Reach reach(bdg, file);
      for (const BdgNode* d : bdg.deliverables()) {
        Condition r = reach.to_target(d->id);
        if (r.is_false()) continue;
        Condition aggregate = simplify(conj(d->exists_guard, r));
        if (satisfiable(aggregate, bdg.options) == Tristate::no) continue;
        PathEntry entry;
        entry.deliverable = d->id;
        entry.aggregate_guard = aggregate;
        entry.paths = list_paths(bdg, reach, *d, file, path_cap, entry.truncated);
        po.entries.push_back(std::move(entry));
      }
    }
    out.push_back(std::move(po));
  }
  return out;
}

ExposureReport impacted_deliverables(const Bdg& bdg, const ChangeSet& changes,
                                     const ConfigurationAssignment& assignment) {
  ExposureReport report;
  report.changeset_id = changes.id;
  report.assignment = assignment;
  auto guards = impact_guards(bdg, changes);
  for (const BdgNode* d : bdg.deliverables()) {
    DeliverableImpact impact;
    impact.deliverable = d->id;
    auto it = guards.find(d->id);
    impact.guard = it == guards.end() ? Condition::falsity() : it->second;
    impact.impacted = evaluate(impact.guard, assignment, bdg.options);
    impact.variants = count_variants(impact.guard, bdg.options);
    report.deliverables.push_back(std::move(impact));
  }
  return report;
}

Condition propagation_conditions(const Bdg& bdg, const ChangeSet& changes,
                                 const std::string& deliverable) {
  require_deliverable(bdg, deliverable);
  auto guards = impact_guards(bdg, changes);
  auto it = guards.find(deliverable);
  if (it == guards.end()) return Condition::falsity();
  if (auto dnf = canonical_dnf(it->second)) return *dnf;
  return it->second;
}

std::vector<RankedPatch> rank_patches(const Bdg& bdg, const std::vector<ChangeSet>& patches,
                                      RankKey key, const ConfigurationAssignment& assignment) {
  std::vector<RankedPatch> out;
  if (key == RankKey::deliverable_count) {
    for (const auto& patch : patches) {
      auto report = impacted_deliverables(bdg, patch, assignment);
      out.push_back({patch.id, report.with(Tristate::yes).size(), true});
    }
  } else {
    // Every patch is counted over the options any of them mentions, so a
    // patch reaching everything unconditionally outranks a conditional one.
    std::vector<Condition> reach;
    std::map<std::string, Atom> space;
    for (const auto& patch : patches) {
      std::vector<Condition> parts;
      for (const auto& [d, guard] : impact_guards(bdg, patch)) parts.push_back(guard);
      reach.push_back(simplify(disj_all(parts)));
      for (const auto& a : reach.back().atoms()) space.emplace(a.key(), a);
    }
    std::vector<Atom> atoms;
    for (const auto& [k, a] : space) atoms.push_back(a);
    for (std::size_t i = 0; i < patches.size(); ++i) {
      auto count = count_variants(reach[i], bdg.options, atoms);
      out.push_back({patches[i].id, count.count, count.exact});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedPatch& a, const RankedPatch& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

std::vector<std::string> filter_patches_by_deliverable(const Bdg& bdg,
                                                       const std::vector<ChangeSet>& patches,
                                                       const std::string& deliverable) {
  require_deliverable(bdg, deliverable);
  std::vector<std::string> out;
  for (const auto& patch : patches) {
    Condition c = propagation_conditions(bdg, patch, deliverable);
    if (satisfiable(c, bdg.options) != Tristate::no) out.push_back(patch.id);
  }
  return out;
}

std::vector<std::string> filter_patches_by_variant(const Bdg& bdg,
                                                   const std::vector<ChangeSet>& patches,
                                                   const ConfigurationAssignment& assignment) {
  ConfigurationAssignment total = assignment;
  total.total = true;
  std::vector<std::string> out;
  for (const auto& patch : patches) {
    auto report = impacted_deliverables(bdg, patch, total);
    if (!report.with(Tristate::yes).empty()) out.push_back(patch.id);
  }
  return out;
}

}  // namespace cmexpose
