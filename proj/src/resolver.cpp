#include "composekit/resolver.hpp"

#include <algorithm>

#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"

namespace composekit {

namespace {

enum class Strength { Default = 0, Include = 1, Explicit = 2 };

struct Claim {
  std::string child;
  Strength strength;
  std::string by;
};

// Thrown inside a pass when an inclusion contradicts an earlier DEFAULT: the
// pass restarts with the group pinned to the included child.
struct Restart {
  std::string group;
  std::string child;
};

std::string describe(const SetupRequest &req, std::string_view what) {
  return std::string(what) + " (setup " + req.simulation_name + ")";
}

int directive_rank(const Directive &d) { return static_cast<int>(d.index()); }

class Pass {
 public:
  Pass(const UnitTree &tree, const SetupRequest &req,
       const std::map<std::string, std::string> &overridden)
      : tree_(tree), req_(req), overridden_(overridden) {}

  UnitClosure run() {
    const std::string setup = UnitTree::setup_path(req_.simulation_name);
    include(setup, Strength::Include, "setup " + req_.simulation_name);
    for (const auto &w : req_.with_units) {
      if (excluded(w))
        throw Error(ErrorKind::ExcludedRequireTarget, w,
                    "--with-unit path lies under a --without-unit path");
      include(w, Strength::Include, "--with-unit");
    }

    while (!pending_.empty()) {
      std::string path = *pending_.begin();
      pending_.erase(pending_.begin());
      process_config(tree_.at(path));
    }

    for (const auto &[group, child] : overridden_) {
      auto it = chosen_.find(group);
      if (it == chosen_.end() || it->second.child != child)
        throw Error(ErrorKind::ImplementationConflict, group,
                    "inclusion of '" + child +
                        "' overrode the DEFAULT but is no longer reached once the default "
                        "lineage is removed");
    }

    UnitClosure closure;
    closure.simulation_name = req_.simulation_name;
    closure.included = std::move(included_);
    for (const auto &[group, claim] : chosen_) closure.chosen_impl.emplace(group, claim.child);
    closure.dropped_requests.assign(dropped_.begin(), dropped_.end());
    return closure;
  }

 private:
  bool excluded(std::string_view path) const {
    return std::any_of(req_.without_units.begin(), req_.without_units.end(),
                       [&](const std::string &w) { return tree_path::is_within(path, w); });
  }

  void process_config(const UnitNode &node) {
    if (!node.config) return;
    const ConfigFile &cfg = *node.config;
    const std::string by = cfg.file_path();

    // Canonical order so that directive order inside a file is irrelevant.
    std::vector<const Directive *> order;
    for (const auto &d : cfg.directives) order.push_back(&d);
    std::stable_sort(order.begin(), order.end(), [](const Directive *a, const Directive *b) {
      if (directive_rank(*a) != directive_rank(*b)) return directive_rank(*a) < directive_rank(*b);
      return render_directive(*a) < render_directive(*b);
    });

    for (const Directive *d : order) {
      if (const auto *r = std::get_if<directive::Requires>(d)) {
        if (!tree_.contains(r->target))
          throw Error(ErrorKind::MissingRequireTarget, by,
                      "required path '" + r->target + "' does not exist");
        if (excluded(r->target))
          throw Error(ErrorKind::ExcludedRequireTarget, by,
                      "required path '" + r->target + "' is excluded by --without-unit");
        include(r->target, Strength::Include, by);
      } else if (const auto *q = std::get_if<directive::Requests>(d)) {
        if (!tree_.contains(q->target)) {
          dropped_.insert({q->target, "requested path not found (" + by + ")"});
        } else if (excluded(q->target)) {
          dropped_.insert({q->target, "excluded by command line"});
        } else {
          include(q->target, Strength::Include, by);
        }
      } else if (const auto *def = std::get_if<directive::Default>(d)) {
        std::string child = tree_path::join(node.path, def->child);
        const UnitNode *target = tree_.find(child);
        if (!target || target->kind != NodeKind::ImplementationDir)
          throw Error(ErrorKind::InvalidDefault, by,
                      "DEFAULT '" + def->child + "' is not an implementation directory of " +
                          node.path);
        if (excluded(child)) {
          dropped_.insert({child, "default excluded by command line"});
        } else {
          add(child, Strength::Default, by);
        }
      }
    }
  }

  void include(const std::string &path, Strength strength, const std::string &by) {
    for (const auto &prefix : tree_path::lineage(path)) add(prefix, strength, by);
  }

  // Adds one node whose ancestors are already included.
  void add(const std::string &path, Strength strength, const std::string &by) {
    const UnitNode &node = tree_.at(path);
    if (node.kind == NodeKind::ImplementationDir &&
        !claim(tree_path::parent(path), node.name(), strength, by))
      return;
    if (!included_.insert(path).second) return;
    pending_.insert(path);

    if (auto pin = req_.impl_choices.find(path); pin != req_.impl_choices.end())
      add(tree_path::join(path, pin->second), Strength::Explicit, "--unit-impl");

    if (node.kind == NodeKind::UnitRoot) {
      std::string main = tree_path::join(path, node.name() + "Main");
      if (tree_.contains(main)) {
        if (excluded(main))
          dropped_.insert({main, "main subunit excluded by command line"});
        else
          add(main, Strength::Include, by);
      }
    }
  }

  // Returns false when the claim loses to a stronger existing choice.
  bool claim(const std::string &group, const std::string &child, Strength strength,
             const std::string &by) {
    auto pin = req_.impl_choices.find(group);
    auto over = overridden_.find(group);
    auto existing = chosen_.find(group);

    if (strength == Strength::Default) {
      if (pin != req_.impl_choices.end() && pin->second != child) return false;
      if (over != overridden_.end() && over->second != child) return false;
      if (existing != chosen_.end()) return existing->second.child == child;
    } else if (strength == Strength::Include) {
      if (pin != req_.impl_choices.end() && pin->second != child)
        throw Error(ErrorKind::ImplementationConflict, group,
                    "--unit-impl selects '" + pin->second + "' but " + by + " requires '" +
                        child + "'");
      if (existing != chosen_.end() && existing->second.child != child) {
        if (existing->second.strength == Strength::Default) throw Restart{group, child};
        throw Error(ErrorKind::ImplementationConflict, group,
                    "'" + existing->second.child + "' (from " + existing->second.by + ") and '" +
                        child + "' (from " + by + ") are exclusive alternatives");
      }
    } else if (existing != chosen_.end() && existing->second.child != child) {
      throw Error(ErrorKind::ImplementationConflict, group,
                  "--unit-impl selects '" + child + "' but '" + existing->second.child +
                      "' is required by " + existing->second.by);
    }

    if (existing == chosen_.end())
      chosen_.emplace(group, Claim{child, strength, by});
    else if (strength > existing->second.strength)
      existing->second = Claim{child, strength, by};
    return true;
  }

  const UnitTree &tree_;
  const SetupRequest &req_;
  const std::map<std::string, std::string> &overridden_;

  std::set<std::string> included_;
  std::set<std::string> pending_;
  std::map<std::string, Claim> chosen_;
  std::set<DroppedRequest> dropped_;
};

void check_request(const UnitTree &tree, const SetupRequest &req) {
  const auto &sims = tree.simulations;
  if (!std::binary_search(sims.begin(), sims.end(), req.simulation_name))
    throw Error(ErrorKind::UnknownSimulation, UnitTree::setup_path(req.simulation_name),
                "no Simulation setup named '" + req.simulation_name + "'");
  for (const auto &w : req.with_units)
    if (!tree.contains(w))
      throw Error(ErrorKind::UnknownOverrideTarget, w, describe(req, "--with-unit names no directory"));
  for (const auto &w : req.without_units) {
    if (!tree.contains(w))
      throw Error(ErrorKind::UnknownOverrideTarget, w, describe(req, "--without-unit names no directory"));
    if (std::find(req.with_units.begin(), req.with_units.end(), w) != req.with_units.end())
      throw Error(ErrorKind::InvalidRequest, w, "path given to both --with-unit and --without-unit");
  }
  for (const auto &[group, child] : req.impl_choices) {
    const UnitNode *target = tree.find(tree_path::join(group, child));
    if (!tree.contains(group) || !target || target->kind != NodeKind::ImplementationDir)
      throw Error(ErrorKind::UnknownOverrideTarget, group,
                  describe(req, "--unit-impl: '" + child + "' is not an implementation of " + group));
  }
}

}  // namespace

UnitClosure resolve(const UnitTree &tree, const SetupRequest &req) {
  check_request(tree, req);
  std::map<std::string, std::string> overridden;
  for (;;) {
    try {
      return Pass(tree, req, overridden).run();
    } catch (const Restart &r) {
      overridden[r.group] = r.child;
    }
  }
}

std::vector<ExclusiveGroup> exclusive_groups(const UnitTree &tree, std::string_view unit) {
  std::vector<ExclusiveGroup> groups;
  for (const auto &[path, node] : tree.nodes) {
    if (!tree_path::is_within(path, unit)) continue;
    ExclusiveGroup g{path, {}};
    for (const auto &child : node.children)
      if (tree.at(tree_path::join(path, child)).kind == NodeKind::ImplementationDir)
        g.children.push_back(child);
    if (!g.children.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<std::map<std::string, std::string>> enumerate_valid_configurations(
    const UnitTree &tree, std::string_view unit) {
  const UnitNode &root = tree.at(unit);
  if (root.kind != NodeKind::UnitRoot)
    throw Error(ErrorKind::UnknownName, std::string(unit), "not a unit root");

  std::vector<std::map<std::string, std::string>> out{{}};
  for (const auto &group : exclusive_groups(tree, unit)) {
    std::vector<std::map<std::string, std::string>> next;
    next.reserve(out.size() * group.children.size());
    for (const auto &partial : out) {
      for (const auto &child : group.children) {
        auto choice = partial;
        choice.emplace(group.path, child);
        next.push_back(std::move(choice));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace composekit
