#include "composekit/arbitrator.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"

namespace composekit {

namespace {

bool by_precedence(const Candidate &a, const Candidate &b) {
  return std::tie(a.in_setup, a.depth, a.path) < std::tie(b.in_setup, b.depth, b.path);
}

std::vector<std::string> stub_roots(const UnitTree &tree) {
  auto roots = tree.units();
  if (tree.contains(kSimulationUnit)) roots.emplace_back(kSimulationUnit);
  return roots;
}

}  // namespace

FileMap select_implementations(const UnitTree &tree, const UnitClosure &closure) {
  std::map<std::string, std::vector<Candidate>> candidates;
  const std::string setup = closure.setup_path();

  const auto roots = stub_roots(tree);
  for (const auto &root : roots)
    for (const auto &api : discover_api(tree, root))
      candidates[api.name].push_back({api.stub_path, 1, false, true});

  for (const auto &path : closure.included) {
    if (std::find(roots.begin(), roots.end(), path) != roots.end()) continue;
    const UnitNode &node = tree.at(path);
    if (node.kind == NodeKind::SimulationSetup && path != setup) continue;
    const bool in_setup = path == setup;
    for (const auto &src : node.source_files)
      candidates[src.routine_name].push_back(
          {src.path, tree_path::depth(path), in_setup, false});
  }

  FileMap map;
  for (auto &[routine, list] : candidates) {
    std::sort(list.begin(), list.end(), by_precedence);
    const bool has_stub = std::any_of(list.begin(), list.end(), [](const Candidate &c) { return c.is_stub; });
    const bool has_unit_impl = std::any_of(list.begin(), list.end(),
                                           [](const Candidate &c) { return !c.is_stub && !c.in_setup; });
    if (!has_stub && has_unit_impl && api_owner(tree, routine))
      throw Error(ErrorKind::MissingStub, list.back().path,
                  "routine " + routine + " is implemented but has no null stub at unit root " +
                      *api_owner(tree, routine));

    FileSelection sel;
    sel.selected = list.back();
    if (sel.selected.in_setup) {
      sel.rule = "simulation setup override";
    } else {
      if (list.size() >= 2) {
        const Candidate &runner_up = list[list.size() - 2];
        if (runner_up.depth == sel.selected.depth)
          throw Error(ErrorKind::AmbiguousImplementation, routine,
                      "candidates " + runner_up.path + " and " + sel.selected.path +
                          " tie at depth " + std::to_string(sel.selected.depth));
      }
      if (sel.selected.is_stub)
        sel.rule = "null implementation";
      else if (list.size() == 1)
        sel.rule = "only candidate";
      else
        sel.rule = "deepest included directory";
    }
    sel.candidates = std::move(list);
    map.emplace(routine, std::move(sel));
  }
  return map;
}

std::vector<ParameterLayer> ParameterEntry::chain() const {
  std::vector<ParameterLayer> out;
  out.push_back({defining_path, default_value});
  out.insert(out.end(), overridden_by.begin(), overridden_by.end());
  return out;
}

ParameterTable merge_parameters(const UnitTree &tree, const UnitClosure &closure,
                                const std::optional<ParFile> &parfile) {
  struct Definition {
    Literal value;
    std::string source;
    std::string config_path;
    int depth;
    bool in_setup;
  };
  std::map<std::string, std::vector<Definition>> defs;
  const std::string setup = closure.setup_path();

  for (const auto &path : closure.included) {
    const UnitNode &node = tree.at(path);
    if (!node.config) continue;
    for (const auto &d : node.config->directives)
      if (const auto *p = std::get_if<directive::Parameter>(&d))
        defs[p->name].push_back({p->value, path, node.config->file_path(),
                                 tree_path::depth(path), path == setup});
  }

  ParameterTable table;
  for (auto &[name, list] : defs) {
    std::sort(list.begin(), list.end(), [](const Definition &a, const Definition &b) {
      return std::tie(a.in_setup, a.depth, a.source) < std::tie(b.in_setup, b.depth, b.source);
    });
    for (size_t i = 1; i < list.size(); ++i) {
      if (list[i].value.type != list[0].value.type)
        throw Error(ErrorKind::ConflictingTypes, list[i].config_path,
                    "parameter " + name + " declared " + std::string(to_string(list[i].value.type)) +
                        " here but " + std::string(to_string(list[0].value.type)) + " in " +
                        list[0].config_path);
      if (!list[i].in_setup && list[i].depth == list[i - 1].depth &&
          list[i].value != list[i - 1].value)
        throw Error(ErrorKind::AmbiguousParameter, list[i].config_path,
                    "parameter " + name + " has conflicting defaults at equal depth in " +
                        list[i - 1].config_path + " and " + list[i].config_path);
    }
    ParameterEntry entry;
    entry.type = list[0].value.type;
    entry.default_value = list[0].value;
    entry.defining_path = list[0].source;
    for (size_t i = 1; i < list.size(); ++i)
      entry.overridden_by.push_back({list[i].source, list[i].value});
    table.emplace(name, std::move(entry));
  }

  if (parfile) {
    for (const auto &[name, assignment] : parfile->effective()) {
      auto it = table.find(name);
      if (it == table.end())
        throw Error(ErrorKind::UnknownParameter, parfile->path, assignment.line,
                    "parameter " + name + " is not declared by any included Config");
      auto typed = parse_runtime_value(it->second.type, assignment.value);
      if (!typed)
        throw Error(ErrorKind::TypeMismatch, parfile->path, assignment.line,
                    "parameter " + name + " is " + std::string(to_string(it->second.type)) +
                        ", got '" + assignment.value + "'");
      it->second.overridden_by.push_back({"parfile", *typed});
    }
  }

  for (auto &[name, entry] : table) entry.effective_value = entry.chain().back().value;
  return table;
}

VariableIndex assign_variable_indices(const UnitTree &tree, const UnitClosure &closure) {
  std::set<std::string> names;
  for (const auto &path : closure.included) {
    const UnitNode &node = tree.at(path);
    if (!node.config) continue;
    for (const auto &d : node.config->directives)
      if (const auto *v = std::get_if<directive::Variable>(&d)) names.insert(v->name);
  }
  VariableIndex index;
  int next = 1;
  for (const auto &name : names) index.emplace(name, next++);
  return index;
}

std::vector<std::pair<std::string, std::string>> unit_dependency_edges(const UnitTree &tree,
                                                                       const UnitClosure &closure) {
  auto is_member = [&](const std::string &unit) {
    const UnitNode *node = tree.find(unit);
    return node && node->kind == NodeKind::UnitRoot && unit != kDriverUnit &&
           closure.contains(unit);
  };
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto &path : closure.included) {
    const UnitNode &node = tree.at(path);
    if (!node.config) continue;
    std::string dependent = tree_path::top_component(path);
    if (!is_member(dependent)) continue;
    for (const auto &d : node.config->directives) {
      const auto *r = std::get_if<directive::Requires>(&d);
      if (!r) continue;
      std::string dependency = tree_path::top_component(r->target);
      if (dependency != dependent && is_member(dependency)) edges.emplace(dependency, dependent);
    }
  }
  return {edges.begin(), edges.end()};
}

InitOrder compute_init_order(const UnitTree &tree, const UnitClosure &closure) {
  std::set<std::string> remaining;
  for (const auto &unit : tree.units())
    if (unit != kDriverUnit && closure.contains(unit)) remaining.insert(unit);

  std::map<std::string, std::set<std::string>> deps;  // unit -> unmet dependencies
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto &[dependency, dependent] : unit_dependency_edges(tree, closure)) {
    deps[dependent].insert(dependency);
    dependents[dependency].push_back(dependent);
  }

  InitOrder order;
  while (!remaining.empty()) {
    auto next = std::find_if(remaining.begin(), remaining.end(),
                             [&](const std::string &u) { return deps[u].empty(); });
    if (next == remaining.end()) {
      next = remaining.begin();
      std::string cycle;
      for (const auto &u : remaining) cycle += (cycle.empty() ? "" : ", ") + u;
      order.warnings.push_back("dependency cycle among units {" + cycle + "}; initializing " +
                               *next + " first");
    }
    std::string unit = *next;
    remaining.erase(next);
    order.init.push_back(unit);
    for (const auto &d : dependents[unit]) deps[d].erase(unit);
  }
  return order;
}

}  // namespace composekit
