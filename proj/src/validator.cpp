#include "composekit/validator.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "composekit/tree_path.hpp"

namespace composekit {

std::string_view to_string(Severity s) { return s == Severity::Error ? "ERROR" : "WARNING"; }

bool ValidationReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding &f) { return f.severity == Severity::Error; });
}

std::map<std::string, int> ValidationReport::summary() const {
  std::map<std::string, int> out;
  for (const auto &f : findings) ++out[f.rule_id];
  return out;
}

std::string ValidationReport::to_text() const {
  std::string out;
  for (const auto &f : findings) {
    out += to_string(f.severity);
    out += ' ' + f.rule_id + ' ' + f.path + ": " + f.message + '\n';
  }
  return out;
}

std::string ValidationReport::to_json_lines() const {
  std::string out;
  for (const auto &f : findings) {
    nlohmann::json j;
    j["rule"] = f.rule_id;
    j["severity"] = to_string(f.severity);
    j["path"] = f.path;
    j["message"] = f.message;
    out += j.dump() + '\n';
  }
  return out;
}

namespace {

bool is_stub_dir(const UnitNode &node) {
  return node.kind == NodeKind::UnitRoot || node.path == kSimulationUnit;
}

bool in_simulation(std::string_view path) { return tree_path::is_within(path, kSimulationUnit); }

std::string data_owner(const std::string &ident) {
  constexpr std::string_view suffix = "_data";
  if (ident.size() > suffix.size() &&
      ident.compare(ident.size() - suffix.size(), suffix.size(), suffix) == 0)
    return ident.substr(0, ident.size() - suffix.size());
  return ident.substr(0, ident.find('_'));
}

void sort_findings(Findings &f) {
  std::sort(f.begin(), f.end(), [](const Finding &a, const Finding &b) {
    return std::tie(a.path, a.rule_id, a.message) < std::tie(b.path, b.rule_id, b.message);
  });
}

Findings null_coverage_for(const UnitTree &tree, const std::string &unit) {
  std::set<std::string> stubs;
  for (const auto &src : tree.at(unit).source_files) stubs.insert(src.routine_name);

  const std::string prefix = unit + "_";
  std::map<std::string, std::string> missing;  // routine -> first implementing file
  for (const auto &[path, node] : tree.nodes) {
    if (path == unit || !tree_path::is_within(path, unit)) continue;
    for (const auto &src : node.source_files) {
      const auto &name = src.routine_name;
      if (name.compare(0, prefix.size(), prefix) != 0 || name.size() == prefix.size()) continue;
      if (is_data_module_name(name, unit) || stubs.count(name)) continue;
      missing.emplace(name, src.path);
    }
  }
  Findings out;
  for (const auto &[routine, file] : missing)
    out.push_back({kNull01, Severity::Error, unit,
                   "routine " + routine + " (implemented in " + file +
                       ") has no null implementation at the unit root"});
  return out;
}

}  // namespace

Findings check_null_coverage(const UnitTree &tree) {
  Findings out;
  for (const auto &unit : tree.units()) {
    auto f = null_coverage_for(tree, unit);
    out.insert(out.end(), f.begin(), f.end());
  }
  sort_findings(out);
  return out;
}

PartitionResult check_subunit_partition(const UnitTree &tree, std::string_view unit_view) {
  const std::string unit(unit_view);
  PartitionResult result;
  result.api = discover_api(tree, unit);
  if (result.api.empty()) return result;

  std::set<std::string> api_names;
  for (const auto &r : result.api) api_names.insert(r.name);

  std::map<std::string, std::set<std::string>> implemented;  // subunit -> routines
  std::map<std::string, std::vector<std::string>> owners;    // routine -> subunits
  const UnitNode &root = tree.at(unit);
  for (const auto &child : root.children) {
    const std::string sub = tree_path::join(unit, child);
    if (tree.at(sub).kind != NodeKind::Subunit) continue;
    auto &set = implemented[sub];
    for (const auto &[path, node] : tree.nodes) {
      if (!tree_path::is_within(path, sub)) continue;
      for (const auto &src : node.source_files)
        if (api_names.count(src.routine_name)) set.insert(src.routine_name);
    }
    for (const auto &r : set) owners[r].push_back(sub);
  }

  for (const auto &[sub, set] : implemented)
    if (set.empty())
      result.findings.push_back({kSub02, Severity::Error, sub,
                                 "subunit implements no routine of the " + unit + " API"});
  for (auto &r : result.api) {
    const auto &subs = owners[r.name];
    if (subs.size() > 1) {
      std::string list;
      for (const auto &s : subs) list += (list.empty() ? "" : ", ") + s;
      result.findings.push_back({kSub01, Severity::Error, unit,
                                 "routine " + r.name + " is implemented by several subunits: " + list});
    } else if (subs.empty()) {
      result.findings.push_back({kSub03, Severity::Error, r.stub_path,
                                 "API routine " + r.name + " is implemented by no subunit"});
    }
  }
  if (result.findings.empty())
    for (auto &r : result.api) r.subunit_assignment = tree_path::basename(owners[r.name].front());
  sort_findings(result.findings);
  return result;
}

Findings check_main_subunit(const UnitTree &tree, std::string_view unit_view) {
  const std::string unit(unit_view);
  if (discover_api(tree, unit).empty()) return {};
  const std::string main = tree_path::join(unit, unit + "Main");
  const UnitNode *node = tree.find(main);
  if (node && node->kind == NodeKind::Subunit) return {};
  return {{kMain01, Severity::Error, unit, "unit has an API but no " + unit + "Main subunit"}};
}

namespace {

Findings data_ownership_for(const UnitNode &node) {
  Findings out;
  const std::string residing = tree_path::top_component(node.path);
  for (const auto &src : node.source_files)
    for (const auto &ident : src.declared_data_uses) {
      std::string owner = data_owner(ident);
      if (owner != residing)
        out.push_back({kData01, Severity::Error, src.path,
                       "file in unit " + residing + " declares data " + ident + " owned by " + owner});
    }
  return out;
}

Findings doc_headers_for(const UnitNode &node) {
  Findings out;
  for (const auto &src : node.source_files) {
    if (src.has_doc_header) continue;
    if (is_stub_dir(node))
      out.push_back({kDoc01, Severity::Warning, src.path, "API stub lacks a !!**** documentation header"});
    else
      out.push_back({kDoc02, Severity::Warning, src.path, "source file lacks a !!**** documentation header"});
  }
  return out;
}

}  // namespace

Findings check_data_ownership(const UnitTree &tree) {
  Findings out;
  for (const auto &[path, node] : tree.nodes) {
    auto f = data_ownership_for(node);
    out.insert(out.end(), f.begin(), f.end());
  }
  sort_findings(out);
  return out;
}

Findings check_doc_headers(const UnitTree &tree) {
  Findings out;
  for (const auto &[path, node] : tree.nodes) {
    auto f = doc_headers_for(node);
    out.insert(out.end(), f.begin(), f.end());
  }
  sort_findings(out);
  return out;
}

std::vector<std::string> reached_unittest_dirs(const UnitTree &tree, std::string_view start) {
  std::vector<std::string> unit_tests;
  for (const auto &[path, node] : tree.nodes)
    if (node.kind == NodeKind::UnitTestDir && !in_simulation(path)) unit_tests.push_back(path);

  std::set<std::string> visited, reached;
  std::deque<std::string> queue{std::string(start)};
  while (!queue.empty()) {
    std::string path = queue.front();
    queue.pop_front();
    if (!visited.insert(path).second) continue;
    const UnitNode *node = tree.find(path);
    if (!node) continue;
    // Inclusion of a unit pulls in its main subunit and DEFAULT choice too.
    if (node->kind == NodeKind::UnitRoot) queue.push_back(tree_path::join(path, node->name() + "Main"));
    if (!node->config) continue;
    for (const auto &d : node->config->directives) {
      if (const auto *def = std::get_if<directive::Default>(&d))
        queue.push_back(tree_path::join(path, def->child));
      const auto *r = std::get_if<directive::Requires>(&d);
      if (!r || !tree.contains(r->target)) continue;
      for (const auto &ut : unit_tests)
        if (tree_path::is_within(r->target, ut)) reached.insert(ut);
      for (const auto &prefix : tree_path::lineage(r->target)) queue.push_back(prefix);
    }
  }
  return {reached.begin(), reached.end()};
}

namespace {

Findings unittest_pairing(const UnitTree &tree, bool include_orphans,
                          const std::optional<std::string> &only_setup) {
  Findings out;
  const std::string ut_prefix = std::string(kUnitTestDir) + "/";
  std::set<std::string> reached_any;
  for (const auto &sim : tree.simulations) {
    const std::string setup = UnitTree::setup_path(sim);
    auto reached = reached_unittest_dirs(tree, setup);
    reached_any.insert(reached.begin(), reached.end());
    if (only_setup && *only_setup != sim) continue;
    if (sim.rfind(ut_prefix, 0) == 0 && reached.empty())
      out.push_back({kUt01, Severity::Error, setup,
                     "unit-test setup requires no unitTest directory inside any unit"});
  }
  if (include_orphans)
    for (const auto &[path, node] : tree.nodes)
      if (node.kind == NodeKind::UnitTestDir && !in_simulation(path) && !reached_any.count(path))
        out.push_back({kUt02, Severity::Warning, path, "unitTest directory is not required by any Simulation setup"});
  sort_findings(out);
  return out;
}

}  // namespace

Findings check_unittest_pairing(const UnitTree &tree) {
  return unittest_pairing(tree, true, std::nullopt);
}

ValidationReport validate_all(const UnitTree &tree, const UnitClosure *closure) {
  ValidationReport report;
  auto append = [&](const Findings &f) {
    report.findings.insert(report.findings.end(), f.begin(), f.end());
  };

  append(check_null_coverage(tree));
  for (const auto &unit : tree.units()) {
    if (closure && !closure->contains(unit)) continue;
    append(check_subunit_partition(tree, unit).findings);
    append(check_main_subunit(tree, unit));
  }
  for (const auto &[path, node] : tree.nodes) {
    if (closure && !closure->contains(path)) continue;
    append(data_ownership_for(node));
    append(doc_headers_for(node));
  }
  if (closure)
    append(unittest_pairing(tree, false, closure->simulation_name));
  else
    append(check_unittest_pairing(tree));

  sort_findings(report.findings);
  return report;
}

}  // namespace composekit
