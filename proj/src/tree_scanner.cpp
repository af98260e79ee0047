#include "composekit/tree_scanner.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"

namespace fs = std::filesystem;

namespace composekit {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::UnitRoot: return "UnitRoot";
    case NodeKind::Subunit: return "Subunit";
    case NodeKind::ImplementationDir: return "ImplementationDir";
    case NodeKind::UnitTestDir: return "UnitTestDir";
    case NodeKind::SimulationContainer: return "SimulationContainer";
    case NodeKind::SimulationSetup: return "SimulationSetup";
  }
  return "?";
}

std::string UnitNode::name() const { return tree_path::basename(path); }

const UnitNode *UnitTree::find(std::string_view path) const {
  auto it = nodes.find(std::string(path));
  return it == nodes.end() ? nullptr : &it->second;
}

const UnitNode &UnitTree::at(std::string_view path) const {
  if (const auto *node = find(path)) return *node;
  throw Error(ErrorKind::UnknownName, std::string(path), "no such directory in the tree");
}

std::vector<std::string> UnitTree::units() const {
  std::vector<std::string> out;
  for (const auto &[path, node] : nodes)
    if (node.kind == NodeKind::UnitRoot) out.push_back(path);
  return out;
}

std::string UnitTree::setup_path(std::string_view setup_name) {
  return tree_path::join(kSimulationUnit, setup_name);
}

namespace {

bool all_of_chars(std::string_view s, bool (*pred)(char)) {
  return std::all_of(s.begin(), s.end(), pred);
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) { return is_alnum(c) || c == '_'; }
bool is_lower_ident_char(char c) {
  return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '_';
}
bool is_setup_char(char c) { return is_ident_char(c) || c == '-' || c == '.'; }

bool is_unit_name(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0])) &&
         all_of_chars(name, is_alnum);
}

bool is_subunit_name(std::string_view name, std::string_view unit) {
  return name.size() > unit.size() && name.substr(0, unit.size()) == unit &&
         std::isupper(static_cast<unsigned char>(name[unit.size()])) &&
         all_of_chars(name, is_alnum);
}

bool is_implementation_name(std::string_view name) {
  return !name.empty() && std::islower(static_cast<unsigned char>(name[0])) &&
         all_of_chars(name, is_lower_ident_char);
}

bool is_setup_name(std::string_view name) {
  return !name.empty() && name[0] != '.' && all_of_chars(name, is_setup_char);
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view ltrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

SourceFile read_source(const fs::path &file, const std::string &rel_path) {
  SourceFile src;
  src.path = rel_path;
  src.routine_name = file.stem().string();
  std::string text = read_file(file);
  std::istringstream lines(text);
  std::string line;
  bool seen_content = false;
  while (std::getline(lines, line)) {
    auto view = ltrim(line);
    if (view.empty()) continue;
    if (!seen_content) {
      src.has_doc_header = view.rfind("!!****", 0) == 0;
      seen_content = true;
    }
    if (view.rfind("!!DATA", 0) == 0) {
      auto rest = view.substr(6);
      if (rest.empty() || !std::isspace(static_cast<unsigned char>(rest.front()))) continue;
      std::istringstream words{std::string(rest)};
      std::string ident;
      if (words >> ident) src.declared_data_uses.push_back(ident);
    }
  }
  return src;
}

struct Listing {
  std::vector<std::string> dirs;   // sorted
  std::vector<std::string> files;  // sorted
};

class Scanner {
 public:
  Scanner(fs::path root, const ScanOptions &options) : root_(std::move(root)), options_(options) {
    if (!options_.lister) {
      options_.lister = [](const fs::path &dir) {
        std::vector<fs::directory_entry> out;
        for (const auto &entry : fs::directory_iterator(dir)) out.push_back(entry);
        return out;
      };
    }
  }

  UnitTree run() {
    std::error_code ec;
    if (!fs::is_directory(root_, ec))
      throw Error(ErrorKind::NotADirectory, root_.string(), "tree root is not a directory");

    UnitTree tree;
    tree.root_path = root_;
    Listing top = list(root_);
    if (std::find(top.dirs.begin(), top.dirs.end(), kSimulationUnit) == top.dirs.end())
      throw Error(ErrorKind::MissingSimulationUnit, "",
                  "tree root has no '" + std::string(kSimulationUnit) + "' directory");

    for (const auto &name : top.dirs) {
      if (name.front() == '.') continue;
      if (std::find(options_.ignored_top_level.begin(), options_.ignored_top_level.end(), name) !=
          options_.ignored_top_level.end())
        continue;
      if (name == kSimulationUnit) {
        walk(tree, name, NodeKind::SimulationContainer);
      } else if (is_unit_name(name)) {
        walk(tree, name, NodeKind::UnitRoot);
      } else {
        throw Error(ErrorKind::ClassificationError, name,
                    "top-level directory must be a capitalized unit name");
      }
    }

    for (const auto &[path, node] : tree.nodes)
      if (node.kind == NodeKind::SimulationSetup)
        tree.simulations.push_back(path.substr(std::string(kSimulationUnit).size() + 1));
    std::sort(tree.simulations.begin(), tree.simulations.end());
    return tree;
  }

 private:
  Listing list(const fs::path &dir) const {
    Listing out;
    for (const auto &entry : options_.lister(dir)) {
      std::error_code ec;
      if (entry.is_symlink(ec)) continue;
      std::string name = entry.path().filename().string();
      if (entry.is_directory(ec)) {
        out.dirs.push_back(name);
      } else if (entry.is_regular_file(ec)) {
        out.files.push_back(name);
      }
    }
    std::sort(out.dirs.begin(), out.dirs.end());
    std::sort(out.files.begin(), out.files.end());
    return out;
  }

  bool is_source(const std::string &filename) const {
    auto ext = fs::path(filename).extension().string();
    return std::find(options_.source_extensions.begin(), options_.source_extensions.end(), ext) !=
           options_.source_extensions.end();
  }

  NodeKind classify(const UnitNode &parent, const std::string &name,
                    const std::string &rel) const {
    switch (parent.kind) {
      case NodeKind::SimulationContainer: {
        if (!is_setup_name(name))
          throw Error(ErrorKind::ClassificationError, rel, "invalid Simulation setup name");
        Listing inner = list(root_ / rel);
        bool has_config = std::find(inner.files.begin(), inner.files.end(), "Config") != inner.files.end();
        bool has_source = std::any_of(inner.files.begin(), inner.files.end(),
                                      [&](const std::string &f) { return is_source(f); });
        bool has_subdirs = std::any_of(inner.dirs.begin(), inner.dirs.end(),
                                       [](const std::string &d) { return d.front() != '.'; });
        if (has_config || has_source || !has_subdirs) return NodeKind::SimulationSetup;
        return NodeKind::SimulationContainer;
      }
      case NodeKind::SimulationSetup:
        throw Error(ErrorKind::ClassificationError, rel,
                    "Simulation setups cannot contain subdirectories");
      default:
        break;
    }
    std::string unit = tree_path::top_component(rel);
    if (name == kUnitTestDir) return NodeKind::UnitTestDir;
    if (parent.kind == NodeKind::UnitRoot && is_subunit_name(name, unit)) return NodeKind::Subunit;
    if (is_implementation_name(name)) return NodeKind::ImplementationDir;
    throw Error(ErrorKind::ClassificationError, rel,
                "'" + name + "' is neither a " + unit + "* subunit, a lowercase implementation, nor " +
                    kUnitTestDir);
  }

  void walk(UnitTree &tree, const std::string &rel, NodeKind kind) {
    UnitNode node;
    node.path = rel;
    node.kind = kind;
    fs::path dir = root_ / rel;
    Listing listing = list(dir);

    std::set<std::string> stems;
    for (const auto &file : listing.files) {
      if (file == "Config") {
        node.config = parse_config(read_file(dir / file), rel);
      } else if (is_source(file)) {
        std::string file_rel = tree_path::join(rel, file);
        SourceFile src = read_source(dir / file, file_rel);
        if (!is_identifier(src.routine_name))
          throw Error(ErrorKind::ClassificationError, file_rel,
                      "source file stem is not a routine name");
        if (!stems.insert(src.routine_name).second)
          throw Error(ErrorKind::ClassificationError, file_rel,
                      "routine '" + src.routine_name + "' defined twice in one directory");
        node.source_files.push_back(std::move(src));
      }
    }

    std::vector<std::pair<std::string, NodeKind>> kids;
    for (const auto &name : listing.dirs) {
      if (name.front() == '.') continue;
      std::string child = tree_path::join(rel, name);
      kids.emplace_back(name, classify(node, name, child));
      node.children.push_back(name);
    }
    tree.nodes.emplace(rel, std::move(node));
    for (const auto &[name, child_kind] : kids) walk(tree, tree_path::join(rel, name), child_kind);
  }

  fs::path root_;
  ScanOptions options_;
};

}  // namespace

UnitTree scan_tree(const fs::path &root, const ScanOptions &options) {
  return Scanner(root, options).run();
}

bool is_data_module_name(std::string_view routine, std::string_view unit) {
  return routine.size() == unit.size() + 5 && routine.substr(0, unit.size()) == unit &&
         routine.substr(unit.size()) == "_data";
}

std::optional<std::string> api_owner(const UnitTree &tree, std::string_view routine) {
  auto us = routine.find('_');
  if (us == std::string_view::npos || us == 0 || us + 1 == routine.size()) return std::nullopt;
  std::string prefix(routine.substr(0, us));
  const auto *node = tree.find(prefix);
  if (!node) return std::nullopt;
  if (node->kind != NodeKind::UnitRoot && prefix != kSimulationUnit) return std::nullopt;
  if (is_data_module_name(routine, prefix)) return std::nullopt;
  return prefix;
}

std::vector<ApiRoutine> discover_api(const UnitTree &tree, std::string_view unit) {
  const UnitNode &node = tree.at(unit);
  if (node.kind != NodeKind::UnitRoot && node.path != kSimulationUnit)
    throw Error(ErrorKind::UnknownName, node.path, "not a unit root");
  std::vector<ApiRoutine> api;
  const std::string prefix = std::string(unit) + "_";
  for (const auto &src : node.source_files) {
    const auto &name = src.routine_name;
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0 ||
        is_data_module_name(name, unit))
      throw Error(ErrorKind::NonApiFileAtRoot, src.path,
                  "unit-root files must be API stubs named " + prefix + "<name>");
    api.push_back({name, std::string(unit), src.path, std::nullopt});
  }
  std::sort(api.begin(), api.end(),
            [](const ApiRoutine &a, const ApiRoutine &b) { return a.name < b.name; });
  return api;
}

std::vector<std::string> list_simulations(const UnitTree &tree) { return tree.simulations; }

std::string render_classification(const UnitTree &tree) {
  std::string out;
  for (const auto &[path, node] : tree.nodes) {
    out += to_string(node.kind);
    out += ' ';
    out += path;
    if (node.config) out += " [Config]";
    out += '\n';
    for (const auto &src : node.source_files) {
      out += "  FILE ";
      out += src.path;
      if (src.has_doc_header) out += " doc";
      for (const auto &d : src.declared_data_uses) out += " data=" + d;
      out += '\n';
    }
  }
  return out;
}

}  // namespace composekit
