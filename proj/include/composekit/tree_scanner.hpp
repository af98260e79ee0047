#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "composekit/config_lang.hpp"

namespace composekit {

/// How a directory participates in the unit architecture.
///
///   UnitRoot             capitalized directory at depth 1 (holds the null stubs)
///   Subunit              child of a unit root named <Unit><Capitalized...>
///   ImplementationDir    all-lowercase directory; siblings are mutually exclusive
///   UnitTestDir          `unitTest` directory inside a unit's hierarchy
///   SimulationContainer  `Simulation` itself and organizational groupings below it
///   SimulationSetup      one application below `Simulation`
enum class NodeKind {
  UnitRoot,
  Subunit,
  ImplementationDir,
  UnitTestDir,
  SimulationContainer,
  SimulationSetup,
};

std::string_view to_string(NodeKind kind);

inline constexpr const char *kSimulationUnit = "Simulation";
inline constexpr const char *kUnitTestDir = "unitTest";

struct SourceFile {
  std::string path;           // tree-relative, including extension
  std::string routine_name;   // file stem
  std::vector<std::string> declared_data_uses;  // from `!!DATA <ident>` lines
  bool has_doc_header = false;

  friend bool operator==(const SourceFile &, const SourceFile &) = default;
};

struct UnitNode {
  std::string path;
  NodeKind kind = NodeKind::UnitRoot;
  std::optional<ConfigFile> config;
  std::vector<SourceFile> source_files;  // sorted by path
  std::vector<std::string> children;     // sorted names

  std::string name() const;
};

struct UnitTree {
  std::filesystem::path root_path;
  std::map<std::string, UnitNode> nodes;  // keyed by tree-relative path
  std::vector<std::string> simulations;   // sorted setup names relative to Simulation/

  const UnitNode *find(std::string_view path) const;
  const UnitNode &at(std::string_view path) const;
  bool contains(std::string_view path) const { return find(path) != nullptr; }

  /// Names of all unit roots, sorted.
  std::vector<std::string> units() const;

  /// Path of the node for a setup name such as "Sedov" or "unitTest/ParticlesMove".
  static std::string setup_path(std::string_view setup_name);
};

struct ApiRoutine {
  std::string name;
  std::string owning_unit;
  std::string stub_path;
  std::optional<std::string> subunit_assignment;

  friend bool operator==(const ApiRoutine &, const ApiRoutine &) = default;
};

/// Returns the entries of one directory. Injectable so tests can feed a
/// scrambled enumeration order.
using DirectoryLister =
    std::function<std::vector<std::filesystem::directory_entry>(const std::filesystem::path &)>;

struct ScanOptions {
  std::vector<std::string> source_extensions{".F90"};
  /// Top-level directory names skipped entirely (besides hidden directories).
  std::vector<std::string> ignored_top_level{"object"};
  DirectoryLister lister;  // defaults to std::filesystem::directory_iterator
};

UnitTree scan_tree(const std::filesystem::path &root, const ScanOptions &options = {});

/// The routines published by `unit`: one per source file at the unit root.
/// Also accepts the Simulation unit, whose root stubs are overridden by setups.
std::vector<ApiRoutine> discover_api(const UnitTree &tree, std::string_view unit);

std::vector<std::string> list_simulations(const UnitTree &tree);

/// `<Unit>_data` names a unit's data module, never an API routine.
bool is_data_module_name(std::string_view routine, std::string_view unit);

/// The unit a `<Unit>_tail` routine name claims to belong to, if that unit
/// exists in the tree.
std::optional<std::string> api_owner(const UnitTree &tree, std::string_view routine);

/// Text listing of every node, one per line: `<KIND> <path>`.
std::string render_classification(const UnitTree &tree);

}  // namespace composekit
