#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "composekit/config_lang.hpp"
#include "composekit/resolver.hpp"
#include "composekit/tree_scanner.hpp"

namespace composekit {

/// One file that could provide a routine.
struct Candidate {
  std::string path;
  int depth = 0;              // directory depth from the tree root
  bool in_setup = false;      // lives in the chosen Simulation setup directory
  bool is_stub = false;       // null implementation at a unit root

  friend bool operator==(const Candidate &, const Candidate &) = default;
};

struct FileSelection {
  Candidate selected;
  std::vector<Candidate> candidates;  // ordered by ascending precedence
  std::string rule;                   // short description of why `selected` won
};

using FileMap = std::map<std::string, FileSelection>;

/// Selects one file per routine. Candidates are the owning unit's null stub,
/// same-stem files in included directories and same-stem files in the setup
/// directory. A setup file beats everything; otherwise the deepest directory
/// wins and a tie at the maximal depth is an AmbiguousImplementation.
FileMap select_implementations(const UnitTree &tree, const UnitClosure &closure);

struct ParameterLayer {
  std::string source;  // directory path of the declaring Config, or "parfile"
  Literal value;

  friend bool operator==(const ParameterLayer &, const ParameterLayer &) = default;
};

struct ParameterEntry {
  ParamType type = ParamType::Integer;
  Literal effective_value;
  Literal default_value;
  std::string defining_path;
  std::vector<ParameterLayer> overridden_by;  // ascending precedence

  /// Defining layer followed by every override.
  std::vector<ParameterLayer> chain() const;
};

using ParameterTable = std::map<std::string, ParameterEntry>;

/// Precedence, ascending: unit-root Config < deeper Configs < setup Config <
/// parfile.
ParameterTable merge_parameters(const UnitTree &tree, const UnitClosure &closure,
                                const std::optional<ParFile> &parfile = std::nullopt);

using VariableIndex = std::map<std::string, int>;

VariableIndex assign_variable_indices(const UnitTree &tree, const UnitClosure &closure);

struct InitOrder {
  std::vector<std::string> init;
  std::vector<std::string> warnings;

  std::vector<std::string> finalize() const { return {init.rbegin(), init.rend()}; }
};

inline constexpr const char *kDriverUnit = "Driver";

/// Edges B -> A whenever an included Config under unit A REQUIRES a path under
/// unit B. Kahn's algorithm with lexicographic tie-break; a cycle is broken by
/// releasing the smallest remaining unit and recording a warning. The Driver
/// is the caller and is left out.
InitOrder compute_init_order(const UnitTree &tree, const UnitClosure &closure);

/// Unit-level dependency edges (dependency, dependent) used by
/// compute_init_order.
std::vector<std::pair<std::string, std::string>> unit_dependency_edges(const UnitTree &tree,
                                                                       const UnitClosure &closure);

}  // namespace composekit
