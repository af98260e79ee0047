#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "composekit/tree_scanner.hpp"

namespace composekit {

struct SetupRequest {
  std::string simulation_name;
  std::vector<std::string> with_units;
  std::vector<std::string> without_units;
  std::map<std::string, std::string> impl_choices;  // group path -> child name
  std::optional<std::string> parfile_path;
};

struct DroppedRequest {
  std::string path;
  std::string reason;

  friend auto operator<=>(const DroppedRequest &, const DroppedRequest &) = default;
};

struct UnitClosure {
  std::string simulation_name;
  std::set<std::string> included;                   // node paths, lexicographic
  std::map<std::string, std::string> chosen_impl;   // group path -> child name
  std::vector<DroppedRequest> dropped_requests;     // sorted

  bool contains(std::string_view path) const { return included.count(std::string(path)) > 0; }
  std::string setup_path() const { return UnitTree::setup_path(simulation_name); }

  friend bool operator==(const UnitClosure &, const UnitClosure &) = default;
};

/// Computes the inclusion closure of one application.
///
/// The setup's node is seeded, then every included node's Config is processed
/// until nothing new is added. REQUIRES targets must exist and must not be
/// excluded; REQUESTS targets are included unless they (or an ancestor) are in
/// `without_units`; DEFAULT picks an implementation child unless something
/// stronger already chose one. Including any path includes its ancestors, and
/// including a unit root includes its `<Unit>Main` subunit.
///
/// Sibling implementation directories are exclusive. Claims on one group are
/// ranked command line > inclusion (REQUIRES, REQUESTS, --with-unit) >
/// DEFAULT. An inclusion that contradicts a DEFAULT replaces it; any other
/// disagreement is an ImplementationConflict.
UnitClosure resolve(const UnitTree &tree, const SetupRequest &req);

struct ExclusiveGroup {
  std::string path;                   // parent directory
  std::vector<std::string> children;  // implementation names, sorted
};

/// Every node under `unit` (the root included) that has implementation
/// children, sorted by path.
std::vector<ExclusiveGroup> exclusive_groups(const UnitTree &tree, std::string_view unit);

/// Cartesian product over the unit's exclusive groups. The first group varies
/// slowest. A unit without groups yields a single empty map.
std::vector<std::map<std::string, std::string>> enumerate_valid_configurations(
    const UnitTree &tree, std::string_view unit);

}  // namespace composekit
