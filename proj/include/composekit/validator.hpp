#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "composekit/resolver.hpp"
#include "composekit/tree_scanner.hpp"

namespace composekit {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

struct Finding {
  std::string rule_id;
  Severity severity = Severity::Error;
  std::string path;
  std::string message;

  friend bool operator==(const Finding &, const Finding &) = default;
};

using Findings = std::vector<Finding>;

struct ValidationReport {
  Findings findings;  // sorted by (path, rule_id, message)

  bool is_clean() const { return findings.empty(); }
  bool has_errors() const;
  std::map<std::string, int> summary() const;  // rule id -> count

  /// `SEVERITY RULE path: message`, one finding per line.
  std::string to_text() const;
  /// One JSON object per line.
  std::string to_json_lines() const;
};

// Rule ids.
inline constexpr const char *kNull01 = "NULL-01";
inline constexpr const char *kSub01 = "SUB-01";
inline constexpr const char *kSub02 = "SUB-02";
inline constexpr const char *kSub03 = "SUB-03";
inline constexpr const char *kMain01 = "MAIN-01";
inline constexpr const char *kData01 = "DATA-01";
inline constexpr const char *kDoc01 = "DOC-01";
inline constexpr const char *kDoc02 = "DOC-02";
inline constexpr const char *kUt01 = "UT-01";
inline constexpr const char *kUt02 = "UT-02";

/// NULL-01: a `<Unit>_*` routine implemented below a unit root without a
/// same-stem stub at that root.
Findings check_null_coverage(const UnitTree &tree);

struct PartitionResult {
  Findings findings;
  std::vector<ApiRoutine> api;  // subunit_assignment filled in when clean
};

/// SUB-01 (routine under two subunits), SUB-02 (subunit implements no API
/// routine), SUB-03 (API routine under no subunit). Membership is decided by
/// where a routine is implemented, at any depth below the subunit.
PartitionResult check_subunit_partition(const UnitTree &tree, std::string_view unit);

/// MAIN-01: a unit with a non-empty API has no `<Unit>Main` child.
Findings check_main_subunit(const UnitTree &tree, std::string_view unit);

/// DATA-01: a `!!DATA <Unit>_data` declaration naming a unit other than the
/// one the file lives in.
Findings check_data_ownership(const UnitTree &tree);

/// DOC-01 (warning): API stub without the `!!****` header sentinel.
/// DOC-02 (warning): any other source file without it.
Findings check_doc_headers(const UnitTree &tree);

/// UT-01: a `Simulation/unitTest/<X>` setup whose REQUIRES chain reaches no
/// unit-side `unitTest` directory. UT-02 (warning): a unit-side `unitTest`
/// directory no setup reaches.
Findings check_unittest_pairing(const UnitTree &tree);

/// All rules. With a closure, per-unit and per-file rules are restricted to
/// included nodes; null coverage stays tree-wide and UT-02 is skipped.
ValidationReport validate_all(const UnitTree &tree, const UnitClosure *closure = nullptr);

/// Unit-side `unitTest` directories reached from `start` by following
/// REQUIRES transitively through the Configs of required nodes.
std::vector<std::string> reached_unittest_dirs(const UnitTree &tree, std::string_view start);

}  // namespace composekit
