#pragma once

// Golden-baseline regression runner over setup invocations.
//
// Suite file, one case per line (blank lines and '#' comments ignored):
//
//   TEST <name> <fixture> :: <argv...> :: <exit>
//
// <fixture> is a tree directory relative to the suite file. Baselines live in
// `baselines/` beside the suite file: `<name>.manifest` holds the emitted text
// manifest (absent when the case emits none) and `<name>.report` the sorted
// diagnostic output of the invocation.

#include <filesystem>
#include <string>
#include <vector>

#include "composekit/tree_scanner.hpp"

namespace composekit::harness {

struct Expected {
  std::filesystem::path manifest_baseline;
  std::filesystem::path report_baseline;
  int exit_status = 0;
};

struct TestCase {
  std::string name;
  std::string tree_fixture;
  std::vector<std::string> argv;
  Expected expected;
};

struct SuiteSpec {
  std::filesystem::path suite_dir;
  std::vector<TestCase> cases;
};

SuiteSpec parse_suite(std::string_view text, const std::filesystem::path &suite_dir);
SuiteSpec load_suite(const std::filesystem::path &suite_file);
std::string render_case(const TestCase &tc);

enum class Mode { Check, Record };

struct CaseResult {
  std::string name;
  bool passed = false;
  int exit_status = 0;
  std::string manifest_diff;  // unified diff, baseline -> actual
  std::string report_diff;
  std::string message;
};

struct SuiteReport {
  std::vector<CaseResult> cases;  // in suite order

  bool all_passed() const;
  std::string to_text() const;
};

/// Runs every case in an isolated scratch objdir. Check mode compares against
/// baselines; record mode rewrites baselines whose content changed.
SuiteReport run_suite(const SuiteSpec &spec, Mode mode);

/// One case per `Simulation/unitTest/<X>` setup, argv `setup unitTest/<X>`.
std::vector<TestCase> discover_unit_tests(const UnitTree &tree, std::string_view fixture = ".");

/// Line-based unified diff; empty when the inputs are equal.
std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view before_label, std::string_view after_label,
                         int context = 1);

}  // namespace composekit::harness
