#include "composekit/harness.hpp"

#include <stdlib.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "composekit/cli.hpp"
#include "composekit/error.hpp"

namespace fs = std::filesystem;

namespace composekit::harness {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::optional<std::string> read_optional(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes only when the content differs, so re-recording a passing suite leaves
// the baselines untouched.
void write_if_changed(const fs::path &p, const std::string &content) {
  if (read_optional(p) == content) return;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorKind::IoError, p.string(), "cannot write baseline");
}

std::string sorted_text(std::string_view text) {
  auto lines = split_lines(text);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto &l : lines) out += l + '\n';
  return out;
}

std::string without_hash(std::string_view text) {
  std::string out;
  for (const auto &l : split_lines(text))
    if (l.rfind("HASH ", 0) != 0) out += l + '\n';
  return out;
}

class ScratchDir {
 public:
  ScratchDir() {
    std::string templ = (fs::temp_directory_path() / "composekit-case-XXXXXX").string();
    if (!mkdtemp(templ.data())) throw Error(ErrorKind::IoError, templ, "cannot create scratch directory");
    path_ = templ;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

struct Outcome {
  int exit_status = 0;
  std::string manifest;  // empty when none was emitted
  std::string report;    // sorted lines
};

Outcome run_case(const SuiteSpec &spec, const TestCase &tc) {
  fs::path tree = spec.suite_dir / tc.tree_fixture;
  if (!fs::is_directory(tree))
    throw Error(ErrorKind::MissingFixture, tc.tree_fixture, "fixture tree for case " + tc.name + " not found");

  ScratchDir scratch;
  std::vector<std::string> args;
  for (size_t i = 0; i < tc.argv.size(); ++i) {
    args.push_back(tc.argv[i]);
    if (tc.argv[i] == "--parfile" && i + 1 < tc.argv.size()) {
      fs::path p = tc.argv[++i];
      args.push_back((p.is_absolute() ? p : spec.suite_dir / p).string());
    }
  }
  args.insert(args.end(), {"--tree", tree.string(), "--objdir", (scratch.path() / "object").string()});

  std::ostringstream out, err;
  Outcome outcome;
  outcome.exit_status = cli::run(args, out, err);
  outcome.report = sorted_text(out.str() + err.str());
  outcome.manifest = read_optional(scratch.path() / "object" / "manifest.txt").value_or("");
  return outcome;
}

}  // namespace

SuiteSpec parse_suite(std::string_view text, const fs::path &suite_dir) {
  SuiteSpec spec;
  spec.suite_dir = suite_dir;
  std::set<std::string> names;
  int line_no = 0;
  for (const auto &raw : split_lines(text)) {
    ++line_no;
    auto line = raw.substr(0, raw.find('#'));
    auto tokens = words(line);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string &why) {
      return Error(ErrorKind::MalformedSuite, "suite", line_no, why);
    };
    auto sep1 = std::find(tokens.begin(), tokens.end(), "::");
    auto sep2 = sep1 == tokens.end() ? tokens.end() : std::find(sep1 + 1, tokens.end(), "::");
    if (tokens[0] != "TEST" || sep2 == tokens.end() || sep1 - tokens.begin() != 3 ||
        tokens.end() - sep2 != 2)
      throw fail("expected 'TEST <name> <fixture> :: <argv...> :: <exit>'");
    TestCase tc;
    tc.name = tokens[1];
    tc.tree_fixture = tokens[2];
    tc.argv.assign(sep1 + 1, sep2);
    if (tc.argv.empty()) throw fail("empty argv");
    try {
      tc.expected.exit_status = std::stoi(*(sep2 + 1));
    } catch (const std::exception &) {
      throw fail("exit status is not an integer");
    }
    if (!names.insert(tc.name).second) throw fail("duplicate test name " + tc.name);
    tc.expected.manifest_baseline = suite_dir / "baselines" / (tc.name + ".manifest");
    tc.expected.report_baseline = suite_dir / "baselines" / (tc.name + ".report");
    spec.cases.push_back(std::move(tc));
  }
  return spec;
}

SuiteSpec load_suite(const fs::path &suite_file) {
  auto text = read_optional(suite_file);
  if (!text) throw Error(ErrorKind::MissingFixture, suite_file.string(), "cannot read suite file");
  return parse_suite(*text, suite_file.parent_path().empty() ? fs::path(".") : suite_file.parent_path());
}

std::string render_case(const TestCase &tc) {
  std::string out = "TEST " + tc.name + " " + tc.tree_fixture + " ::";
  for (const auto &a : tc.argv) out += " " + a;
  out += " :: " + std::to_string(tc.expected.exit_status);
  return out;
}

bool SuiteReport::all_passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult &c) { return c.passed; });
}

std::string SuiteReport::to_text() const {
  std::string out;
  int failed = 0;
  for (const auto &c : cases) {
    out += (c.passed ? "PASS " : "FAIL ") + c.name;
    if (!c.message.empty()) out += ": " + c.message;
    out += '\n';
    out += c.manifest_diff;
    out += c.report_diff;
    if (!c.passed) ++failed;
  }
  out += std::to_string(cases.size() - failed) + " passed, " + std::to_string(failed) + " failed\n";
  return out;
}

SuiteReport run_suite(const SuiteSpec &spec, Mode mode) {
  SuiteReport report;
  for (const auto &tc : spec.cases) {
    if (mode == Mode::Check && (!fs::exists(tc.expected.manifest_baseline) ||
                                !fs::exists(tc.expected.report_baseline)))
      throw Error(ErrorKind::BaselineAbsent, tc.name, "no baseline recorded for case " + tc.name);

    Outcome actual = run_case(spec, tc);
    CaseResult result;
    result.name = tc.name;
    result.exit_status = actual.exit_status;
    std::vector<std::string> problems;
    if (actual.exit_status != tc.expected.exit_status)
      problems.push_back("exit status " + std::to_string(actual.exit_status) + ", expected " +
                         std::to_string(tc.expected.exit_status));

    if (mode == Mode::Record) {
      write_if_changed(tc.expected.manifest_baseline, actual.manifest);
      write_if_changed(tc.expected.report_baseline, actual.report);
      if (problems.empty()) result.message = "recorded";
    } else {
      std::string base_manifest = read_optional(tc.expected.manifest_baseline).value_or("");
      std::string base_report = sorted_text(read_optional(tc.expected.report_baseline).value_or(""));
      if (base_manifest != actual.manifest) {
        problems.push_back("manifest differs");
        // The hash line changes with any content change; leave it out of the
        // diff unless it is the only difference.
        result.manifest_diff = unified_diff(without_hash(base_manifest), without_hash(actual.manifest),
                                            tc.name + ".manifest", "actual");
        if (result.manifest_diff.empty())
          result.manifest_diff =
              unified_diff(base_manifest, actual.manifest, tc.name + ".manifest", "actual");
      }
      if (base_report != actual.report) {
        problems.push_back("report differs");
        result.report_diff = unified_diff(base_report, actual.report, tc.name + ".report", "actual");
      }
    }
    result.passed = problems.empty();
    for (const auto &p : problems) result.message += (result.message.empty() ? "" : "; ") + p;
    report.cases.push_back(std::move(result));
  }
  return report;
}

std::vector<TestCase> discover_unit_tests(const UnitTree &tree, std::string_view fixture) {
  std::vector<TestCase> out;
  const std::string prefix = std::string(kUnitTestDir) + "/";
  for (const auto &sim : tree.simulations) {
    if (sim.rfind(prefix, 0) != 0) continue;
    TestCase tc;
    tc.name = sim;
    std::replace(tc.name.begin(), tc.name.end(), '/', '_');
    tc.tree_fixture = std::string(fixture);
    tc.argv = {"setup", sim};
    tc.expected.exit_status = 0;
    out.push_back(std::move(tc));
  }
  return out;
}

std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view before_label, std::string_view after_label, int context) {
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  if (a == b) return {};

  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Op {
    char tag;
    std::string line;
  };
  std::vector<Op> ops;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ops.push_back({' ', a[i++]});
      ++j;
    } else if (j == m || (i < n && lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', a[i++]});
    } else {
      ops.push_back({'+', b[j++]});
    }
  }

  std::string out = "--- " + std::string(before_label) + "\n+++ " + std::string(after_label) + "\n";
  const long total = static_cast<long>(ops.size());
  long k = 0;
  long a_line = 0, b_line = 0;  // lines consumed before ops[k]
  while (k < total) {
    long first_change = k;
    while (first_change < total && ops[first_change].tag == ' ') ++first_change;
    if (first_change == total) break;
    long start = std::max(k, first_change - context);
    for (long t = k; t < start; ++t) ++a_line, ++b_line;
    long end = first_change;
    for (long t = first_change; t < total; ++t) {
      if (ops[t].tag != ' ') {
        end = t + 1;
      } else if (t - end >= context * 2) {
        break;
      }
    }
    end = std::min(total, end + context);
    long a_count = 0, b_count = 0;
    for (long t = start; t < end; ++t) {
      if (ops[t].tag != '+') ++a_count;
      if (ops[t].tag != '-') ++b_count;
    }
    out += "@@ -" + std::to_string(a_line + (a_count ? 1 : 0)) + "," + std::to_string(a_count) + " +" +
           std::to_string(b_line + (b_count ? 1 : 0)) + "," + std::to_string(b_count) + " @@\n";
    for (long t = start; t < end; ++t) out += std::string(1, ops[t].tag) + ops[t].line + "\n";
    a_line += a_count;
    b_line += b_count;
    k = end;
  }
  return out;
}

}  // namespace composekit::harness
