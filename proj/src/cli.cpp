#include "composekit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "composekit/error.hpp"
#include "composekit/harness.hpp"
#include "composekit/pipeline.hpp"
#include "composekit/tree_path.hpp"

namespace fs = std::filesystem;

namespace composekit::cli {

namespace {

struct Options {
  std::string tree = ".";
  std::string objdir = "object";
  std::vector<std::string> with_units;
  std::vector<std::string> without_units;
  std::vector<std::string> unit_impl;
  std::string parfile;
  std::vector<std::string> src_ext;
  std::string format = "text";

  std::string simulation;  // setup, explain
  std::string name;        // explain
  std::string unit;        // enumerate
  std::string suite;       // test
  bool record = false;
  bool discover = false;
};

struct UsageError {
  std::string message;
};

std::string normalized_flag_path(const std::string &flag, const std::string &raw) {
  auto norm = tree_path::normalize(raw);
  if (!norm || norm->empty())
    throw UsageError{flag + " expects a tree-relative path without '..', got '" + raw + "'"};
  return *norm;
}

SetupRequest build_request(const Options &opt) {
  SetupRequest req;
  req.simulation_name = opt.simulation;
  for (const auto &w : opt.with_units) req.with_units.push_back(normalized_flag_path("--with-unit", w));
  for (const auto &w : opt.without_units)
    req.without_units.push_back(normalized_flag_path("--without-unit", w));
  for (const auto &w : req.without_units)
    if (std::find(req.with_units.begin(), req.with_units.end(), w) != req.with_units.end())
      throw UsageError{"'" + w + "' given to both --with-unit and --without-unit"};
  for (const auto &spec : opt.unit_impl) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw UsageError{"--unit-impl expects <group>=<child>, got '" + spec + "'"};
    std::string group = normalized_flag_path("--unit-impl", spec.substr(0, eq));
    std::string child = spec.substr(eq + 1);
    if (child.find('/') != std::string::npos)
      throw UsageError{"--unit-impl child must be a single directory name, got '" + child + "'"};
    auto [it, inserted] = req.impl_choices.emplace(group, child);
    if (!inserted && it->second != child)
      throw UsageError{"--unit-impl gives two choices for " + group};
  }
  if (!opt.parfile.empty()) req.parfile_path = opt.parfile;
  return req;
}

ScanOptions scan_options(const Options &opt) {
  ScanOptions so;
  if (!opt.src_ext.empty()) so.source_extensions = opt.src_ext;
  std::error_code ec;
  fs::path obj = fs::weakly_canonical(opt.objdir, ec);
  fs::path root = fs::weakly_canonical(opt.tree, ec);
  if (!ec && obj.parent_path() == root) so.ignored_top_level.push_back(obj.filename().string());
  return so;
}

void print_report(const ValidationReport &report, const Options &opt, std::ostream &out) {
  out << (opt.format == "machine" ? report.to_json_lines() : report.to_text());
}

void write_atomically(const fs::path &dir, const std::map<std::string, std::string> &files) {
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto &[name, content] : files) {
      fs::path tmp = dir / (name + ".tmp");
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << content;
      f.close();
      if (!f) throw Error(ErrorKind::IoError, name, "cannot write to the objdir");
      staged.emplace_back(tmp, dir / name);
    }
  } catch (...) {
    for (const auto &[tmp, final_path] : staged) fs::remove(tmp);
    throw;
  }
  for (const auto &[tmp, final_path] : staged) fs::rename(tmp, final_path);
}

int cmd_setup(const Options &opt, std::ostream &out, std::ostream &err) {
  SetupRequest req = build_request(opt);
  UnitTree tree = scan_tree(opt.tree, scan_options(opt));
  Application app = configure(tree, req);
  print_report(app.report, opt, out);
  for (const auto &d : app.closure.dropped_requests)
    out << "note: dropped " << d.path << " (" << d.reason << ")\n";
  if (!app.ok()) {
    err << "setup " << req.simulation_name << ": validation failed, no manifest written\n";
    return kExitValidation;
  }
  for (const auto &w : app.order.warnings) err << "warning: " << w << "\n";

  write_atomically(opt.objdir, {{"manifest.txt", to_text(app.manifest)},
                                {"manifest.json", to_json(app.manifest)}});
  if (opt.format == "machine") {
    nlohmann::json j{{"setup", app.manifest.setup}, {"hash", app.manifest.hash}, {"status", "ok"}};
    out << j.dump() << "\n";
  } else {
    // The hash is left out so that baselines of this output only move when the
    // shape of the application does.
    out << "setup " << app.manifest.setup << ": " << app.manifest.files.size() << " files, "
        << app.manifest.params.size() << " parameters, " << app.manifest.vars.size()
        << " variables\n";
  }
  return kExitOk;
}

int cmd_validate(const Options &opt, std::ostream &out) {
  UnitTree tree = scan_tree(opt.tree, scan_options(opt));
  ValidationReport report = validate_all(tree);
  print_report(report, opt, out);
  if (opt.format == "text") {
    int errors = 0, warnings = 0;
    for (const auto &f : report.findings) (f.severity == Severity::Error ? errors : warnings)++;
    out << errors << " error(s), " << warnings << " warning(s)\n";
  }
  return report.has_errors() ? kExitValidation : kExitOk;
}

int cmd_explain(const Options &opt, std::ostream &out, std::ostream &err) {
  SetupRequest req = build_request(opt);
  UnitTree tree = scan_tree(opt.tree, scan_options(opt));
  Application app = configure(tree, req);
  if (!app.ok()) {
    print_report(app.report, opt, out);
    err << "explain: setup " << req.simulation_name << " does not validate\n";
    return kExitValidation;
  }
  Explanation ex = explain(opt.name, app.files, app.params);
  if (opt.format == "machine") {
    nlohmann::json j{{"name", ex.name}};
    if (ex.kind == Explanation::Kind::Routine) {
      j["kind"] = "routine";
      j["rule"] = ex.rule;
      j["selected"] = ex.selected->path;
      j["candidates"] = nlohmann::json::array();
      for (const auto &c : ex.candidates)
        j["candidates"].push_back(
            {{"path", c.path}, {"depth", c.depth}, {"setup", c.in_setup}, {"null", c.is_stub}});
    } else {
      j["kind"] = "parameter";
      j["effective"] = ex.effective->text;
      j["chain"] = nlohmann::json::array();
      for (const auto &l : ex.chain) j["chain"].push_back({{"source", l.source}, {"value", l.value.text}});
    }
    out << j.dump() << "\n";
  } else {
    out << ex.to_text();
  }
  return kExitOk;
}

int cmd_list(const Options &opt, std::ostream &out) {
  UnitTree tree = scan_tree(opt.tree, scan_options(opt));
  auto sims = list_simulations(tree);
  if (opt.format == "machine") {
    out << nlohmann::json(sims).dump() << "\n";
  } else {
    for (const auto &s : sims) out << s << "\n";
  }
  return kExitOk;
}

int cmd_enumerate(const Options &opt, std::ostream &out) {
  UnitTree tree = scan_tree(opt.tree, scan_options(opt));
  auto configs = enumerate_valid_configurations(tree, opt.unit);
  if (opt.format == "machine") {
    out << nlohmann::json{{"unit", opt.unit}, {"count", configs.size()}, {"configurations", configs}}.dump()
        << "\n";
    return kExitOk;
  }
  out << configs.size() << "\n";
  for (const auto &choice : configs) {
    std::string line;
    for (const auto &[group, child] : choice) line += (line.empty() ? "" : " ") + group + "=" + child;
    out << (line.empty() ? "-" : line) << "\n";
  }
  return kExitOk;
}

int cmd_test(const Options &opt, std::ostream &out) {
  if (opt.discover) {
    UnitTree tree = scan_tree(opt.tree, scan_options(opt));
    for (const auto &tc : harness::discover_unit_tests(tree, opt.tree)) out << harness::render_case(tc) << "\n";
    return kExitOk;
  }
  if (opt.suite.empty()) throw UsageError{"test expects a suite file (or --discover)"};
  auto spec = harness::load_suite(opt.suite);
  auto report = harness::run_suite(spec, opt.record ? harness::Mode::Record : harness::Mode::Check);
  out << report.to_text();
  return report.all_passed() ? kExitOk : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Options opt;
  if (const char *env = std::getenv("COMPOSEKIT_TREE"); env && *env) opt.tree = env;

  CLI::App app{"composekit - compose one application from a unit source tree", "composekit"};
  app.require_subcommand(1, 1);
  app.add_option("--tree", opt.tree, "Source tree root (default: $COMPOSEKIT_TREE or .)");
  app.add_option("--objdir", opt.objdir, "Output directory for the manifest");
  app.add_option("--with-unit", opt.with_units, "Force-include a tree path")->take_all();
  app.add_option("--without-unit", opt.without_units, "Exclude a tree path")->take_all();
  app.add_option("--unit-impl", opt.unit_impl, "Choose an implementation: <group>=<child>")->take_all();
  app.add_option("--parfile", opt.parfile, "Runtime parameter file");
  app.add_option("--src-ext", opt.src_ext, "Source file extension (repeatable)")->take_all();
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "machine"}));

  auto *setup = app.add_subcommand("setup", "Configure one Simulation setup and write its manifest");
  setup->add_option("simulation", opt.simulation, "Setup name, e.g. Sedov")->required();
  auto *validate = app.add_subcommand("validate", "Check the architectural rules over the whole tree");
  auto *explain_cmd = app.add_subcommand("explain", "Explain a routine or parameter selection");
  explain_cmd->add_option("simulation", opt.simulation, "Setup name")->required();
  explain_cmd->add_option("name", opt.name, "Routine or parameter name")->required();
  auto *list = app.add_subcommand("list", "List Simulation setups");
  auto *enumerate = app.add_subcommand("enumerate", "Enumerate implementation choices of a unit");
  enumerate->add_option("unit", opt.unit, "Unit name")->required();
  auto *test = app.add_subcommand("test", "Run a regression suite");
  test->add_option("suite", opt.suite, "Suite file");
  test->add_flag("--record", opt.record, "Rewrite baselines instead of checking");
  test->add_flag("--discover", opt.discover, "Print suite lines for the tree's unit-test setups");
  for (auto *sub : {setup, validate, explain_cmd, list, enumerate, test}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (const auto &ext : opt.src_ext)
      if (ext.size() < 2 || ext.front() != '.')
        throw UsageError{"--src-ext expects an extension such as .F90, got '" + ext + "'"};

    if (setup->parsed()) return cmd_setup(opt, out, err);
    if (validate->parsed()) return cmd_validate(opt, out);
    if (explain_cmd->parsed()) return cmd_explain(opt, out, err);
    if (list->parsed()) return cmd_list(opt, out);
    if (enumerate->parsed()) return cmd_enumerate(opt, out);
    if (test->parsed()) return cmd_test(opt, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.message << "\n" << app.help();
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.code().message() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace composekit::cli
