#include <doctest.h>

#include <algorithm>

#include "composekit/arbitrator.hpp"
#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"
#include "support.hpp"

using namespace composekit;
namespace fs = std::filesystem;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected a composekit::Error");
  return ErrorKind::IoError;
}

UnitClosure closure_for(const UnitTree &tree, const std::string &sim,
                        std::map<std::string, std::string> impl = {}) {
  SetupRequest req;
  req.simulation_name = sim;
  req.impl_choices = std::move(impl);
  return resolve(tree, req);
}

// Independent selection: walk the filesystem for every file with the routine's
// stem, keep the ones in the setup dir, in included directories or at a unit
// root, and rank by (setup flag, depth).
std::string oracle_pick(const fs::path &root, const UnitClosure &c, const std::string &routine) {
  std::vector<std::pair<std::pair<int, int>, std::string>> ranked;
  const std::string setup = "Simulation/" + c.simulation_name;
  for (const auto &entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".F90") continue;
    if (entry.path().stem() != routine) continue;
    std::string rel = fs::relative(entry.path(), root).generic_string();
    std::string dir = rel.substr(0, rel.rfind('/'));
    int depth = static_cast<int>(std::count(dir.begin(), dir.end(), '/')) + 1;
    bool in_setup = dir == setup;
    bool at_root = depth == 1;
    bool other_setup = dir.rfind("Simulation/", 0) == 0 && !in_setup;
    if (other_setup) continue;
    if (!in_setup && !at_root && !c.contains(dir)) continue;
    ranked.push_back({{in_setup ? 1 : 0, depth}, rel});
  }
  std::sort(ranked.begin(), ranked.end());
  return ranked.empty() ? "" : ranked.back().second;
}

std::string write_order_lines(const InitOrder &o) {
  std::string out;
  for (size_t i = 0; i < o.init.size(); ++i) out += std::to_string(i + 1) + " " + o.init[i] + "\n";
  return out;
}

}  // namespace

TEST_CASE("setup files, deepest directories and null stubs") {
  auto tree = scan_tree(cktest::flash_tree());
  auto files = select_implementations(tree, closure_for(tree, "Sedov"));

  const auto &refine = files.at("Grid_markRefine");
  CHECK(refine.selected.path == "Simulation/Sedov/Grid_markRefine.F90");
  CHECK(refine.rule == "simulation setup override");
  REQUIRE(refine.candidates.size() == 3);
  CHECK(refine.candidates.front().is_stub);

  CHECK(files.at("sim_customSource").selected.path == "Simulation/Sedov/sim_customSource.F90");

  const auto &advance = files.at("Particles_advance");
  CHECK(advance.selected.path == "Particles/ParticlesMain/passive/Particles_advance.F90");
  CHECK(advance.rule == "deepest included directory");
  std::vector<int> depths;
  for (const auto &c : advance.candidates) depths.push_back(c.depth);
  CHECK(depths == std::vector<int>{1, 2, 3});

  const auto &gravity = files.at("Gravity_potential");
  CHECK(gravity.selected.is_stub);
  CHECK(gravity.rule == "null implementation");
  CHECK(files.at("gr_initGeometry").rule == "only candidate");
}

TEST_CASE("a unit nobody requires maps every API routine to its stub") {
  cktest::TempDir tmp;
  auto root = cktest::copy_tree(cktest::flash_tree(), tmp.path() / "t");
  auto cfg_path = root / "Simulation/Sedov/Config";
  auto text = cktest::read_file(cfg_path);
  text.erase(text.find("REQUIRES IO\n"), std::string("REQUIRES IO\n").size());
  cktest::write_file(cfg_path, text);

  auto tree = scan_tree(root);
  auto c = closure_for(tree, "Sedov");
  CHECK_FALSE(c.contains("IO"));
  auto files = select_implementations(tree, c);
  int io_routines = 0;
  for (const auto &api : discover_api(tree, "IO")) {
    CHECK(files.at(api.name).selected.is_stub);
    CHECK(files.at(api.name).selected.path == api.stub_path);
    ++io_routines;
  }
  CHECK(io_routines == 6);
}

TEST_CASE("selection agrees with a brute-force ranking for every fixture setup") {
  auto tree = scan_tree(cktest::flash_tree());
  std::vector<UnitClosure> closures;
  for (const auto &sim : tree.simulations) closures.push_back(closure_for(tree, sim));
  closures.push_back(closure_for(tree, "Sedov", {{"Particles/ParticlesMain", "active"},
                                                 {"Grid/GridMain", "uniform"},
                                                 {"Eos/EosMain", "helmholtz"}}));
  for (const auto &c : closures) {
    auto files = select_implementations(tree, c);
    for (const auto &[routine, sel] : files) {
      CAPTURE(c.simulation_name);
      CAPTURE(routine);
      CHECK(sel.selected.path == oracle_pick(cktest::flash_tree(), c, routine));
    }
  }
}

TEST_CASE("equal-depth candidates are ambiguous; a missing stub is reported") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Demo", "REQUIRES Grid/GridMain\nREQUIRES Grid/GridExtra\n");
  b.routine("Grid", "Grid_init").routine("Grid/GridMain", "Grid_init").routine("Grid/GridExtra", "Grid_init");
  auto tree = scan_tree(tmp.path());
  CHECK(kind_of([&] { select_implementations(tree, closure_for(tree, "Demo")); }) ==
        ErrorKind::AmbiguousImplementation);

  cktest::TempDir tmp2;
  cktest::TreeBuilder b2(tmp2.path());
  b2.config("Simulation/Demo", "REQUIRES Grid\n");
  b2.routine("Grid", "Grid_init").routine("Grid/GridMain", "Grid_init").routine("Grid/GridMain", "Grid_extra");
  b2.routine("Grid/GridMain", "gr_helper");
  auto tree2 = scan_tree(tmp2.path());
  CHECK(kind_of([&] { select_implementations(tree2, closure_for(tree2, "Demo")); }) == ErrorKind::MissingStub);
}

TEST_CASE("a setup file wins even against an equal-depth tie elsewhere") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Demo", "REQUIRES Grid/GridMain\nREQUIRES Grid/GridExtra\n");
  b.routine("Grid", "Grid_init").routine("Grid/GridMain", "Grid_init").routine("Grid/GridExtra", "Grid_init");
  b.routine("Simulation/Demo", "Grid_init");
  auto tree = scan_tree(tmp.path());
  auto files = select_implementations(tree, closure_for(tree, "Demo"));
  CHECK(files.at("Grid_init").selected.path == "Simulation/Demo/Grid_init.F90");
}

TEST_CASE("parameter precedence: unit Config < setup Config < parfile") {
  auto tree = scan_tree(cktest::flash_tree());
  auto c = closure_for(tree, "Sedov");
  auto table = merge_parameters(tree, c);
  const auto &pt = table.at("pt_maxPerProc");
  CHECK(pt.effective_value == Literal{ParamType::Integer, "2000"});
  CHECK(pt.default_value == Literal{ParamType::Integer, "1000"});
  CHECK(pt.defining_path == "Particles/ParticlesMain");

  auto with_par = merge_parameters(tree, c, parse_parfile("pt_maxPerProc = 77\n"));
  const auto &chain = with_par.at("pt_maxPerProc").chain();
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == ParameterLayer{"Particles/ParticlesMain", {ParamType::Integer, "1000"}});
  CHECK(chain[1] == ParameterLayer{"Simulation/Sedov", {ParamType::Integer, "2000"}});
  CHECK(chain[2] == ParameterLayer{"parfile", {ParamType::Integer, "77"}});
  CHECK(with_par.at("pt_maxPerProc").effective_value.text == "77");

  const auto &cfl = table.at("cfl");
  CHECK(cfl.effective_value == cfl.default_value);
  CHECK(cfl.chain().size() == 1);
}

TEST_CASE("parfile typing and unknown names") {
  auto tree = scan_tree(cktest::flash_tree());
  auto c = closure_for(tree, "Sedov");
  CHECK(kind_of([&] { merge_parameters(tree, c, parse_parfile("cfl = fast\n")); }) == ErrorKind::TypeMismatch);
  CHECK(kind_of([&] { merge_parameters(tree, c, parse_parfile("no_such = 1\n")); }) ==
        ErrorKind::UnknownParameter);
  // Parameters of units outside the closure are unknown too.
  CHECK(kind_of([&] { merge_parameters(tree, c, parse_parfile("gconst = 1.0\n")); }) ==
        ErrorKind::UnknownParameter);
  auto ok = merge_parameters(tree, c, parse_parfile("cfl = 1\nsim_profFileName = other.dat\n"));
  CHECK(ok.at("cfl").effective_value.text == "1");
  CHECK(ok.at("sim_profFileName").effective_value.text == "\"other.dat\"");
}

TEST_CASE("a BOOLEAN parameter rejects an integer parfile value") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Demo", "REQUIRES Io\n").config("Io/IoMain", "PARAMETER io_on BOOLEAN TRUE\n");
  auto tree = scan_tree(tmp.path());
  auto c = closure_for(tree, "Demo");
  CHECK(kind_of([&] { merge_parameters(tree, c, parse_parfile("io_on = 12\n")); }) == ErrorKind::TypeMismatch);
  CHECK(merge_parameters(tree, c, parse_parfile("io_on = .false.\n")).at("io_on").effective_value.text == "FALSE");
}

TEST_CASE("deeper Configs override shallower ones; conflicts are errors") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Demo", "REQUIRES Grid\n");
  b.config("Grid/GridMain", "DEFAULT amr\nPARAMETER nx INTEGER 8\n");
  b.config("Grid/GridMain/amr", "PARAMETER nx INTEGER 16\n");
  auto tree = scan_tree(tmp.path());
  auto table = merge_parameters(tree, closure_for(tree, "Demo"));
  CHECK(table.at("nx").effective_value.text == "16");
  CHECK(table.at("nx").defining_path == "Grid/GridMain");

  b.config("Grid/GridMain/amr", "PARAMETER nx REAL 16.0\n");
  auto typed = scan_tree(tmp.path());
  CHECK(kind_of([&] { merge_parameters(typed, closure_for(typed, "Demo")); }) == ErrorKind::ConflictingTypes);

  b.config("Grid/GridMain/amr", "");
  b.config("Simulation/Demo", "REQUIRES Grid\nREQUIRES Eos\n");
  b.config("Eos/EosMain", "PARAMETER nx INTEGER 4\n");
  auto tied = scan_tree(tmp.path());
  CHECK(kind_of([&] { merge_parameters(tied, closure_for(tied, "Demo")); }) == ErrorKind::AmbiguousParameter);

  // Equal values at equal depth are not a conflict.
  b.config("Eos/EosMain", "PARAMETER nx INTEGER 8\n");
  auto agreeing = scan_tree(tmp.path());
  CHECK(merge_parameters(agreeing, closure_for(agreeing, "Demo")).at("nx").effective_value.text == "8");
}

TEST_CASE("variable indices are dense and sorted") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Demo", "REQUIRES Alpha\nREQUIRES Beta\n");
  b.config("Alpha/AlphaMain", "VARIABLE dens\nVARIABLE pres\n");
  b.config("Beta/BetaMain", "VARIABLE velx\nVARIABLE dens\n");
  b.config("Simulation/Empty", "");
  auto tree = scan_tree(tmp.path());
  CHECK(assign_variable_indices(tree, closure_for(tree, "Demo")) == VariableIndex{{"dens", 1}, {"pres", 2}, {"velx", 3}});
  CHECK(assign_variable_indices(tree, closure_for(tree, "Empty")).empty());

  auto flash = scan_tree(cktest::flash_tree());
  std::string listing;
  for (const auto &[name, index] : assign_variable_indices(flash, closure_for(flash, "Sedov")))
    listing += name + " " + std::to_string(index) + "\n";
  CHECK(cktest::matches_golden("sedov_vars.txt", listing));
}

TEST_CASE("init order follows REQUIRES edges with a lexicographic tie-break") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Pair", "REQUIRES Particles\n");
  b.config("Particles/ParticlesMain", "REQUIRES Grid\n").dir("Grid");
  b.config("Simulation/Free", "REQUIRES Beta\nREQUIRES Alpha\nREQUIRES Driver\n");
  b.dir("Alpha").dir("Beta").config("Driver/DriverMain", "REQUIRES Alpha\n");
  auto tree = scan_tree(tmp.path());
  CHECK(compute_init_order(tree, closure_for(tree, "Pair")).init == std::vector<std::string>{"Grid", "Particles"});
  auto free = compute_init_order(tree, closure_for(tree, "Free"));
  CHECK(free.init == std::vector<std::string>{"Alpha", "Beta"});
  CHECK(free.finalize() == std::vector<std::string>{"Beta", "Alpha"});
  CHECK(free.warnings.empty());
}

TEST_CASE("a dependency cycle is broken with a warning") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.config("Simulation/Loop", "REQUIRES Beta\nREQUIRES Gamma\n");
  b.config("Alpha/AlphaMain", "REQUIRES Beta\n");
  b.config("Beta/BetaMain", "REQUIRES Alpha\n");
  b.config("Gamma/GammaMain", "REQUIRES Beta\n");
  auto tree = scan_tree(tmp.path());
  auto order = compute_init_order(tree, closure_for(tree, "Loop"));
  CHECK(order.init == std::vector<std::string>{"Alpha", "Beta", "Gamma"});
  REQUIRE(order.warnings.size() == 1);
  CHECK(order.warnings[0].find("cycle") != std::string::npos);
}

TEST_CASE("fixture Sedov init order matches the golden and respects every edge") {
  auto tree = scan_tree(cktest::flash_tree());
  auto c = closure_for(tree, "Sedov");
  auto order = compute_init_order(tree, c);
  CHECK(cktest::matches_golden("sedov_init_order.txt", write_order_lines(order)));
  CHECK(order.warnings.empty());
  CHECK(std::find(order.init.begin(), order.init.end(), "Driver") == order.init.end());

  // Edge check from the Configs directly.
  auto position = [&](const std::string &u) {
    return std::find(order.init.begin(), order.init.end(), u) - order.init.begin();
  };
  int edges = 0;
  for (const auto &path : c.included) {
    const auto &node = tree.at(path);
    if (!node.config) continue;
    auto dependent = tree_path::top_component(path);
    if (dependent == "Driver" || dependent == "Simulation") continue;
    for (const auto &d : node.config->directives)
      if (const auto *r = std::get_if<directive::Requires>(&d)) {
        auto dependency = tree_path::top_component(r->target);
        if (dependency == dependent) continue;
        CHECK(position(dependency) < position(dependent));
        ++edges;
      }
  }
  CHECK(edges >= 5);
}
