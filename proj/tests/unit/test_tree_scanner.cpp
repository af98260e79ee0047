#include <doctest.h>

#include <algorithm>
#include <random>

#include "composekit/error.hpp"
#include "composekit/tree_scanner.hpp"
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

std::string join_lines(const std::vector<std::string> &lines) {
  std::string out;
  for (const auto &l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_CASE("Particles lineage is classified by naming convention") {
  auto tree = scan_tree(cktest::flash_tree());
  CHECK(tree.at("Particles").kind == NodeKind::UnitRoot);
  CHECK(tree.at("Particles/ParticlesMain").kind == NodeKind::Subunit);
  CHECK(tree.at("Particles/ParticlesMain/passive").kind == NodeKind::ImplementationDir);
  CHECK(tree.at("Particles/ParticlesMain/unitTest").kind == NodeKind::UnitTestDir);
  CHECK(tree.at("Simulation").kind == NodeKind::SimulationContainer);
  CHECK(tree.at("Simulation/unitTest").kind == NodeKind::SimulationContainer);
  CHECK(tree.at("Simulation/Sedov").kind == NodeKind::SimulationSetup);
  CHECK(tree.at("Simulation/unitTest/ParticlesMove").kind == NodeKind::SimulationSetup);
}

TEST_CASE("structural invariants over the fixture") {
  auto tree = scan_tree(cktest::flash_tree());
  int simulation_roots = 0;
  for (const auto &[path, node] : tree.nodes) {
    CAPTURE(path);
    auto parent = path.substr(0, path.rfind('/') == std::string::npos ? 0 : path.rfind('/'));
    if (path.find('/') != std::string::npos) CHECK(tree.contains(parent));
    if (path == kSimulationUnit) ++simulation_roots;
    switch (node.kind) {
      case NodeKind::UnitRoot: CHECK(path.find('/') == std::string::npos); break;
      case NodeKind::Subunit: {
        auto unit = path.substr(0, path.find('/'));
        CHECK(node.name().rfind(unit, 0) == 0);
        break;
      }
      case NodeKind::ImplementationDir: {
        const std::string name = node.name();
        CHECK(std::none_of(name.begin(), name.end(), [](unsigned char c) { return std::isupper(c); }));
        break;
      }
      default: break;
    }
    CHECK(std::is_sorted(node.children.begin(), node.children.end()));
  }
  CHECK(simulation_roots == 1);
}

TEST_CASE("classification of the full fixture matches the golden listing") {
  auto tree = scan_tree(cktest::flash_tree());
  CHECK(cktest::matches_golden("flash_classification.txt", render_classification(tree)));
}

TEST_CASE("a tree with only Simulation has no units") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  auto tree = scan_tree(tmp.path());
  CHECK(tree.nodes.size() == 1);
  CHECK(tree.at("Simulation").kind == NodeKind::SimulationContainer);
  CHECK(tree.units().empty());
  CHECK(list_simulations(tree).empty());
}

TEST_CASE("source files: doc header, data declarations, extensions") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.routine("Grid", "Grid_init", true, "!!DATA Grid_data\n!!DATA   Other_data  trailing\n!!DATAX nope\n");
  b.file("Grid/Grid_bare.F90", "\n\n   subroutine Grid_bare()\n!!****f* late header\n");
  b.file("Grid/notes.txt", "ignored");
  b.file("Grid/Grid_cxx.cpp", "// not a source by default");
  auto tree = scan_tree(tmp.path());
  const auto &grid = tree.at("Grid");
  REQUIRE(grid.source_files.size() == 2);
  CHECK(grid.source_files[0].routine_name == "Grid_bare");
  CHECK_FALSE(grid.source_files[0].has_doc_header);
  CHECK(grid.source_files[1].path == "Grid/Grid_init.F90");
  CHECK(grid.source_files[1].has_doc_header);
  CHECK(grid.source_files[1].declared_data_uses == std::vector<std::string>{"Grid_data", "Other_data"});

  ScanOptions opts;
  opts.source_extensions = {".F90", ".cpp"};
  CHECK(scan_tree(tmp.path(), opts).at("Grid").source_files.size() == 3);
}

TEST_CASE("hidden directories, symlinks and the object directory are skipped") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.routine("Grid", "Grid_init").dir(".git/objects").dir("Grid/.svn").dir("object/junk");
  fs::create_directory_symlink(tmp.path() / "Grid", tmp.path() / "Simulation" / "Linked");
  auto tree = scan_tree(tmp.path());
  CHECK(tree.contains("Grid"));
  CHECK_FALSE(tree.contains(".git"));
  CHECK_FALSE(tree.contains("Grid/.svn"));
  CHECK_FALSE(tree.contains("object"));
  CHECK_FALSE(tree.contains("Simulation/Linked"));
}

TEST_CASE("scanner errors") {
  cktest::TempDir tmp;
  CHECK(kind_of([&] { scan_tree(tmp.path() / "missing"); }) == ErrorKind::NotADirectory);
  CHECK(kind_of([&] { scan_tree(tmp.path()); }) == ErrorKind::MissingSimulationUnit);

  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).dir("lowercase");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::ClassificationError);
  }
  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).dir("Grid/Stray");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::ClassificationError);
  }
  {
    // <Unit>X names are subunits only directly under the unit root.
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).dir("Grid/GridMain/GridInner");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::ClassificationError);
  }
  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).config("Simulation/Sedov", "").dir("Simulation/Sedov/sub");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::ClassificationError);
  }
  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).file("Grid/Grid-init.F90", "x");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::ClassificationError);
  }
  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).file("Grid/Grid_init.F90", "x").file("Grid/Grid_init.f90", "y");
    ScanOptions opts;
    opts.source_extensions = {".F90", ".f90"};
    CHECK(kind_of([&] { scan_tree(t.path(), opts); }) == ErrorKind::ClassificationError);
  }
  {
    cktest::TempDir t;
    cktest::TreeBuilder(t.path()).config("Grid/GridMain", "BOGUS\n");
    CHECK(kind_of([&] { scan_tree(t.path()); }) == ErrorKind::SyntaxError);
  }
}

TEST_CASE("discover_api") {
  cktest::TempDir tmp;
  cktest::TreeBuilder b(tmp.path());
  b.routine("Particles", "Particles_init").routine("Particles", "Particles_advance").dir("Empty/EmptyMain");
  b.routine("Stray", "helper");
  b.routine("Data", "Data_data");
  auto tree = scan_tree(tmp.path());
  auto api = discover_api(tree, "Particles");
  REQUIRE(api.size() == 2);
  CHECK(api[0] == ApiRoutine{"Particles_advance", "Particles", "Particles/Particles_advance.F90", std::nullopt});
  CHECK(api[1].name == "Particles_init");
  CHECK(discover_api(tree, "Empty").empty());
  CHECK(kind_of([&] { discover_api(tree, "Stray"); }) == ErrorKind::NonApiFileAtRoot);
  CHECK(kind_of([&] { discover_api(tree, "Data"); }) == ErrorKind::NonApiFileAtRoot);
  CHECK(kind_of([&] { discover_api(tree, "Empty/EmptyMain"); }) == ErrorKind::UnknownName);
}

TEST_CASE("fixture Grid API matches the golden listing") {
  auto tree = scan_tree(cktest::flash_tree());
  std::vector<std::string> lines;
  for (const auto &r : discover_api(tree, "Grid")) lines.push_back(r.name + " " + r.stub_path);
  CHECK(cktest::matches_golden("grid_api.txt", join_lines(lines)));
}

TEST_CASE("list_simulations") {
  auto tree = scan_tree(cktest::flash_tree());
  auto sims = list_simulations(tree);
  CHECK(std::find(sims.begin(), sims.end(), "Sedov") != sims.end());
  CHECK(std::find(sims.begin(), sims.end(), "unitTest/ParticlesMove") != sims.end());
  CHECK(std::is_sorted(sims.begin(), sims.end()));
  CHECK(cktest::matches_golden("simulations.txt", join_lines(sims)));

  cktest::TempDir tmp;
  cktest::TreeBuilder(tmp.path()).config("Simulation/Sedov", "").config("Simulation/unitTest/ParticlesMove", "");
  CHECK(list_simulations(scan_tree(tmp.path())) ==
        std::vector<std::string>{"Sedov", "unitTest/ParticlesMove"});
}

TEST_CASE("an empty leaf under Simulation is a setup") {
  cktest::TempDir tmp;
  cktest::TreeBuilder(tmp.path()).dir("Simulation/Blank");
  CHECK(list_simulations(scan_tree(tmp.path())) == std::vector<std::string>{"Blank"});
}

TEST_CASE("directory enumeration order does not affect the scan") {
  auto reference = render_classification(scan_tree(cktest::flash_tree()));
  std::mt19937 rng(7);
  for (int i = 0; i < 5; ++i) {
    ScanOptions opts;
    opts.lister = [&rng](const fs::path &dir) {
      std::vector<fs::directory_entry> out{fs::directory_iterator{dir}, fs::directory_iterator{}};
      std::shuffle(out.begin(), out.end(), rng);
      return out;
    };
    CHECK(render_classification(scan_tree(cktest::flash_tree(), opts)) == reference);
  }
}

TEST_CASE("api_owner and data module names") {
  auto tree = scan_tree(cktest::flash_tree());
  CHECK(api_owner(tree, "Grid_init") == "Grid");
  CHECK(api_owner(tree, "Simulation_init") == "Simulation");
  CHECK_FALSE(api_owner(tree, "Grid_data").has_value());
  CHECK_FALSE(api_owner(tree, "gr_initGeometry").has_value());
  CHECK_FALSE(api_owner(tree, "Nope_init").has_value());
  CHECK(is_data_module_name("Particles_data", "Particles"));
  CHECK_FALSE(is_data_module_name("Particles_dataX", "Particles"));
}
