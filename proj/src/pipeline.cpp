#include "composekit/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "composekit/error.hpp"

namespace composekit {

ParFile load_parfile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, path.filename().string(), "cannot read parfile");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_parfile(ss.str(), path.filename().string());
}

Application configure(const UnitTree &tree, const SetupRequest &req) {
  std::optional<ParFile> parfile;
  if (req.parfile_path) parfile = load_parfile(*req.parfile_path);
  return configure(tree, req, parfile);
}

Application configure(const UnitTree &tree, const SetupRequest &req,
                      const std::optional<ParFile> &parfile) {
  Application app;
  app.closure = resolve(tree, req);
  app.report = validate_all(tree, &app.closure);
  if (!app.ok()) return app;
  app.files = select_implementations(tree, app.closure);
  app.params = merge_parameters(tree, app.closure, parfile);
  app.vars = assign_variable_indices(tree, app.closure);
  app.order = compute_init_order(tree, app.closure);
  app.manifest = emit_manifest(app.files, app.params, app.vars, app.order, app.closure, req);
  return app;
}

}  // namespace composekit
