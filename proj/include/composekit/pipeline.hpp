#pragma once

#include <optional>

#include "composekit/arbitrator.hpp"
#include "composekit/emitter.hpp"
#include "composekit/resolver.hpp"
#include "composekit/validator.hpp"

namespace composekit {

/// Everything one `setup` produces for a scanned tree.
struct Application {
  UnitClosure closure;
  ValidationReport report;  // closure-restricted
  // The remaining members are only filled in when `report` has no errors.
  FileMap files;
  ParameterTable params;
  VariableIndex vars;
  InitOrder order;
  Manifest manifest;

  bool ok() const { return !report.has_errors(); }
};

/// Resolves, validates and, when validation passes, arbitrates and emits.
/// Reads `req.parfile_path` from disk when set.
Application configure(const UnitTree &tree, const SetupRequest &req);

/// Same as configure() with an already parsed parfile.
Application configure(const UnitTree &tree, const SetupRequest &req,
                      const std::optional<ParFile> &parfile);

ParFile load_parfile(const std::filesystem::path &path);

}  // namespace composekit
