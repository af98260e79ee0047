#pragma once

// Build manifest for one application.
//
// Text form, LF line endings, one record per line:
//
//   COMPOSEKIT-MANIFEST 1
//   TOOL <version>
//   SETUP <simulation>
//   REQUEST with=<a,b|-> without=<..|-> impl=<group=child,..|-> parfile=<name|->
//   HASH sha256:<hex>
//   FILE <routine> <path> [null]
//   PARAM <name> <type> <value> <source>=<value>...
//   VAR <name> <index>
//   INIT <k> <unit>
//   FINALIZE <unit>
//   DROPPED <path> <reason...>
//
// The hash is SHA-256 over every line except the HASH line.

#include <optional>
#include <string>
#include <vector>

#include "composekit/arbitrator.hpp"
#include "composekit/resolver.hpp"

namespace composekit {

inline constexpr const char *kToolVersion = "0.1.0";

struct FileRecord {
  std::string routine;
  std::string path;
  bool is_null = false;
  friend bool operator==(const FileRecord &, const FileRecord &) = default;
};

struct ParamRecord {
  std::string name;
  ParamType type = ParamType::Integer;
  std::string value;
  std::vector<std::pair<std::string, std::string>> chain;  // (source, value), ascending
  friend bool operator==(const ParamRecord &, const ParamRecord &) = default;
};

struct VarRecord {
  std::string name;
  int index = 0;
  friend bool operator==(const VarRecord &, const VarRecord &) = default;
};

struct Manifest {
  std::string tool_version = kToolVersion;
  std::string setup;
  std::string request;  // normalized, see normalize_request
  std::string hash;     // "sha256:<hex>"
  std::vector<FileRecord> files;
  std::vector<ParamRecord> params;
  std::vector<VarRecord> vars;
  std::vector<std::string> init_order;
  std::vector<std::string> finalize_order;
  std::vector<DroppedRequest> dropped;

  friend bool operator==(const Manifest &, const Manifest &) = default;
};

std::string normalize_request(const SetupRequest &req);

/// Builds the manifest and fills in its content hash.
Manifest emit_manifest(const FileMap &files, const ParameterTable &params,
                       const VariableIndex &vars, const InitOrder &order,
                       const UnitClosure &closure, const SetupRequest &req);

std::string to_text(const Manifest &m);
std::string to_json(const Manifest &m);

/// Reads the text form back. Throws MalformedManifest.
Manifest parse_manifest(std::string_view text);

/// Hash of the manifest content as it would be serialized.
std::string content_hash(const Manifest &m);

std::string sha256_hex(std::string_view data);

struct Explanation {
  enum class Kind { Routine, Parameter } kind = Kind::Routine;
  std::string name;
  std::vector<Candidate> candidates;       // routines
  std::optional<Candidate> selected;       // routines
  std::string rule;                        // routines
  std::vector<ParameterLayer> chain;       // parameters, ascending precedence
  std::optional<Literal> effective;        // parameters

  std::string to_text() const;
};

/// Explains a routine (candidates and the selection rule) or a parameter
/// (full precedence chain). Throws UnknownName when neither exists.
Explanation explain(std::string_view name, const FileMap &files, const ParameterTable &params);

}  // namespace composekit
