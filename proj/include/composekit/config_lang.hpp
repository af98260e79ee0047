#pragma once

// The two input languages: per-directory Config files and runtime parameter
// files (parfiles).
//
//   line      := blank | comment | directive
//   comment   := '#' any*
//   directive := 'REQUIRES' path | 'REQUESTS' path | 'DEFAULT' name
//              | 'PARAMETER' name type literal | 'VARIABLE' name
//   type      := 'INTEGER' | 'REAL' | 'BOOLEAN' | 'STRING'
//   literal   := integer | decimal | 'TRUE' | 'FALSE' | '"' chars '"'
//
// Keywords are case-sensitive, operands keep their case, tokens are separated
// by spaces or tabs and a '#' outside a string literal starts a comment.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace composekit {

enum class ParamType { Integer, Real, Boolean, String };

std::string_view to_string(ParamType type);
std::optional<ParamType> param_type_from_string(std::string_view text);

/// A typed literal held in canonical text form: integers and reals as
/// written, booleans as TRUE/FALSE, strings including their double quotes.
struct Literal {
  ParamType type = ParamType::Integer;
  std::string text;

  friend bool operator==(const Literal &, const Literal &) = default;
};

/// Parses `raw` as a Config-file literal of type `type` (strict grammar).
std::optional<Literal> parse_config_literal(ParamType type, std::string_view raw);

/// Types a parfile value against a declared parameter type. More lenient than
/// the Config grammar: REAL accepts integer text, BOOLEAN accepts
/// true/false/.true./.false. in any case, STRING accepts bare words.
std::optional<Literal> parse_runtime_value(ParamType type, std::string_view raw);

namespace directive {

struct Requires {
  std::string target;
  friend bool operator==(const Requires &, const Requires &) = default;
};
struct Requests {
  std::string target;
  friend bool operator==(const Requests &, const Requests &) = default;
};
struct Default {
  std::string child;
  friend bool operator==(const Default &, const Default &) = default;
};
struct Parameter {
  std::string name;
  Literal value;
  friend bool operator==(const Parameter &, const Parameter &) = default;
};
struct Variable {
  std::string name;
  friend bool operator==(const Variable &, const Variable &) = default;
};

}  // namespace directive

using Directive = std::variant<directive::Requires, directive::Requests,
                               directive::Default, directive::Parameter,
                               directive::Variable>;

std::string render_directive(const Directive &d);

struct ConfigFile {
  std::string dir_path;
  std::vector<Directive> directives;
  std::vector<int> source_lines;  // parallel to `directives`

  /// Tree-relative path of the Config file itself, used in diagnostics.
  std::string file_path() const;

  /// Equality ignoring line numbers.
  bool same_content(const ConfigFile &other) const {
    return dir_path == other.dir_path && directives == other.directives;
  }
};

ConfigFile parse_config(std::string_view text, std::string_view dir_path);
std::string render_config(const ConfigFile &cfg);

struct ParAssignment {
  std::string name;
  std::string value;
  int line = 0;
};

struct ParFile {
  std::string path;  // for diagnostics only
  std::vector<ParAssignment> assignments;

  /// Last assignment wins.
  std::map<std::string, ParAssignment> effective() const;
};

ParFile parse_parfile(std::string_view text, std::string_view path = "parfile");

bool is_identifier(std::string_view s);

}  // namespace composekit
