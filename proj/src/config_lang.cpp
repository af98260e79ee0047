#include "composekit/config_lang.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cstdint>
#include <regex>

#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"

namespace composekit {

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::Integer: return "INTEGER";
    case ParamType::Real: return "REAL";
    case ParamType::Boolean: return "BOOLEAN";
    case ParamType::String: return "STRING";
  }
  return "?";
}

std::optional<ParamType> param_type_from_string(std::string_view text) {
  if (text == "INTEGER") return ParamType::Integer;
  if (text == "REAL") return ParamType::Real;
  if (text == "BOOLEAN") return ParamType::Boolean;
  if (text == "STRING") return ParamType::String;
  return std::nullopt;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

namespace {

bool is_lower_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_integer_text(std::string_view s) {
  static const std::regex re(R"([+-]?[0-9]+)");
  if (!std::regex_match(s.begin(), s.end(), re)) return false;
  std::int64_t value = 0;
  auto digits = s;
  if (digits.front() == '+') digits.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  return ec == std::errc() && ptr == digits.data() + digits.size();
}

bool is_decimal_text(std::string_view s) {
  static const std::regex re(
      R"([+-]?(([0-9]+\.[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?|[0-9]+[eE][+-]?[0-9]+))");
  return std::regex_match(s.begin(), s.end(), re);
}

bool is_string_literal(std::string_view s) {
  return s.size() >= 2 && s.front() == '"' && s.back() == '"' &&
         s.substr(1, s.size() - 2).find('"') == std::string_view::npos;
}

struct Token {
  std::string text;
};

// Splits one line into tokens. Returns an error reason on malformed quoting.
std::optional<std::string> tokenize(std::string_view line, std::vector<Token> &out) {
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '"') {
      size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos) return "unterminated string literal";
      size_t after = close + 1;
      if (after < line.size() && line[after] != ' ' && line[after] != '\t' &&
          line[after] != '#' && line[after] != '\r')
        return "string literal must be followed by whitespace";
      out.push_back({std::string(line.substr(i, after - i))});
      i = after;
      continue;
    }
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#' &&
           line[i] != '\r') {
      if (line[i] == '"') return "unexpected '\"' inside token";
      ++i;
    }
    out.push_back({std::string(line.substr(start, i - start))});
  }
  return std::nullopt;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::optional<Literal> parse_config_literal(ParamType type, std::string_view raw) {
  switch (type) {
    case ParamType::Integer:
      if (is_integer_text(raw)) return Literal{type, std::string(raw)};
      break;
    case ParamType::Real:
      if (is_decimal_text(raw)) return Literal{type, std::string(raw)};
      break;
    case ParamType::Boolean:
      if (raw == "TRUE" || raw == "FALSE") return Literal{type, std::string(raw)};
      break;
    case ParamType::String:
      if (is_string_literal(raw)) return Literal{type, std::string(raw)};
      break;
  }
  return std::nullopt;
}

std::optional<Literal> parse_runtime_value(ParamType type, std::string_view raw) {
  switch (type) {
    case ParamType::Integer:
      if (is_integer_text(raw)) return Literal{type, std::string(raw)};
      break;
    case ParamType::Real:
      if (is_decimal_text(raw) || is_integer_text(raw)) return Literal{type, std::string(raw)};
      break;
    case ParamType::Boolean: {
      std::string lower(raw);
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (lower == "true" || lower == ".true.") return Literal{type, "TRUE"};
      if (lower == "false" || lower == ".false.") return Literal{type, "FALSE"};
      break;
    }
    case ParamType::String:
      if (is_string_literal(raw)) return Literal{type, std::string(raw)};
      if (!raw.empty() && raw.find('"') == std::string_view::npos)
        return Literal{type, "\"" + std::string(raw) + "\""};
      break;
  }
  return std::nullopt;
}

std::string render_directive(const Directive &d) {
  struct Visitor {
    std::string operator()(const directive::Requires &r) const { return "REQUIRES " + r.target; }
    std::string operator()(const directive::Requests &r) const { return "REQUESTS " + r.target; }
    std::string operator()(const directive::Default &r) const { return "DEFAULT " + r.child; }
    std::string operator()(const directive::Parameter &p) const {
      return "PARAMETER " + p.name + " " + std::string(to_string(p.value.type)) + " " +
             p.value.text;
    }
    std::string operator()(const directive::Variable &v) const { return "VARIABLE " + v.name; }
  };
  return std::visit(Visitor{}, d);
}

std::string ConfigFile::file_path() const { return tree_path::join(dir_path, "Config"); }

ConfigFile parse_config(std::string_view text, std::string_view dir_path) {
  ConfigFile cfg;
  cfg.dir_path = std::string(dir_path);
  const std::string file = cfg.file_path();

  auto fail = [&](int line, const std::string &reason) -> Error {
    return Error(ErrorKind::SyntaxError, file, line, reason);
  };
  auto path_operand = [&](int line, const std::string &raw) {
    auto norm = tree_path::normalize(raw);
    if (!norm || norm->empty())
      throw fail(line, "path '" + raw + "' must be relative to the tree root without '..'");
    return *norm;
  };

  std::map<std::string, int> param_lines, var_lines;
  int default_line = 0;

  int line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    std::vector<Token> tokens;
    if (auto err = tokenize(line, tokens)) throw fail(line_no, *err);
    if (tokens.empty()) continue;

    const std::string &kw = tokens[0].text;
    auto expect_arity = [&](size_t n) {
      if (tokens.size() != n + 1)
        throw fail(line_no, kw + " takes " + std::to_string(n) + " operand" +
                                (n == 1 ? "" : "s") + ", got " +
                                std::to_string(tokens.size() - 1));
    };

    Directive d;
    if (kw == "REQUIRES") {
      expect_arity(1);
      d = directive::Requires{path_operand(line_no, tokens[1].text)};
    } else if (kw == "REQUESTS") {
      expect_arity(1);
      d = directive::Requests{path_operand(line_no, tokens[1].text)};
    } else if (kw == "DEFAULT") {
      expect_arity(1);
      const auto &child = tokens[1].text;
      if (!is_identifier(child)) throw fail(line_no, "DEFAULT expects a directory name, got '" + child + "'");
      if (default_line != 0)
        throw Error(ErrorKind::DuplicateDeclaration, file, line_no,
                    "DEFAULT declared on lines " + std::to_string(default_line) + " and " +
                        std::to_string(line_no));
      default_line = line_no;
      d = directive::Default{child};
    } else if (kw == "PARAMETER") {
      expect_arity(3);
      const auto &name = tokens[1].text;
      if (!is_identifier(name)) throw fail(line_no, "invalid parameter name '" + name + "'");
      auto type = param_type_from_string(tokens[2].text);
      if (!type) throw fail(line_no, "unknown parameter type '" + tokens[2].text + "'");
      auto lit = parse_config_literal(*type, tokens[3].text);
      if (!lit)
        throw fail(line_no, "literal '" + tokens[3].text + "' is not a valid " +
                                std::string(to_string(*type)));
      if (auto it = param_lines.find(name); it != param_lines.end())
        throw Error(ErrorKind::DuplicateDeclaration, file, line_no,
                    "parameter '" + name + "' declared on lines " + std::to_string(it->second) +
                        " and " + std::to_string(line_no));
      param_lines.emplace(name, line_no);
      d = directive::Parameter{name, *lit};
    } else if (kw == "VARIABLE") {
      expect_arity(1);
      const auto &name = tokens[1].text;
      if (!is_lower_identifier(name))
        throw fail(line_no, "variable name '" + name + "' must be a lowercase identifier");
      if (auto it = var_lines.find(name); it != var_lines.end())
        throw Error(ErrorKind::DuplicateDeclaration, file, line_no,
                    "variable '" + name + "' declared on lines " + std::to_string(it->second) +
                        " and " + std::to_string(line_no));
      var_lines.emplace(name, line_no);
      d = directive::Variable{name};
    } else {
      throw fail(line_no, "unknown keyword '" + kw + "'");
    }
    cfg.directives.push_back(std::move(d));
    cfg.source_lines.push_back(line_no);
  }
  return cfg;
}

std::string render_config(const ConfigFile &cfg) {
  std::string out;
  for (const auto &d : cfg.directives) {
    out += render_directive(d);
    out += '\n';
  }
  return out;
}

std::map<std::string, ParAssignment> ParFile::effective() const {
  std::map<std::string, ParAssignment> out;
  for (const auto &a : assignments) out[a.name] = a;
  return out;
}

ParFile parse_parfile(std::string_view text, std::string_view path) {
  ParFile par;
  par.path = std::string(path);
  int line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    // Strip a trailing comment, ignoring '#' inside a quoted value.
    bool in_quotes = false;
    size_t cut = raw.size();
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quotes = !in_quotes;
      if (raw[i] == '#' && !in_quotes) {
        cut = i;
        break;
      }
    }
    std::string line = trim(raw.substr(0, cut));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::SyntaxError, par.path, line_no, "expected 'name = value'");
    std::string name = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!is_identifier(name))
      throw Error(ErrorKind::SyntaxError, par.path, line_no,
                  name.empty() ? "missing parameter name" : "invalid parameter name '" + name + "'");
    if (value.empty())
      throw Error(ErrorKind::SyntaxError, par.path, line_no, "missing value for '" + name + "'");
    par.assignments.push_back({name, value, line_no});
  }
  return par;
}

}  // namespace composekit
