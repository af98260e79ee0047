#include "composekit/emitter.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "composekit/error.hpp"
#include "composekit/tree_path.hpp"

namespace composekit {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoError, "", "SHA-256 computation failed");
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string join_or_dash(const std::vector<std::string> &items) {
  if (items.empty()) return "-";
  std::string out;
  for (const auto &s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::vector<std::string> sorted_paths(const std::vector<std::string> &paths) {
  std::vector<std::string> out;
  for (const auto &p : paths) out.push_back(tree_path::normalize(p).value_or(p));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every line except HASH, in serialization order.
std::vector<std::string> content_lines(const Manifest &m) {
  std::vector<std::string> lines;
  lines.push_back("COMPOSEKIT-MANIFEST 1");
  lines.push_back("TOOL " + m.tool_version);
  lines.push_back("SETUP " + m.setup);
  lines.push_back("REQUEST " + m.request);
  for (const auto &f : m.files)
    lines.push_back("FILE " + f.routine + " " + f.path + (f.is_null ? " null" : ""));
  for (const auto &p : m.params) {
    std::string line = "PARAM " + p.name + " " + std::string(to_string(p.type)) + " " + p.value;
    for (const auto &[source, value] : p.chain) line += " " + source + "=" + value;
    lines.push_back(std::move(line));
  }
  for (const auto &v : m.vars) lines.push_back("VAR " + v.name + " " + std::to_string(v.index));
  for (size_t i = 0; i < m.init_order.size(); ++i)
    lines.push_back("INIT " + std::to_string(i + 1) + " " + m.init_order[i]);
  for (const auto &u : m.finalize_order) lines.push_back("FINALIZE " + u);
  for (const auto &d : m.dropped) lines.push_back("DROPPED " + d.path + " " + d.reason);
  return lines;
}

constexpr size_t kHashLinePosition = 4;  // after COMPOSEKIT-MANIFEST, TOOL, SETUP, REQUEST

// Splits on spaces, keeping double-quoted runs together.
std::vector<std::string> tokenize_record(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, any = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ' ' && !quoted) {
      if (any) out.push_back(cur);
      cur.clear();
      any = false;
      continue;
    }
    cur += c;
    any = true;
  }
  if (any) out.push_back(cur);
  return out;
}

}  // namespace

std::string normalize_request(const SetupRequest &req) {
  std::vector<std::string> impl;
  for (const auto &[group, child] : req.impl_choices) impl.push_back(group + "=" + child);
  std::string parfile = "-";
  if (req.parfile_path) parfile = std::filesystem::path(*req.parfile_path).filename().string();
  return "with=" + join_or_dash(sorted_paths(req.with_units)) +
         " without=" + join_or_dash(sorted_paths(req.without_units)) +
         " impl=" + join_or_dash(impl) + " parfile=" + parfile;
}

std::string content_hash(const Manifest &m) {
  std::string blob;
  for (const auto &line : content_lines(m)) blob += line + '\n';
  return "sha256:" + sha256_hex(blob);
}

Manifest emit_manifest(const FileMap &files, const ParameterTable &params,
                       const VariableIndex &vars, const InitOrder &order,
                       const UnitClosure &closure, const SetupRequest &req) {
  Manifest m;
  m.setup = closure.simulation_name;
  m.request = normalize_request(req);
  for (const auto &[routine, sel] : files)
    m.files.push_back({routine, sel.selected.path, sel.selected.is_stub});
  for (const auto &[name, entry] : params) {
    ParamRecord rec{name, entry.type, entry.effective_value.text, {}};
    for (const auto &layer : entry.chain()) rec.chain.emplace_back(layer.source, layer.value.text);
    m.params.push_back(std::move(rec));
  }
  for (const auto &[name, index] : vars) m.vars.push_back({name, index});
  m.init_order = order.init;
  m.finalize_order = order.finalize();
  m.dropped = closure.dropped_requests;
  m.hash = content_hash(m);
  return m;
}

std::string to_text(const Manifest &m) {
  auto lines = content_lines(m);
  lines.insert(lines.begin() + kHashLinePosition, "HASH " + m.hash);
  std::string out;
  for (const auto &line : lines) out += line + '\n';
  return out;
}

std::string to_json(const Manifest &m) {
  nlohmann::json j;
  j["format"] = "composekit-manifest";
  j["version"] = 1;
  j["tool"] = m.tool_version;
  j["setup"] = m.setup;
  j["request"] = m.request;
  j["hash"] = m.hash;
  j["files"] = nlohmann::json::array();
  for (const auto &f : m.files)
    j["files"].push_back({{"routine", f.routine}, {"path", f.path}, {"null", f.is_null}});
  j["parameters"] = nlohmann::json::array();
  for (const auto &p : m.params) {
    nlohmann::json chain = nlohmann::json::array();
    for (const auto &[source, value] : p.chain) chain.push_back({{"source", source}, {"value", value}});
    j["parameters"].push_back(
        {{"name", p.name}, {"type", to_string(p.type)}, {"value", p.value}, {"chain", chain}});
  }
  j["variables"] = nlohmann::json::array();
  for (const auto &v : m.vars) j["variables"].push_back({{"name", v.name}, {"index", v.index}});
  j["initOrder"] = m.init_order;
  j["finalizeOrder"] = m.finalize_order;
  j["droppedRequests"] = nlohmann::json::array();
  for (const auto &d : m.dropped) j["droppedRequests"].push_back({{"path", d.path}, {"reason", d.reason}});
  return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  m.tool_version.clear();
  int line_no = 0;
  auto fail = [&](const std::string &why) {
    return Error(ErrorKind::MalformedManifest, "manifest", line_no, why);
  };
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto space = line.find(' ');
    std::string tag = line.substr(0, space);
    std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
    auto tokens = tokenize_record(rest);

    if (tag == "COMPOSEKIT-MANIFEST") {
      if (rest != "1") throw fail("unsupported manifest version " + rest);
      saw_magic = true;
    } else if (!saw_magic) {
      throw fail("missing COMPOSEKIT-MANIFEST header");
    } else if (tag == "TOOL") {
      m.tool_version = rest;
    } else if (tag == "SETUP") {
      m.setup = rest;
    } else if (tag == "REQUEST") {
      m.request = rest;
    } else if (tag == "HASH") {
      m.hash = rest;
    } else if (tag == "FILE") {
      if (tokens.size() == 2)
        m.files.push_back({tokens[0], tokens[1], false});
      else if (tokens.size() == 3 && tokens[2] == "null")
        m.files.push_back({tokens[0], tokens[1], true});
      else
        throw fail("FILE expects <routine> <path> [null]");
    } else if (tag == "PARAM") {
      if (tokens.size() < 4) throw fail("PARAM expects <name> <type> <value> <chain...>");
      auto type = param_type_from_string(tokens[1]);
      if (!type) throw fail("unknown parameter type " + tokens[1]);
      ParamRecord rec{tokens[0], *type, tokens[2], {}};
      for (size_t i = 3; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string::npos) throw fail("chain entry must be <source>=<value>");
        rec.chain.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
      }
      m.params.push_back(std::move(rec));
    } else if (tag == "VAR") {
      if (tokens.size() != 2) throw fail("VAR expects <name> <index>");
      try {
        m.vars.push_back({tokens[0], std::stoi(tokens[1])});
      } catch (const std::exception &) {
        throw fail("VAR index is not an integer");
      }
    } else if (tag == "INIT") {
      if (tokens.size() != 2) throw fail("INIT expects <k> <unit>");
      if (tokens[0] != std::to_string(m.init_order.size() + 1)) throw fail("INIT indices must be contiguous");
      m.init_order.push_back(tokens[1]);
    } else if (tag == "FINALIZE") {
      if (tokens.size() != 1) throw fail("FINALIZE expects <unit>");
      m.finalize_order.push_back(tokens[0]);
    } else if (tag == "DROPPED") {
      auto sp = rest.find(' ');
      if (sp == std::string::npos) throw fail("DROPPED expects <path> <reason>");
      m.dropped.push_back({rest.substr(0, sp), rest.substr(sp + 1)});
    } else {
      throw fail("unknown record " + tag);
    }
  }
  if (!saw_magic) throw fail("empty manifest");
  return m;
}

std::string Explanation::to_text() const {
  std::ostringstream out;
  if (kind == Kind::Routine) {
    out << "routine " << name << "\n";
    for (const auto &c : candidates) {
      out << "  candidate depth=" << (c.in_setup ? std::string("setup") : std::to_string(c.depth));
      if (c.is_stub) out << " null";
      out << " " << c.path << "\n";
    }
    if (selected) out << "selected " << selected->path << " (" << rule << ")\n";
  } else {
    out << "parameter " << name;
    if (effective) out << " " << to_string(effective->type);
    out << "\n";
    for (size_t i = 0; i < chain.size(); ++i)
      out << "  " << (i == 0 ? "default " : "override ") << chain[i].source << " = "
          << chain[i].value.text << "\n";
    if (effective) out << "effective " << effective->text << "\n";
  }
  return out.str();
}

Explanation explain(std::string_view name, const FileMap &files, const ParameterTable &params) {
  Explanation ex;
  ex.name = std::string(name);
  if (auto it = files.find(ex.name); it != files.end()) {
    ex.kind = Explanation::Kind::Routine;
    ex.candidates = it->second.candidates;
    ex.selected = it->second.selected;
    ex.rule = it->second.rule;
    return ex;
  }
  if (auto it = params.find(ex.name); it != params.end()) {
    ex.kind = Explanation::Kind::Parameter;
    ex.chain = it->second.chain();
    ex.effective = it->second.effective_value;
    return ex;
  }
  throw Error(ErrorKind::UnknownName, "", "'" + ex.name + "' is neither a routine nor a parameter of this setup");
}

}  // namespace composekit
