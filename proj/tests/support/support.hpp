#pragma once

// Shared helpers for the unit and acceptance binaries: scratch directories,
// fixture lookup and a small builder for throwaway trees.

#include <stdlib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cktest {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(CK_FIXTURES_DIR); }
inline fs::path golden_dir() { return fs::path(CK_GOLDEN_DIR); }
inline fs::path regression_dir() { return fs::path(CK_REGRESSION_DIR); }
inline fs::path flash_tree() { return fixtures_dir() / "flash_tree"; }
inline fs::path seeded_tree() { return fixtures_dir() / "seeded_tree"; }

inline std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path &p, const std::string &content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

inline std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::string templ = (fs::temp_directory_path() / "cktest-XXXXXX").string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
    path_ = templ;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const fs::path &path() const { return path_; }
  fs::path operator/(const std::string &rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

/// Copies a fixture into `dst` so a test can mutate it.
inline fs::path copy_tree(const fs::path &src, const fs::path &dst) {
  fs::create_directories(dst);
  fs::copy(src, dst, fs::copy_options::recursive);
  return dst;
}

/// Writes small source trees. Routine files get a doc header unless asked not to.
class TreeBuilder {
 public:
  explicit TreeBuilder(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "Simulation");
  }

  TreeBuilder &dir(const std::string &rel) {
    fs::create_directories(root_ / rel);
    return *this;
  }
  TreeBuilder &config(const std::string &dir, const std::string &text) {
    write_file(root_ / dir / "Config", text);
    return *this;
  }
  TreeBuilder &routine(const std::string &dir, const std::string &name, bool header = true,
                       const std::string &extra = "") {
    std::string body;
    if (header) body += "!!****if* source/" + dir + "/" + name + "\n!!***\n";
    body += extra;
    body += "subroutine " + name + "()\nend subroutine " + name + "\n";
    write_file(root_ / dir / (name + ".F90"), body);
    return *this;
  }
  TreeBuilder &file(const std::string &rel, const std::string &content) {
    write_file(root_ / rel, content);
    return *this;
  }
  const fs::path &root() const { return root_; }

 private:
  fs::path root_;
};

/// Compares `actual` with tests/golden/<name>. With CK_UPDATE_GOLDEN set in
/// the environment the golden file is rewritten instead.
inline bool matches_golden(const std::string &name, const std::string &actual) {
  const fs::path p = golden_dir() / name;
  if (const char *update = std::getenv("CK_UPDATE_GOLDEN"); update && *update) {
    write_file(p, actual);
    return true;
  }
  if (!fs::exists(p)) return false;
  return read_file(p) == actual;
}

}  // namespace cktest
