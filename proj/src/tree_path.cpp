#include "composekit/tree_path.hpp"

namespace composekit::tree_path {

std::vector<std::string> split(std::string_view path) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= path.size()) {
    size_t end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::optional<std::string> normalize(std::string_view path) {
  if (!path.empty() && path.front() == '/') return std::nullopt;
  std::string out;
  for (const auto &part : split(path)) {
    if (part == ".") continue;
    if (part == "..") return std::nullopt;
    if (!out.empty()) out += '/';
    out += part;
  }
  return out;
}

std::string join(std::string_view parent, std::string_view child) {
  if (parent.empty()) return std::string(child);
  if (child.empty()) return std::string(parent);
  std::string out(parent);
  out += '/';
  out += child;
  return out;
}

int depth(std::string_view path) {
  if (path.empty()) return 0;
  int n = 1;
  for (char c : path)
    if (c == '/') ++n;
  return n;
}

std::string parent(std::string_view path) {
  auto pos = path.rfind('/');
  if (pos == std::string_view::npos) return {};
  return std::string(path.substr(0, pos));
}

std::string basename(std::string_view path) {
  auto pos = path.rfind('/');
  if (pos == std::string_view::npos) return std::string(path);
  return std::string(path.substr(pos + 1));
}

std::string top_component(std::string_view path) {
  auto pos = path.find('/');
  return std::string(path.substr(0, pos));
}

bool is_within(std::string_view path, std::string_view ancestor) {
  if (ancestor.empty()) return true;
  if (path.size() < ancestor.size()) return false;
  if (path.substr(0, ancestor.size()) != ancestor) return false;
  return path.size() == ancestor.size() || path[ancestor.size()] == '/';
}

std::vector<std::string> lineage(std::string_view path) {
  std::vector<std::string> out;
  for (size_t pos = path.find('/'); pos != std::string_view::npos;
       pos = path.find('/', pos + 1))
    out.emplace_back(path.substr(0, pos));
  if (!path.empty()) out.emplace_back(path);
  return out;
}

}  // namespace composekit::tree_path
