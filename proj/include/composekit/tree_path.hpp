#pragma once

// Helpers for tree-relative paths. A tree path uses '/' separators, has no
// leading or trailing separator and no "." or ".." components. The tree root
// itself is the empty string.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace composekit::tree_path {

std::vector<std::string> split(std::string_view path);

/// Normalizes a user- or Config-supplied path. Returns nullopt when the path is
/// absolute or climbs with "..".
std::optional<std::string> normalize(std::string_view path);

std::string join(std::string_view parent, std::string_view child);

/// Number of components; the root has depth 0.
int depth(std::string_view path);

std::string parent(std::string_view path);
std::string basename(std::string_view path);
std::string top_component(std::string_view path);

/// True when `path` equals `ancestor` or lies below it.
bool is_within(std::string_view path, std::string_view ancestor);

/// All proper prefixes of `path` from depth 1 upward, followed by `path`.
std::vector<std::string> lineage(std::string_view path);

}  // namespace composekit::tree_path
