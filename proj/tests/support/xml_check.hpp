#pragma once

// Minimal well-formedness check: balanced, properly nested tags and quoted
// attributes. Enough for the SVG subset the renderer emits.

#include <string>
#include <string_view>
#include <vector>

namespace hetviz::testing {

inline bool well_formed_xml(std::string_view s) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < s.size()) {
    if (s[i] != '<') {
      if (s[i] == '&') {
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 6) return false;
      }
      ++i;
      continue;
    }
    auto end = s.find('>', i);
    if (end == std::string_view::npos) return false;
    std::string_view tag = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.starts_with("?")) continue;
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    if (self_closing) tag.remove_suffix(1);
    auto name_end = tag.find_first_of(" \n\t");
    std::string name(tag.substr(0, name_end));
    if (name.empty()) return false;
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) return false;
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return root_seen && stack.empty();
}

inline std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string_view::npos; p = s.find(needle, p + needle.size())) ++n;
  return n;
}

} // namespace hetviz::testing
