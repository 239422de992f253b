#pragma once

// Shared helpers for the JSON formats. Private to the library.

#include <cmath>
#include <string>

#include <json.hpp>

#include "hetviz/error.hpp"

namespace hetviz::detail {

using ojson = nlohmann::ordered_json;

/// Integral values are written as JSON integers so files stay readable and
/// round-trip exactly.
inline ojson number_json(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9007199254740992.0)
    return static_cast<std::int64_t>(x);
  return x;
}

/// Field access with a JSON-pointer-like location in every error message.
class Reader {
public:
  Reader(const ojson& node, std::string where, std::string attribute = {})
      : node_(node), where_(std::move(where)), attribute_(std::move(attribute)) {
    if (!node_.is_object()) fail("expected an object");
  }

  const ojson& node() const { return node_; }
  const std::string& where() const { return where_; }
  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  [[noreturn]] void fail(const std::string& what) const {
    std::string msg = "at " + (where_.empty() ? std::string("document root") : where_);
    if (!attribute_.empty()) msg += " (attribute '" + attribute_ + "')";
    throw Error(ErrorCode::Parse, msg + ": " + what, attribute_);
  }

  const ojson& get(const char* key) const {
    if (!has(key)) fail(std::string("missing field '") + key + "'");
    return node_.at(key);
  }
  std::string str(const char* key) const {
    const auto& v = get(key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }
  double num(const char* key) const {
    const auto& v = get(key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }
  bool flag(const char* key, bool fallback = false) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) fail(std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }
  const ojson& array(const char* key) const {
    const auto& v = get(key);
    if (!v.is_array()) fail(std::string("field '") + key + "' must be an array");
    return v;
  }
  std::string at(const char* key) const { return where_ + "/" + key; }

private:
  const ojson& node_;
  std::string where_;
  std::string attribute_;
};

inline ojson parse_json(std::string_view bytes) {
  try {
    return ojson::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
  }
}

} // namespace hetviz::detail
