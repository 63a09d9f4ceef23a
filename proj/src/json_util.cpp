#include "json_util.hpp"

#include <algorithm>

namespace rlfi::detail {

int line_of_offset(std::string_view doc, std::size_t offset) {
  offset = std::min(offset, doc.size());
  return 1 + static_cast<int>(std::count(doc.begin(), doc.begin() + offset, '\n'));
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(document, e.byte == 0 ? 0 : e.byte - 1),
                     e.what());
  }
}

void schema_error(const std::string& path, const std::string& msg) {
  throw ParseError(0, path + ": " + msg);
}

void require_fields(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> required,
                    std::initializer_list<std::string_view> optional) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (auto key : required) {
    if (!obj.contains(std::string(key))) {
      schema_error(path, "missing field '" + std::string(key) + "'");
    }
  }
  for (const auto& [key, _] : obj.items()) {
    bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                 std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) schema_error(path, "unknown field '" + key + "'");
  }
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  const auto wide = v.get<std::int64_t>();
  if (wide < INT32_MIN || wide > INT32_MAX) schema_error(path, "integer out of range");
  return static_cast<int>(wide);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

const std::string& as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get_ref<const std::string&>();
}

int parse_state_key(const std::string& key, const std::string& path) {
  bool ok = !key.empty() && key.size() <= 9 &&
            std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (!ok) schema_error(path, "key '" + key + "' is not a state index");
  return std::stoi(key);
}

}  // namespace rlfi::detail
