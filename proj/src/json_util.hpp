#ifndef RLFI_SRC_JSON_UTIL_HPP_
#define RLFI_SRC_JSON_UTIL_HPP_

#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rlfi/errors.hpp"

namespace rlfi::detail {

using json = nlohmann::ordered_json;

int line_of_offset(std::string_view doc, std::size_t offset);

// Parses `document`, mapping syntax errors to ParseError with a line number.
json parse_json(std::string_view document);

[[noreturn]] void schema_error(const std::string& path, const std::string& msg);

void require_fields(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> required,
                    std::initializer_list<std::string_view> optional = {});

int as_int(const json& v, const std::string& path);
double as_number(const json& v, const std::string& path);
const std::string& as_string(const json& v, const std::string& path);

// Object key holding a non-negative decimal state index.
int parse_state_key(const std::string& key, const std::string& path);

}  // namespace rlfi::detail

#endif  // RLFI_SRC_JSON_UTIL_HPP_
