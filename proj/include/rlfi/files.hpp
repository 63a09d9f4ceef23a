#ifndef RLFI_FILES_HPP_
#define RLFI_FILES_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace rlfi {

// Whole-file helpers; both throw IoError.
std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories. Output is written in binary mode (LF kept).
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace rlfi

#endif  // RLFI_FILES_HPP_
