#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <vector>

namespace dxtrust {

using json = nlohmann::json;

struct JsonLine {
    std::size_t line = 0;  // 1-based
    json value;
};

/// Reads line-delimited JSON objects; blank lines are skipped. Lines that
/// fail to parse or are not objects are reported through `on_error` (which
/// is expected to throw) with the 1-based line number.
std::vector<JsonLine> read_jsonl(std::istream& in,
                                 const std::function<void(std::size_t, const std::string&)>& on_error);

std::vector<JsonLine> read_jsonl_file(const std::filesystem::path& path,
                                      const std::function<void(std::size_t, const std::string&)>& on_error);

std::string read_text_file(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// One compact record per line, each terminated by '\n'.
std::string to_jsonl(const std::vector<json>& records);

}  // namespace dxtrust
