#include "dxtrust/jsonl.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/text.hpp"

#include <fstream>
#include <sstream>

namespace dxtrust {

std::vector<JsonLine> read_jsonl(std::istream& in,
                                 const std::function<void(std::size_t, const std::string&)>& on_error)
{
    std::vector<JsonLine> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty())
            continue;
        json value = json::parse(line, nullptr, false);
        if (value.is_discarded()) {
            on_error(number, "invalid JSON");
            continue;
        }
        if (!value.is_object()) {
            on_error(number, "record is not an object");
            continue;
        }
        out.push_back({number, std::move(value)});
    }
    return out;
}

std::vector<JsonLine> read_jsonl_file(const std::filesystem::path& path,
                                      const std::function<void(std::size_t, const std::string&)>& on_error)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return read_jsonl(in, on_error);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << content;
    if (!out)
        throw IoError("write failed for " + path.string());
}

std::string to_jsonl(const std::vector<json>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

}  // namespace dxtrust
