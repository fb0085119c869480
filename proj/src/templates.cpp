#include "dxtrust/templates.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"

#include <cstdlib>

#ifndef DXTRUST_DATA_DIR
#define DXTRUST_DATA_DIR "data"
#endif

namespace dxtrust {

TemplateSet TemplateSet::load(const std::filesystem::path& root, const std::string& version)
{
    std::filesystem::path dir = root / version;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("template version directory not found: " + dir.string());
    std::map<std::string, std::string> templates;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt")
            continue;
        templates[entry.path().stem().string()] = read_text_file(entry.path());
    }
    if (templates.empty())
        throw IoError("no templates in " + dir.string());
    return TemplateSet(version, std::move(templates));
}

const std::string& TemplateSet::raw(const std::string& name) const
{
    auto it = templates_.find(name);
    if (it == templates_.end())
        throw DomainError("unknown template '" + name + "' in version " + version_);
    return it->second;
}

std::string TemplateSet::render(const std::string& name, const std::map<std::string, std::string>& vars) const
{
    const std::string& src = raw(name);
    std::string out;
    out.reserve(src.size());
    std::size_t pos = 0;
    while (pos < src.size()) {
        std::size_t open = src.find("{{", pos);
        if (open == std::string::npos) {
            out.append(src, pos, std::string::npos);
            break;
        }
        std::size_t close = src.find("}}", open + 2);
        if (close == std::string::npos)
            throw DomainError("unterminated placeholder in template '" + name + "'");
        out.append(src, pos, open - pos);
        std::string key = src.substr(open + 2, close - open - 2);
        auto it = vars.find(key);
        if (it == vars.end())
            throw DomainError("template '" + name + "' needs a value for {{" + key + "}}");
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::filesystem::path default_data_root()
{
    if (const char* env = std::getenv("DXTRUST_DATA_DIR"); env && *env)
        return env;
    return DXTRUST_DATA_DIR;
}

std::filesystem::path default_template_root()
{
    return default_data_root() / "templates";
}

}  // namespace dxtrust
