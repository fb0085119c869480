#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace dxtrust {

/// Versioned prompt templates loaded from `<root>/<version>/*.txt`.
/// Placeholders are written `{{name}}`.
class TemplateSet {
public:
    TemplateSet() = default;
    TemplateSet(std::string version, std::map<std::string, std::string> templates)
        : version_(std::move(version)), templates_(std::move(templates)) {}

    /// Throws IoError when the directory is missing or empty.
    static TemplateSet load(const std::filesystem::path& root, const std::string& version);

    const std::string& version() const noexcept { return version_; }
    bool has(const std::string& name) const { return templates_.count(name) != 0; }
    const std::string& raw(const std::string& name) const;

    /// Substitutes every placeholder; throws DomainError for a placeholder
    /// without a value or an unknown template name.
    std::string render(const std::string& name, const std::map<std::string, std::string>& vars) const;

private:
    std::string version_;
    std::map<std::string, std::string> templates_;
};

/// Directory holding the shipped template versions.
std::filesystem::path default_template_root();

/// Directory holding shipped data assets (graph, criteria, corpus, scripts).
std::filesystem::path default_data_root();

}  // namespace dxtrust
