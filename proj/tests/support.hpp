#pragma once

#include "dxtrust/criteria.hpp"
#include "dxtrust/datasets.hpp"
#include "dxtrust/kgstore.hpp"
#include "dxtrust/templates.hpp"

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

namespace dxtrust::test {

inline const KnowledgeGraph& shipped_kg()
{
    static const KnowledgeGraph kg = load_kg(default_data_root() / "kg" / "dsm5_depressive.jsonl");
    return kg;
}

inline const CriteriaMap& shipped_criteria()
{
    static const CriteriaMap c = load_criteria(default_data_root() / "criteria" / "dsm5_criteria.jsonl", shipped_kg());
    return c;
}

inline const TemplateSet& shipped_templates()
{
    static const TemplateSet t = TemplateSet::load(default_template_root(), "v1");
    return t;
}

inline const std::vector<Dialogue>& shipped_corpus()
{
    static const std::vector<Dialogue> c = load_dialogues(default_data_root() / "corpus" / "synthetic.jsonl");
    return c;
}

inline KnowledgeGraph kg_from_text(const std::string& text)
{
    std::istringstream in(text);
    return load_kg(in);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("dxtrust_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace dxtrust::test
