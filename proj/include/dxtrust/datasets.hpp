#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dxtrust {

enum class Role { Patient, Clinician };

std::string_view to_string(Role role);

struct Utterance {
    Role role = Role::Patient;
    std::string text;
    int turn_index = 0;

    bool operator==(const Utterance&) const = default;
};

struct GoldAnnotation {
    std::optional<int> depression_risk;  // 0..3
    std::optional<int> suicide_risk;     // 0..3
    std::vector<std::string> symptoms;   // surface forms, resolved at use time
    std::vector<std::string> exclusions;
    std::optional<int> duration_days;

    bool operator==(const GoldAnnotation&) const = default;
};

struct Dialogue {
    std::string id;
    std::vector<Utterance> turns;
    std::optional<int> age_years;
    std::optional<std::string> gender;
    std::optional<GoldAnnotation> gold;
    std::optional<std::string> silver_label;

    bool operator==(const Dialogue&) const = default;
};

enum class AgeBucket { UpTo17, Age18To25, Age26To35, Age36To45, Age46To60, Over60, Unknown };

/// Table-header spelling: "≤17", "18–25", ..., "60+", "unknown".
std::string_view to_string(AgeBucket bucket);

/// Inclusive ranges; 60 falls in 46–60 and "60+" means over 60. Throws
/// DomainError for a negative age.
AgeBucket bucket_age(std::optional<int> age_years);

/// Throws SchemaError(line, field) for invalid records or duplicate ids.
std::vector<Dialogue> load_dialogues(std::istream& in);
std::vector<Dialogue> load_dialogues(const std::filesystem::path& path);

nlohmann::json to_json(const Dialogue& d);
std::string serialize_dialogues(const std::vector<Dialogue>& dialogues);

/// "[i] Patient: text" per turn, in order.
std::string render_dialogue(const Dialogue& d);

}  // namespace dxtrust
