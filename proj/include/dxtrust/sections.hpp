#pragma once

#include "dxtrust/kgstore.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dxtrust {

namespace section {
inline constexpr const char* kSymptoms = "SYMPTOMS";
inline constexpr const char* kDuration = "DURATION";
inline constexpr const char* kCandidates = "CANDIDATES";
inline constexpr const char* kCriteriaCheck = "CRITERIA CHECK";
inline constexpr const char* kExclusionCheck = "EXCLUSION CHECK";
inline constexpr const char* kFinalDiagnosis = "FINAL DIAGNOSIS";
inline constexpr const char* kReasoning = "REASONING";
inline constexpr const char* kStepwise = "STEPWISE REASONING";
}  // namespace section

/// Every header the scanner recognizes, longest first.
const std::vector<std::string>& known_section_labels();

using SectionMap = std::map<std::string, std::string>;

/// Case-insensitive scan for known headers. A header is a line that, after
/// stripping markdown '#'/'*' decoration, reads "LABEL", "LABEL:" or
/// "LABEL: inline text". Text before the first header is dropped; a label
/// seen twice keeps its last body.
SectionMap scan_sections(std::string_view text);

/// scan_sections() plus a presence check; throws MissingSection naming
/// every absent expected label.
SectionMap parse_structured_output(std::string_view text, const std::vector<std::string>& expected_sections);

struct StepAssertions {
    std::optional<bool> count_met;
    std::optional<bool> core_met;
    std::optional<bool> duration_met;
    std::optional<bool> exclusions_clear;

    bool operator==(const StepAssertions&) const = default;
};

/// Merges `other` into `into`; values present in `other` win.
void merge_assertions(StepAssertions& into, const StepAssertions& other);

struct SymptomLine {
    EntityId id;
    std::vector<int> turns;
};

/// "- surface form (turns 1, 3)" lines. Unresolved lines land in
/// `unresolved` when given; non-bullet prose is ignored.
std::vector<SymptomLine> parse_symptom_lines(std::string_view body, const KnowledgeGraph& kg,
                                             std::vector<std::string>* unresolved = nullptr);

/// "21 days", "3 weeks", "6 months", "2 years"; nullopt for unknown.
std::optional<int> parse_duration_days(std::string_view body);

/// Bullet list of disorder names ("none" yields an empty list).
std::vector<EntityId> parse_disorder_list(std::string_view body, const KnowledgeGraph& kg,
                                          std::vector<std::string>* unresolved = nullptr);

/// "[Disorder name]" blocks followed by "Key: yes/no" lines.
std::map<EntityId, StepAssertions> parse_assertion_blocks(std::string_view body, const KnowledgeGraph& kg,
                                                          std::vector<std::string>* unresolved = nullptr);

/// Body text of each "[Disorder name]" block (header excluded).
std::map<EntityId, std::string> assertion_block_texts(std::string_view body, const KnowledgeGraph& kg);

/// "Active exclusions: a, b" (or "none").
std::optional<std::vector<EntityId>> parse_active_exclusions(std::string_view body, const KnowledgeGraph& kg,
                                                             std::vector<std::string>* unresolved = nullptr);

/// Disorder id, kNoDiagnosis, or nullopt when the first line names neither.
std::optional<std::string> parse_final_diagnosis(std::string_view body, const KnowledgeGraph& kg);

// Canonical renderings shared by the pipeline, fixtures and parsers.
std::string render_symptom_line(const KnowledgeGraph& kg, const SymptomLine& s);
std::string render_duration(std::optional<int> days);
std::string render_yes_no(bool value);
std::string render_diagnosis(const KnowledgeGraph& kg, const std::string& label);

}  // namespace dxtrust
