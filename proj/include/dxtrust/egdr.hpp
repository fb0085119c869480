#pragma once

#include "dxtrust/criteria.hpp"
#include "dxtrust/datasets.hpp"
#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"
#include "dxtrust/retrieval.hpp"
#include "dxtrust/sections.hpp"
#include "dxtrust/templates.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dxtrust {

enum class PromptingMode { EGDR, Direct, CoT };

std::string_view to_string(PromptingMode mode);
std::optional<PromptingMode> parse_prompting_mode(std::string_view text);

struct CriteriaAnalysis {
    EntityId disorder;
    std::string text;
    StepAssertions assertions;

    bool operator==(const CriteriaAnalysis&) const = default;
};

struct ExclusionAnalysis {
    std::string text;
    std::vector<EntityId> asserted_exclusions;
    std::map<EntityId, bool> exclusions_clear;

    bool operator==(const ExclusionAnalysis&) const = default;
};

/// Structured diagnostic output of one prompting run.
struct DiagnosticHypothesis {
    std::string dialogue_id;
    PromptingMode prompting_mode = PromptingMode::EGDR;
    std::vector<SymptomLine> extracted_symptoms;
    std::optional<int> duration_days;
    CandidateDisorders candidates;
    std::vector<CriteriaAnalysis> criteria_analysis;
    ExclusionAnalysis exclusion_analysis;
    std::string final_diagnosis;  // disorder id or kNoDiagnosis
    std::string reasoning_text;
    std::string template_version;

    std::set<EntityId> symptom_ids() const;
};

nlohmann::json to_json(const DiagnosticHypothesis& h);
/// Throws SchemaError.
DiagnosticHypothesis hypothesis_from_json(const nlohmann::json& rec, std::size_t line = 0);
std::vector<DiagnosticHypothesis> load_hypotheses(const std::filesystem::path& path);

struct PromptBundle {
    int stage = 0;  // 1..5 for EGDR; 1 for the single-turn baselines
    std::string system_text;
    std::string user_text;
    std::vector<std::string> expected_sections;
};

struct EgdrConfig {
    std::string model;
    std::uint64_t seed = 0;
    int max_tokens = 1024;
};

/// Everything a prompting run reads; all references must outlive the run.
struct EgdrContext {
    const KnowledgeGraph& kg;
    const CriteriaMap& criteria;
    const TemplateSet& templates;
    ChatProvider& provider;
    EgdrConfig config;
};

/// Outputs of the stages completed so far; prompt builders only read the
/// fields of earlier stages.
struct StageArtifacts {
    std::vector<SymptomLine> symptoms;
    std::optional<int> duration_days;
    CandidateDisorders ranking;     // graph-matched top-3, computed after stage 1
    CandidateDisorders candidates;  // stage 2
    std::string criteria_body;      // stage 3
    std::map<EntityId, StepAssertions> criteria_assertions;
    std::string exclusion_body;     // stage 4
    std::vector<EntityId> active_exclusions;
    std::map<EntityId, bool> exclusions_clear;
};

PromptBundle build_stage_prompt(int stage, const Dialogue& dialogue, const StageArtifacts& artifacts,
                                const KnowledgeGraph& kg, const CriteriaMap& criteria, const TemplateSet& templates);

PromptBundle build_baseline_prompt(PromptingMode mode, const Dialogue& dialogue, const KnowledgeGraph& kg,
                                   const CriteriaMap& criteria, const TemplateSet& templates);

/// Human-readable rule text, e.g. "at least 5 of the listed symptoms, including
/// at least 1 of: depressed mood, anhedonia; lasting at least 14 days".
std::string describe_criteria(const DisorderCriteria& c, const KnowledgeGraph& kg);

/// Has_symptom edges into `symptoms`, verbalized one per line.
std::string kg_symptom_excerpt(const KnowledgeGraph& kg, const std::set<EntityId>& symptoms);
/// Symptom, criterion and exclusion edges plus the rule text of each disorder.
std::string kg_criteria_excerpt(const KnowledgeGraph& kg, const CriteriaMap& criteria,
                                const std::vector<EntityId>& disorders);
std::string kg_exclusion_excerpt(const KnowledgeGraph& kg, const std::vector<EntityId>& disorders);

/// Five sequential provider calls (symptoms, candidates, criteria,
/// exclusions, final diagnosis), each parsed before the next prompt is
/// built. A failed parse gets one repair retry, then StageParseFailure.
DiagnosticHypothesis run_egdr(const Dialogue& dialogue, const EgdrContext& ctx);

/// Single-turn Direct or CoT prompting with the same criteria text.
DiagnosticHypothesis run_baseline(const Dialogue& dialogue, const EgdrContext& ctx, PromptingMode mode);

}  // namespace dxtrust
