#pragma once

#include "dxtrust/kgstore.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dxtrust {

/// Executable diagnostic rule for one disorder: symptom count, core
/// symptoms, duration and exclusionary conditions.
struct DisorderCriteria {
    EntityId disorder;
    int min_symptom_count = 0;
    std::set<EntityId> core_symptoms;
    int min_core_count = 1;
    std::optional<int> required_duration_days;
    /// When set, missing duration evidence fails the duration check instead
    /// of passing it.
    bool duration_strict = false;
    std::set<EntityId> exclusions;
    /// The disorder's has_symptom set, resolved from the graph at load.
    std::set<EntityId> symptoms;
};

struct RuleOutcome {
    EntityId disorder;
    bool count_met = false;
    bool core_met = false;
    bool exclusions_clear = true;
    bool duration_met = true;
    bool indicated = false;
    int matched_symptoms = 0;
    int matched_core = 0;

    bool operator==(const RuleOutcome&) const = default;
};

using CriteriaMap = std::map<EntityId, DisorderCriteria>;

/// Validates `criteria` against the graph and fills its symptom set.
/// Throws IntegrityError.
void bind_criteria(DisorderCriteria& criteria, const KnowledgeGraph& kg);

CriteriaMap load_criteria(std::istream& in, const KnowledgeGraph& kg);
CriteriaMap load_criteria(const std::filesystem::path& path, const KnowledgeGraph& kg);

RuleOutcome evaluate_rules(const DisorderCriteria& criteria, const std::set<EntityId>& present_symptoms,
                           const std::set<EntityId>& active_exclusions, std::optional<int> duration_days);

/// Label produced when no disorder is indicated.
inline constexpr const char* kNoDiagnosis = "NoDiagnosis";

/// Applies every rule to gold annotations; returns the indicated disorder
/// with the most matched symptoms (ties to the smaller id) or kNoDiagnosis.
std::string silver_label(const CriteriaMap& criteria, const KnowledgeGraph& kg,
                         const std::set<EntityId>& gold_symptoms, const std::set<EntityId>& gold_exclusions,
                         std::optional<int> duration_days);

/// Resolves entity ids or surface forms to entity ids of `kind`; unresolved forms are
/// returned through `unresolved` when given.
std::set<EntityId> resolve_surface_forms(const KnowledgeGraph& kg, const std::vector<std::string>& forms,
                                         EntityKind kind, std::vector<std::string>* unresolved = nullptr);

}  // namespace dxtrust
