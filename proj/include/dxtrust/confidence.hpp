#pragma once

#include "dxtrust/claims.hpp"
#include "dxtrust/criteria.hpp"
#include "dxtrust/egdr.hpp"
#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"
#include "dxtrust/retrieval.hpp"
#include "dxtrust/sections.hpp"
#include "dxtrust/templates.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dxtrust {

/// Reasoning trace as asserted by the model, independent of its prose.
struct LogicTrace {
    std::set<EntityId> claimed_symptoms;
    std::set<EntityId> claimed_exclusions;
    std::optional<int> claimed_duration_days;
    /// Disorders the trace considered (its candidate list).
    std::set<EntityId> candidates;
    /// Step assertions per disorder, from the criteria and exclusion checks.
    std::map<EntityId, StepAssertions> step_assertions;
    std::string conclusion;  // disorder id or kNoDiagnosis
};

/// Scans the labeled sections of the hypothesis's reasoning text. Narrative
/// outside the known sections is ignored. Throws MalformedTrace when the
/// final diagnosis section is absent or names nothing known.
LogicTrace parse_logic_trace(const DiagnosticHypothesis& hypothesis, const KnowledgeGraph& kg);

/// Four-level rubric against evaluate_rules():
///   3  conclusion agrees with the rules and every required assertion is
///      present and correct;
///   2  conclusion agrees, some required assertion missing or wrong;
///   1  conclusion disagrees;
///   0  conclusion names a disorder the rules reject and the trace asserts
///      as met a check the rules find unmet.
/// Required assertions are count, core and exclusions for the concluded
/// disorder, or for every candidate when the conclusion is NoDiagnosis;
/// a duration assertion is graded whenever present.
/// Throws UnknownDisorder when the conclusion has no criteria entry.
int logic_consistency_score(const LogicTrace& trace, const CriteriaMap& criteria, const KnowledgeGraph& kg);

/// lambda*kas + (1-lambda)*lcs/3. Throws DomainError when kas leaves
/// [0, 1], lcs leaves {0..3} or lambda leaves [0, 1].
double diagnosis_confidence_score(double kas, int lcs, double lambda);

struct ConfidenceReport {
    std::string dialogue_id;
    std::string diagnosis;
    double kas = 0.0;
    int lcs = 0;
    double dcs = 0.0;
    std::vector<ClaimScore> claims;
    std::vector<std::string> evidence_triplets;  // triplet keys, relevance order
    std::set<EntityId> seed_entities;
    double alpha = 0.5;
    double lambda = 0.75;
    bool kas_mean_normalized = false;
};

nlohmann::json to_json(const ConfidenceReport& r);
/// Throws SchemaError.
ConfidenceReport report_from_json(const nlohmann::json& rec, std::size_t line = 0);
std::vector<ConfidenceReport> load_reports(const std::filesystem::path& path);

/// Model-backed components used while scoring; a null chat provider selects
/// the symbolic decomposition and attribution.
struct ScoringProviders {
    ChatProvider* chat = nullptr;
    const TemplateSet* templates = nullptr;
    const Embedder* embedder = nullptr;  // required
};

/// Full scoring pipeline for one hypothesis. Component errors are rethrown
/// with the failing stage recorded (see Error::stage()).
ConfidenceReport score_reasoning(const DiagnosticHypothesis& hypothesis, const KnowledgeGraph& kg,
                                 const CriteriaMap& criteria, const ScoringConfig& config,
                                 const ScoringProviders& providers);

}  // namespace dxtrust
