#pragma once

// Scripted stand-in for a chat model, used to generate the committed stub
// scripts and the scoring fixtures. It answers from a dialogue's gold
// annotation, so its outputs are correct by construction except where a
// flaw is requested.

#include "dxtrust/claims.hpp"
#include "dxtrust/confidence.hpp"
#include "dxtrust/criteria.hpp"
#include "dxtrust/datasets.hpp"
#include "dxtrust/egdr.hpp"
#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dxtrust::fixtures {

struct GoldView {
    std::set<EntityId> symptoms;
    std::set<EntityId> exclusions;
    std::optional<int> duration_days;
    std::string label;  // rule-derived, kNoDiagnosis when nothing is indicated
};

/// Throws SchemaError when the dialogue has no gold annotation.
GoldView gold_view(const Dialogue& d, const KnowledgeGraph& kg, const CriteriaMap& criteria);

/// Stage number from a "stage N of 5" system prompt; 0 when absent.
int stage_of(const ChatRequest& request);

/// Symptom lines citing the patient turns that mention each symptom.
std::vector<SymptomLine> cite_symptoms(const Dialogue& d, const std::set<EntityId>& symptoms,
                                       const KnowledgeGraph& kg);

/// Gold-faithful answers for the five EGDR stages and both baselines.
/// With `flawed_baseline`, baseline answers for below-threshold or excluded
/// presentations (gold label NoDiagnosis but symptoms present) overcall
/// Major Depressive Disorder with negated, weakly grounded reasoning.
class OracleResponder {
public:
    OracleResponder(const KnowledgeGraph& kg, const CriteriaMap& criteria, bool flawed_baseline = false)
        : kg_(kg), criteria_(criteria), flawed_(flawed_baseline) {}

    std::string respond(const Dialogue& d, PromptingMode mode, const ChatRequest& request) const;

    std::string stage_response(const Dialogue& d, int stage) const;
    std::string baseline_response(const Dialogue& d, PromptingMode mode) const;

private:
    CandidateDisorders candidates(const GoldView& g) const;
    std::vector<std::string> grounded_reasoning(const GoldView& g) const;

    const KnowledgeGraph& kg_;
    const CriteriaMap& criteria_;
    bool flawed_;
};

/// Runs every dialogue through `mode` with the oracle and returns the
/// (request key -> response) script.
std::map<std::string, std::string> generate_script(const std::vector<Dialogue>& corpus, PromptingMode mode,
                                                   const KnowledgeGraph& kg, const CriteriaMap& criteria,
                                                   const TemplateSet& templates, const EgdrConfig& config,
                                                   bool flawed_baseline);

/// Hypothesis shaped like the worked low-confidence example: four non-core
/// symptoms, criteria asserted met, Major Depressive Disorder concluded.
DiagnosticHypothesis fig5_hypothesis();

/// Claims returned by the scripted decomposition of fig5_hypothesis().
std::vector<std::string> fig5_claims();

struct Fig5Fixture {
    std::map<std::string, std::string> script;
    std::vector<AttributionLabel> labels;  // per claim
    ConfidenceReport report;
};

/// Picks attribution labels for the fig5 claims so that KAS lands as close
/// as possible to `target_kas`, then records the decomposition and
/// classification responses under `config`.
Fig5Fixture build_fig5_fixture(const KnowledgeGraph& kg, const CriteriaMap& criteria, const TemplateSet& templates,
                               const ScoringConfig& config, double target_kas);

}  // namespace dxtrust::fixtures
