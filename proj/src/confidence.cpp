#include "dxtrust/confidence.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"

#include <cmath>

namespace dxtrust {

LogicTrace parse_logic_trace(const DiagnosticHypothesis& hypothesis, const KnowledgeGraph& kg)
{
    SectionMap s = scan_sections(hypothesis.reasoning_text);
    auto final_it = s.find(section::kFinalDiagnosis);
    if (final_it == s.end())
        throw MalformedTrace("reasoning of " + hypothesis.dialogue_id + " has no FINAL DIAGNOSIS section");
    auto conclusion = parse_final_diagnosis(final_it->second, kg);
    if (!conclusion)
        throw MalformedTrace("FINAL DIAGNOSIS of " + hypothesis.dialogue_id + " names no known disorder");

    LogicTrace t;
    t.conclusion = *conclusion;
    if (auto it = s.find(section::kSymptoms); it != s.end())
        for (const auto& line : parse_symptom_lines(it->second, kg))
            t.claimed_symptoms.insert(line.id);
    if (auto it = s.find(section::kDuration); it != s.end())
        t.claimed_duration_days = parse_duration_days(it->second);
    if (auto it = s.find(section::kCandidates); it != s.end())
        for (const auto& d : parse_disorder_list(it->second, kg))
            t.candidates.insert(d);
    if (auto it = s.find(section::kCriteriaCheck); it != s.end())
        for (const auto& [d, a] : parse_assertion_blocks(it->second, kg)) {
            merge_assertions(t.step_assertions[d], a);
            t.candidates.insert(d);
        }
    if (auto it = s.find(section::kExclusionCheck); it != s.end()) {
        if (auto active = parse_active_exclusions(it->second, kg))
            t.claimed_exclusions.insert(active->begin(), active->end());
        for (const auto& [d, a] : parse_assertion_blocks(it->second, kg))
            merge_assertions(t.step_assertions[d], a);
    }
    return t;
}

namespace {

struct AssertionCheck {
    bool wrong = false;
    bool missing = false;
    bool false_claim_of_met = false;  // asserted met where the rules say unmet
};

void check_assertions(const StepAssertions* a, const RuleOutcome& oracle, AssertionCheck& out)
{
    auto grade = [&](const std::optional<bool>& asserted, bool actual, bool required) {
        if (!asserted) {
            out.missing = out.missing || required;
            return;
        }
        if (*asserted != actual) {
            out.wrong = true;
            if (*asserted && !actual)
                out.false_claim_of_met = true;
        }
    };
    StepAssertions none;
    const StepAssertions& s = a ? *a : none;
    grade(s.count_met, oracle.count_met, true);
    grade(s.core_met, oracle.core_met, true);
    grade(s.exclusions_clear, oracle.exclusions_clear, true);
    grade(s.duration_met, oracle.duration_met, false);
}

}  // namespace

int logic_consistency_score(const LogicTrace& trace, const CriteriaMap& criteria, const KnowledgeGraph& kg)
{
    auto evaluate = [&](const EntityId& d) {
        auto it = criteria.find(d);
        if (it == criteria.end())
            throw UnknownDisorder(d);
        return evaluate_rules(it->second, trace.claimed_symptoms, trace.claimed_exclusions,
                              trace.claimed_duration_days);
    };
    auto assertions_for = [&](const EntityId& d) -> const StepAssertions* {
        auto it = trace.step_assertions.find(d);
        return it == trace.step_assertions.end() ? nullptr : &it->second;
    };

    AssertionCheck check;
    bool conclusion_correct = false;
    if (trace.conclusion == kNoDiagnosis) {
        conclusion_correct = true;
        for (const auto& [d, c] : criteria)
            if (evaluate(d).indicated)
                conclusion_correct = false;
        for (const auto& d : trace.candidates)
            if (criteria.count(d))
                check_assertions(assertions_for(d), evaluate(d), check);
    } else {
        if (!kg.contains(trace.conclusion))
            throw UnknownDisorder(trace.conclusion);
        RuleOutcome oracle = evaluate(trace.conclusion);
        conclusion_correct = oracle.indicated;
        check_assertions(assertions_for(trace.conclusion), oracle, check);
    }

    if (conclusion_correct)
        return check.wrong || check.missing ? 2 : 3;
    if (trace.conclusion != kNoDiagnosis && check.false_claim_of_met)
        return 0;
    return 1;
}

double diagnosis_confidence_score(double kas, int lcs, double lambda)
{
    if (!(kas >= 0.0 && kas <= 1.0))
        throw DomainError("kas must lie in [0, 1]");
    if (lcs < 0 || lcs > 3)
        throw DomainError("lcs must be one of 0, 1, 2, 3");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda must lie in [0, 1]");
    return lambda * kas + (1.0 - lambda) * (static_cast<double>(lcs) / 3.0);
}

json to_json(const ConfidenceReport& r)
{
    json claims = json::array();
    for (const auto& c : r.claims)
        claims.push_back(json{{"id", c.claim_id},
                              {"text", c.text},
                              {"label", std::string(to_string(c.label))},
                              {"sim", c.sim},
                              {"epr", c.epr},
                              {"tms", c.tms},
                              {"weight", c.weight}});
    return json{{"dialogue_id", r.dialogue_id},
                {"diagnosis", r.diagnosis},
                {"kas", r.kas},
                {"lcs", r.lcs},
                {"dcs", r.dcs},
                {"claims", claims},
                {"seed_entities", r.seed_entities},
                {"evidence_triplets", r.evidence_triplets},
                {"config", json{{"alpha", r.alpha}, {"lambda", r.lambda}, {"kas_mean_normalized", r.kas_mean_normalized}}}};
}

ConfidenceReport report_from_json(const json& rec, std::size_t line)
{
    ConfidenceReport r;
    try {
        r.dialogue_id = rec.at("dialogue_id").get<std::string>();
        r.diagnosis = rec.at("diagnosis").get<std::string>();
        r.kas = rec.at("kas").get<double>();
        r.lcs = rec.at("lcs").get<int>();
        r.dcs = rec.at("dcs").get<double>();
        for (const auto& c : rec.at("claims")) {
            ClaimScore s;
            s.claim_id = c.value("id", 0);
            s.text = c.value("text", std::string());
            auto label = parse_attribution_label(c.at("label").get<std::string>());
            if (!label)
                throw SchemaError(line, "claims.label", "unknown attribution label");
            s.label = *label;
            s.sim = c.at("sim").get<double>();
            s.epr = c.at("epr").get<double>();
            s.tms = c.value("tms", 0.0);
            s.weight = c.value("weight", 0.0);
            r.claims.push_back(std::move(s));
        }
        r.seed_entities = rec.value("seed_entities", std::set<std::string>{});
        r.evidence_triplets = rec.value("evidence_triplets", std::vector<std::string>{});
        const json& cfg = rec.at("config");
        r.alpha = cfg.at("alpha").get<double>();
        r.lambda = cfg.at("lambda").get<double>();
        r.kas_mean_normalized = cfg.value("kas_mean_normalized", false);
    } catch (const json::exception& e) {
        throw SchemaError(line, "<record>", e.what());
    }
    return r;
}

std::vector<ConfidenceReport> load_reports(const std::filesystem::path& path)
{
    auto records = read_jsonl_file(path, [](std::size_t line, const std::string& msg) {
        throw SchemaError(line, "<record>", msg);
    });
    std::vector<ConfidenceReport> out;
    for (const auto& [line, rec] : records)
        out.push_back(report_from_json(rec, line));
    return out;
}

namespace {

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (Error& e) {
        if (e.stage().empty())
            e.set_stage(stage);
        throw;
    }
}

}  // namespace

ConfidenceReport score_reasoning(const DiagnosticHypothesis& hypothesis, const KnowledgeGraph& kg,
                                 const CriteriaMap& criteria, const ScoringConfig& config,
                                 const ScoringProviders& providers)
{
    staged("config", [&] { config.validate(); });
    if (!providers.embedder)
        throw DomainError("scoring needs an embedder");
    const Embedder& embedder = *providers.embedder;
    ClaimPrompting prompting{providers.chat, providers.templates, config.model, config.seed};

    ConfidenceReport r;
    r.dialogue_id = hypothesis.dialogue_id;
    r.diagnosis = hypothesis.final_diagnosis;
    r.alpha = config.alpha;
    r.lambda = config.lambda;
    r.kas_mean_normalized = config.kas_mean_normalized;

    const std::string& text = hypothesis.reasoning_text;
    r.seed_entities = staged("extract_entities", [&] { return extract_entities(text, kg); });
    RetrievedEvidence evidence =
        staged("walk_retrieve", [&] { return walk_retrieve(kg, r.seed_entities, config.retrieval_budget, embedder); });
    for (const auto& st : evidence.triplets)
        r.evidence_triplets.push_back(triplet_key(st.triplet));

    std::vector<Claim> claims = staged("decompose_claims", [&] { return decompose_claims(text, kg, prompting); });
    std::vector<double> weights;
    for (const auto& claim : claims) {
        AttributionLabel label =
            staged("classify_attribution", [&] { return classify_attribution(claim, evidence, kg, prompting); });
        ClaimScore s = staged("score_claim",
                              [&] { return score_claim(claim, label, evidence, kg, embedder, config.alpha); });
        weights.push_back(s.weight);
        r.claims.push_back(std::move(s));
    }
    r.kas = kas_aggregate(weights, config.kas_mean_normalized);

    LogicTrace trace = staged("parse_logic_trace", [&] { return parse_logic_trace(hypothesis, kg); });
    r.lcs = staged("logic_consistency_score", [&] { return logic_consistency_score(trace, criteria, kg); });
    r.dcs = staged("diagnosis_confidence_score",
                   [&] { return diagnosis_confidence_score(r.kas, r.lcs, config.lambda); });
    return r;
}

}  // namespace dxtrust
