#include "dxtrust/egdr.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>

namespace dxtrust {

std::string_view to_string(PromptingMode mode)
{
    switch (mode) {
    case PromptingMode::EGDR: return "egdr";
    case PromptingMode::Direct: return "direct";
    case PromptingMode::CoT: return "cot";
    }
    return "egdr";
}

std::optional<PromptingMode> parse_prompting_mode(std::string_view text)
{
    std::string t = to_lower_ascii(text);
    if (t == "egdr")
        return PromptingMode::EGDR;
    if (t == "direct")
        return PromptingMode::Direct;
    if (t == "cot")
        return PromptingMode::CoT;
    return std::nullopt;
}

std::set<EntityId> DiagnosticHypothesis::symptom_ids() const
{
    std::set<EntityId> out;
    for (const auto& s : extracted_symptoms)
        out.insert(s.id);
    return out;
}

// --- serialization ----------------------------------------------------------

namespace {

json assertions_json(const StepAssertions& a)
{
    json j = json::object();
    auto put = [&j](const char* key, const std::optional<bool>& v) {
        if (v)
            j[key] = *v;
    };
    put("count_met", a.count_met);
    put("core_met", a.core_met);
    put("duration_met", a.duration_met);
    put("exclusions_clear", a.exclusions_clear);
    return j;
}

StepAssertions assertions_from_json(const json& j)
{
    StepAssertions a;
    auto get = [&j](const char* key) -> std::optional<bool> {
        auto it = j.find(key);
        if (it == j.end() || !it->is_boolean())
            return std::nullopt;
        return it->get<bool>();
    };
    a.count_met = get("count_met");
    a.core_met = get("core_met");
    a.duration_met = get("duration_met");
    a.exclusions_clear = get("exclusions_clear");
    return a;
}

}  // namespace

json to_json(const DiagnosticHypothesis& h)
{
    json symptoms = json::array();
    for (const auto& s : h.extracted_symptoms)
        symptoms.push_back(json{{"id", s.id}, {"turns", s.turns}});
    json candidates = json::array();
    for (const auto& c : h.candidates)
        candidates.push_back(json{{"disorder", c.disorder}, {"score", c.score}});
    json criteria = json::array();
    for (const auto& c : h.criteria_analysis)
        criteria.push_back(json{{"disorder", c.disorder}, {"text", c.text}, {"assertions", assertions_json(c.assertions)}});
    json clear = json::object();
    for (const auto& [d, v] : h.exclusion_analysis.exclusions_clear)
        clear[d] = v;
    json rec{{"dialogue_id", h.dialogue_id},
             {"prompting_mode", std::string(to_string(h.prompting_mode))},
             {"extracted_symptoms", symptoms},
             {"duration_days", h.duration_days ? json(*h.duration_days) : json(nullptr)},
             {"candidates", candidates},
             {"criteria_analysis", criteria},
             {"exclusion_analysis",
              json{{"text", h.exclusion_analysis.text},
                   {"asserted_exclusions", h.exclusion_analysis.asserted_exclusions},
                   {"exclusions_clear", clear}}},
             {"final_diagnosis", h.final_diagnosis},
             {"reasoning_text", h.reasoning_text},
             {"template_version", h.template_version}};
    return rec;
}

DiagnosticHypothesis hypothesis_from_json(const json& rec, std::size_t line)
{
    DiagnosticHypothesis h;
    auto str = [&](const char* field) -> std::string {
        auto it = rec.find(field);
        if (it == rec.end() || !it->is_string())
            throw SchemaError(line, field, "missing or not a string");
        return it->get<std::string>();
    };
    h.dialogue_id = str("dialogue_id");
    auto mode = parse_prompting_mode(str("prompting_mode"));
    if (!mode)
        throw SchemaError(line, "prompting_mode", "unknown mode");
    h.prompting_mode = *mode;
    h.final_diagnosis = str("final_diagnosis");
    h.reasoning_text = str("reasoning_text");
    if (auto it = rec.find("template_version"); it != rec.end() && it->is_string())
        h.template_version = it->get<std::string>();
    try {
        for (const auto& s : rec.value("extracted_symptoms", json::array()))
            h.extracted_symptoms.push_back({s.at("id").get<std::string>(), s.value("turns", std::vector<int>{})});
        if (auto it = rec.find("duration_days"); it != rec.end() && it->is_number_integer())
            h.duration_days = it->get<int>();
        for (const auto& c : rec.value("candidates", json::array()))
            h.candidates.push_back({c.at("disorder").get<std::string>(), c.at("score").get<double>()});
        for (const auto& c : rec.value("criteria_analysis", json::array()))
            h.criteria_analysis.push_back({c.at("disorder").get<std::string>(), c.value("text", std::string()),
                                           assertions_from_json(c.value("assertions", json::object()))});
        if (auto it = rec.find("exclusion_analysis"); it != rec.end() && it->is_object()) {
            h.exclusion_analysis.text = it->value("text", std::string());
            h.exclusion_analysis.asserted_exclusions =
                it->value("asserted_exclusions", std::vector<std::string>{});
            const json clear = it->value("exclusions_clear", json::object());
            for (const auto& [d, v] : clear.items())
                h.exclusion_analysis.exclusions_clear[d] = v.get<bool>();
        }
    } catch (const json::exception& e) {
        throw SchemaError(line, "<record>", e.what());
    }
    return h;
}

std::vector<DiagnosticHypothesis> load_hypotheses(const std::filesystem::path& path)
{
    auto records = read_jsonl_file(path, [](std::size_t line, const std::string& msg) {
        throw SchemaError(line, "<record>", msg);
    });
    std::vector<DiagnosticHypothesis> out;
    for (const auto& [line, rec] : records)
        out.push_back(hypothesis_from_json(rec, line));
    return out;
}

// --- prompt construction ----------------------------------------------------

std::string describe_criteria(const DisorderCriteria& c, const KnowledgeGraph& kg)
{
    std::string out = "at least " + std::to_string(c.min_symptom_count) + " of the listed symptoms";
    if (!c.core_symptoms.empty()) {
        out += ", including at least " + std::to_string(c.min_core_count) + " of: ";
        bool first = true;
        for (const auto& s : c.core_symptoms) {
            if (!first)
                out += ", ";
            out += kg.at(s).canonical_name;
            first = false;
        }
    }
    if (c.required_duration_days)
        out += "; lasting at least " + std::to_string(*c.required_duration_days) + " days";
    if (!c.exclusions.empty()) {
        out += "; not diagnosed when any of: ";
        bool first = true;
        for (const auto& x : c.exclusions) {
            if (!first)
                out += ", ";
            out += kg.at(x).canonical_name;
            first = false;
        }
    }
    return out;
}

std::string kg_symptom_excerpt(const KnowledgeGraph& kg, const std::set<EntityId>& symptoms)
{
    std::string out;
    for (const auto& t : kg.triplets())
        if (t.relation == Relation::HasSymptom && symptoms.count(t.object))
            out += "- " + kg.verbalize(t) + "\n";
    return out.empty() ? "(none)\n" : out;
}

std::string kg_criteria_excerpt(const KnowledgeGraph& kg, const CriteriaMap& criteria,
                                const std::vector<EntityId>& disorders)
{
    std::string out;
    for (const auto& d : disorders) {
        out += kg.at(d).canonical_name + ":\n";
        if (auto it = criteria.find(d); it != criteria.end())
            out += "  rule: " + describe_criteria(it->second, kg) + "\n";
        for (Relation r : {Relation::HasSymptom, Relation::HasCriterion})
            for (const auto& t : neighbors(kg, d, r))
                out += "  - " + kg.verbalize(t) + "\n";
    }
    return out.empty() ? "(none)\n" : out;
}

std::string kg_exclusion_excerpt(const KnowledgeGraph& kg, const std::vector<EntityId>& disorders)
{
    std::string out;
    for (const auto& d : disorders)
        for (const auto& t : neighbors(kg, d, Relation::HasExclusion))
            out += "- " + kg.verbalize(t) + "\n";
    return out.empty() ? "(none)\n" : out;
}

namespace {

std::string render_symptoms(const KnowledgeGraph& kg, const std::vector<SymptomLine>& symptoms)
{
    if (symptoms.empty())
        return "- none\n";
    std::string out;
    for (const auto& s : symptoms)
        out += render_symptom_line(kg, s) + "\n";
    return out;
}

std::string render_candidates(const KnowledgeGraph& kg, const CandidateDisorders& candidates)
{
    if (candidates.empty())
        return "- none\n";
    std::string out;
    for (const auto& c : candidates)
        out += "- " + kg.at(c.disorder).canonical_name + " (overlap " + format_fixed(c.score, 3) + ")\n";
    return out;
}

std::vector<EntityId> candidate_ids(const CandidateDisorders& c)
{
    std::vector<EntityId> out;
    for (const auto& x : c)
        out.push_back(x.disorder);
    return out;
}

std::set<EntityId> symptom_set(const std::vector<SymptomLine>& symptoms)
{
    std::set<EntityId> out;
    for (const auto& s : symptoms)
        out.insert(s.id);
    return out;
}

std::vector<std::string> stage_sections(int stage)
{
    switch (stage) {
    case 1: return {section::kSymptoms};
    case 2: return {section::kCandidates};
    case 3: return {section::kCriteriaCheck};
    case 4: return {section::kExclusionCheck};
    case 5: return {section::kFinalDiagnosis, section::kReasoning};
    }
    throw DomainError("EGDR has stages 1..5");
}

}  // namespace

PromptBundle build_stage_prompt(int stage, const Dialogue& dialogue, const StageArtifacts& a,
                                const KnowledgeGraph& kg, const CriteriaMap& criteria, const TemplateSet& templates)
{
    std::map<std::string, std::string> vars{{"dialogue", render_dialogue(dialogue)}};
    switch (stage) {
    case 1:
        break;
    case 2:
        vars["symptoms"] = render_symptoms(kg, a.symptoms);
        vars["kg_excerpt"] = kg_symptom_excerpt(kg, symptom_set(a.symptoms));
        vars["ranking"] = render_candidates(kg, a.ranking);
        break;
    case 3:
        vars["symptoms"] = render_symptoms(kg, a.symptoms);
        vars["duration"] = render_duration(a.duration_days);
        vars["candidates"] = render_candidates(kg, a.candidates);
        vars["kg_excerpt"] = kg_criteria_excerpt(kg, criteria, candidate_ids(a.candidates));
        break;
    case 4:
        vars["candidates"] = render_candidates(kg, a.candidates);
        vars["criteria_analysis"] = a.criteria_body;
        vars["kg_excerpt"] = kg_exclusion_excerpt(kg, candidate_ids(a.candidates));
        break;
    case 5:
        vars["symptoms"] = render_symptoms(kg, a.symptoms);
        vars["duration"] = render_duration(a.duration_days);
        vars["candidates"] = render_candidates(kg, a.candidates);
        vars["criteria_analysis"] = a.criteria_body;
        vars["exclusion_analysis"] = a.exclusion_body;
        break;
    default:
        throw DomainError("EGDR has stages 1..5");
    }
    PromptBundle b;
    b.stage = stage;
    std::string prefix = "stage" + std::to_string(stage);
    b.system_text = templates.render(prefix + "_system", vars);
    b.user_text = templates.render(prefix + "_user", vars);
    b.expected_sections = stage_sections(stage);
    return b;
}

PromptBundle build_baseline_prompt(PromptingMode mode, const Dialogue& dialogue, const KnowledgeGraph& kg,
                                   const CriteriaMap& criteria, const TemplateSet& templates)
{
    if (mode == PromptingMode::EGDR)
        throw DomainError("EGDR is not a baseline mode");
    std::vector<EntityId> all;
    for (const auto& [d, c] : criteria)
        all.push_back(d);
    std::map<std::string, std::string> vars{
        {"dialogue", render_dialogue(dialogue)},
        {"criteria_text", kg_criteria_excerpt(kg, criteria, all) + kg_exclusion_excerpt(kg, all)}};
    PromptBundle b;
    b.stage = 1;
    std::string prefix(to_string(mode));
    b.system_text = templates.render(prefix + "_system", vars);
    b.user_text = templates.render(prefix + "_user", vars);
    if (mode == PromptingMode::CoT)
        b.expected_sections = {section::kStepwise, section::kSymptoms, section::kFinalDiagnosis, section::kReasoning};
    else
        b.expected_sections = {section::kSymptoms, section::kFinalDiagnosis, section::kReasoning};
    return b;
}

// --- stage execution --------------------------------------------------------

namespace {

/// Parser complaint that triggers the repair retry.
struct Complaint {
    std::string message;
};

template <typename Parse>
auto call_stage(const PromptBundle& bundle, const EgdrContext& ctx, Parse parse)
{
    ChatRequest req;
    req.system_text = bundle.system_text;
    req.messages.push_back({"user", bundle.user_text});
    req.model = ctx.config.model;
    req.seed = ctx.config.seed;
    req.max_tokens = ctx.config.max_tokens;

    auto attempt = [&](const std::string& response, std::string& complaint) -> std::optional<decltype(parse(response))> {
        try {
            SectionMap sections = parse_structured_output(response, bundle.expected_sections);
            (void)sections;
            return parse(response);
        } catch (const MissingSection& e) {
            complaint = e.what();
        } catch (const Complaint& c) {
            complaint = c.message;
        }
        return std::nullopt;
    };

    std::string response = ctx.provider.complete(req);
    std::string complaint;
    if (auto ok = attempt(response, complaint))
        return std::move(*ok);

    std::string labels;
    for (const auto& l : bundle.expected_sections)
        labels += (labels.empty() ? "" : ", ") + l;
    req.messages.push_back({"assistant", response});
    req.messages.push_back(
        {"user", ctx.templates.render("repair", {{"complaint", complaint}, {"sections", labels}})});
    std::string repaired = ctx.provider.complete(req);
    if (auto ok = attempt(repaired, complaint))
        return std::move(*ok);
    throw StageParseFailure(bundle.stage, complaint);
}

std::string join_names(const KnowledgeGraph& kg, const std::vector<EntityId>& ids)
{
    std::string out;
    for (const auto& id : ids)
        out += (out.empty() ? "" : ", ") + kg.at(id).canonical_name;
    return out;
}

struct Stage1Result {
    std::vector<SymptomLine> symptoms;
    std::optional<int> duration;
};

Stage1Result parse_symptom_stage(const std::string& response, const KnowledgeGraph& kg)
{
    SectionMap s = scan_sections(response);
    Stage1Result r;
    r.symptoms = parse_symptom_lines(s[section::kSymptoms], kg);
    if (auto it = s.find(section::kDuration); it != s.end())
        r.duration = parse_duration_days(it->second);
    return r;
}

std::string compose_reasoning(const KnowledgeGraph& kg, const StageArtifacts& a, const std::string& final_label,
                              const std::string& reasoning)
{
    std::string out;
    out += std::string(section::kSymptoms) + ":\n" + render_symptoms(kg, a.symptoms);
    out += std::string(section::kDuration) + ": " + render_duration(a.duration_days) + "\n";
    out += std::string(section::kCandidates) + ":\n" + render_candidates(kg, a.candidates);
    if (!a.criteria_body.empty())
        out += std::string(section::kCriteriaCheck) + ":\n" + a.criteria_body + "\n";
    if (!a.exclusion_body.empty())
        out += std::string(section::kExclusionCheck) + ":\n" + a.exclusion_body + "\n";
    out += std::string(section::kFinalDiagnosis) + ": " + render_diagnosis(kg, final_label) + "\n";
    out += std::string(section::kReasoning) + ":\n" + reasoning + "\n";
    return out;
}

}  // namespace

DiagnosticHypothesis run_egdr(const Dialogue& dialogue, const EgdrContext& ctx)
{
    const KnowledgeGraph& kg = ctx.kg;
    StageArtifacts a;
    DiagnosticHypothesis h;
    h.dialogue_id = dialogue.id;
    h.prompting_mode = PromptingMode::EGDR;
    h.template_version = ctx.templates.version();

    // 1: symptom extraction
    {
        auto bundle = build_stage_prompt(1, dialogue, a, kg, ctx.criteria, ctx.templates);
        auto r = call_stage(bundle, ctx, [&](const std::string& resp) { return parse_symptom_stage(resp, kg); });
        a.symptoms = std::move(r.symptoms);
        a.duration_days = r.duration;
        a.ranking = rank_candidate_disorders(kg, symptom_set(a.symptoms), 3);
    }

    auto finish = [&](const std::string& final_label, const std::string& reasoning) {
        h.extracted_symptoms = a.symptoms;
        h.duration_days = a.duration_days;
        h.candidates = a.candidates;
        auto texts = assertion_block_texts(a.criteria_body, kg);
        for (const auto& c : a.candidates) {
            CriteriaAnalysis ca;
            ca.disorder = c.disorder;
            ca.text = texts.count(c.disorder) ? texts[c.disorder] : "";
            if (auto it = a.criteria_assertions.find(c.disorder); it != a.criteria_assertions.end())
                ca.assertions = it->second;
            if (auto it = a.exclusions_clear.find(c.disorder); it != a.exclusions_clear.end())
                ca.assertions.exclusions_clear = it->second;
            h.criteria_analysis.push_back(std::move(ca));
        }
        h.exclusion_analysis.text = a.exclusion_body;
        h.exclusion_analysis.asserted_exclusions = a.active_exclusions;
        h.exclusion_analysis.exclusions_clear = a.exclusions_clear;
        h.final_diagnosis = final_label;
        h.reasoning_text = compose_reasoning(kg, a, final_label, reasoning);
        return h;
    };

    if (a.ranking.empty())
        return finish(kNoDiagnosis, "No symptoms matching the knowledge graph were identified, so no diagnosis is "
                                    "indicated.");

    // 2: top-3 candidate matching
    {
        auto bundle = build_stage_prompt(2, dialogue, a, kg, ctx.criteria, ctx.templates);
        a.candidates = call_stage(bundle, ctx, [&](const std::string& resp) {
            std::vector<std::string> unresolved;
            auto listed = parse_disorder_list(scan_sections(resp)[section::kCandidates], kg, &unresolved);
            if (!unresolved.empty())
                throw Complaint{"unknown disorder '" + unresolved.front() + "' in CANDIDATES"};
            CandidateDisorders chosen;
            for (const auto& id : listed) {
                auto it = std::find_if(a.ranking.begin(), a.ranking.end(),
                                       [&](const CandidateDisorder& c) { return c.disorder == id; });
                if (it == a.ranking.end())
                    throw Complaint{kg.at(id).canonical_name + " is not among the matched candidate disorders"};
            }
            for (const auto& c : a.ranking)
                if (std::find(listed.begin(), listed.end(), c.disorder) != listed.end())
                    chosen.push_back(c);
            return chosen;
        });
    }
    if (a.candidates.empty())
        return finish(kNoDiagnosis, "None of the matched disorders was retained as a candidate, so no diagnosis "
                                    "is indicated.");

    const auto ids = candidate_ids(a.candidates);

    // 3: criteria evaluation per candidate
    {
        auto bundle = build_stage_prompt(3, dialogue, a, kg, ctx.criteria, ctx.templates);
        auto [body, assertions] = call_stage(bundle, ctx, [&](const std::string& resp) {
            std::string b = scan_sections(resp)[section::kCriteriaCheck];
            auto blocks = parse_assertion_blocks(b, kg);
            for (const auto& id : ids)
                if (!blocks.count(id))
                    throw Complaint{"CRITERIA CHECK has no [" + kg.at(id).canonical_name + "] block"};
            return std::make_pair(b, blocks);
        });
        a.criteria_body = body;
        a.criteria_assertions = assertions;
    }

    // 4: exclusion check
    {
        auto bundle = build_stage_prompt(4, dialogue, a, kg, ctx.criteria, ctx.templates);
        struct Stage4 {
            std::string body;
            std::vector<EntityId> active;
            std::map<EntityId, bool> clear;
        };
        Stage4 r = call_stage(bundle, ctx, [&](const std::string& resp) {
            Stage4 out;
            out.body = scan_sections(resp)[section::kExclusionCheck];
            std::vector<std::string> unresolved;
            auto active = parse_active_exclusions(out.body, kg, &unresolved);
            if (!active)
                throw Complaint{"EXCLUSION CHECK lacks an 'Active exclusions:' line"};
            if (!unresolved.empty())
                throw Complaint{"unknown exclusion '" + unresolved.front() + "'"};
            out.active = *active;
            auto blocks = parse_assertion_blocks(out.body, kg);
            for (const auto& id : ids) {
                auto it = blocks.find(id);
                if (it == blocks.end() || !it->second.exclusions_clear)
                    throw Complaint{"EXCLUSION CHECK has no 'Exclusions clear' answer for " +
                                    kg.at(id).canonical_name};
                out.clear[id] = *it->second.exclusions_clear;
            }
            return out;
        });
        a.exclusion_body = r.body;
        a.active_exclusions = r.active;
        a.exclusions_clear = r.clear;
    }

    // 5: final diagnosis with reasoning
    auto bundle = build_stage_prompt(5, dialogue, a, kg, ctx.criteria, ctx.templates);
    auto [final_label, reasoning] = call_stage(bundle, ctx, [&](const std::string& resp) {
        SectionMap s = scan_sections(resp);
        auto label = parse_final_diagnosis(s[section::kFinalDiagnosis], kg);
        if (!label)
            throw Complaint{"FINAL DIAGNOSIS does not name a known disorder or 'No diagnosis'"};
        if (*label != kNoDiagnosis && std::find(ids.begin(), ids.end(), *label) == ids.end())
            throw Complaint{"final diagnosis must be one of the candidates (" + join_names(kg, ids) +
                            ") or 'No diagnosis'"};
        std::string reasoning = s[section::kReasoning];
        if (trim(reasoning).empty())
            throw Complaint{"REASONING is empty"};
        return std::make_pair(*label, reasoning);
    });
    return finish(final_label, reasoning);
}

DiagnosticHypothesis run_baseline(const Dialogue& dialogue, const EgdrContext& ctx, PromptingMode mode)
{
    const KnowledgeGraph& kg = ctx.kg;
    PromptBundle bundle = build_baseline_prompt(mode, dialogue, kg, ctx.criteria, ctx.templates);
    auto [response, label] = call_stage(bundle, ctx, [&](const std::string& resp) {
        SectionMap s = scan_sections(resp);
        auto label = parse_final_diagnosis(s[section::kFinalDiagnosis], kg);
        if (!label)
            throw Complaint{"FINAL DIAGNOSIS does not name a known disorder or 'No diagnosis'"};
        return std::make_pair(resp, *label);
    });

    SectionMap s = scan_sections(response);
    DiagnosticHypothesis h;
    h.dialogue_id = dialogue.id;
    h.prompting_mode = mode;
    h.template_version = ctx.templates.version();
    h.extracted_symptoms = parse_symptom_lines(s[section::kSymptoms], kg);
    if (auto it = s.find(section::kDuration); it != s.end())
        h.duration_days = parse_duration_days(it->second);
    h.candidates = rank_candidate_disorders(kg, h.symptom_ids(), 3);
    if (auto it = s.find(section::kCriteriaCheck); it != s.end()) {
        auto texts = assertion_block_texts(it->second, kg);
        for (const auto& [d, asr] : parse_assertion_blocks(it->second, kg))
            h.criteria_analysis.push_back({d, texts[d], asr});
    }
    if (auto it = s.find(section::kExclusionCheck); it != s.end()) {
        h.exclusion_analysis.text = it->second;
        if (auto active = parse_active_exclusions(it->second, kg))
            h.exclusion_analysis.asserted_exclusions = *active;
    }
    h.final_diagnosis = label;
    h.reasoning_text = trim(response);
    return h;
}

}  // namespace dxtrust
