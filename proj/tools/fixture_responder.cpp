#include "fixture_responder.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/retrieval.hpp"
#include "dxtrust/sections.hpp"
#include "dxtrust/text.hpp"

#include <cmath>
#include <limits>
#include <regex>

namespace dxtrust::fixtures {

GoldView gold_view(const Dialogue& d, const KnowledgeGraph& kg, const CriteriaMap& criteria)
{
    if (!d.gold)
        throw SchemaError(0, "gold", "dialogue " + d.id + " has no gold annotation");
    GoldView g;
    g.symptoms = resolve_surface_forms(kg, d.gold->symptoms, EntityKind::Symptom);
    g.exclusions = resolve_surface_forms(kg, d.gold->exclusions, EntityKind::Exclusion);
    g.duration_days = d.gold->duration_days;
    g.label = silver_label(criteria, kg, g.symptoms, g.exclusions, g.duration_days);
    return g;
}

int stage_of(const ChatRequest& request)
{
    static const std::regex re(R"(stage ([1-5]) of 5)");
    std::smatch m;
    if (std::regex_search(request.system_text, m, re))
        return m[1].str()[0] - '0';
    return 0;
}

std::vector<SymptomLine> cite_symptoms(const Dialogue& d, const std::set<EntityId>& symptoms,
                                       const KnowledgeGraph& kg)
{
    std::vector<SymptomLine> out;
    for (const auto& s : symptoms) {
        SymptomLine line{s, {}};
        for (const auto& u : d.turns)
            if (u.role == Role::Patient && extract_entities(u.text, kg).count(s))
                line.turns.push_back(u.turn_index);
        out.push_back(std::move(line));
    }
    return out;
}

CandidateDisorders OracleResponder::candidates(const GoldView& g) const
{
    return rank_candidate_disorders(kg_, g.symptoms, 3);
}

std::vector<std::string> OracleResponder::grounded_reasoning(const GoldView& g) const
{
    std::vector<std::string> lines;
    auto cite = [&](const EntityId& d, Relation rel, const std::set<EntityId>& present) {
        for (const auto& t : neighbors(kg_, d, rel))
            if (present.count(t.object))
                lines.push_back(kg_.verbalize(t) + ".");
    };
    if (g.label != kNoDiagnosis) {
        cite(g.label, Relation::HasSymptom, g.symptoms);
        const auto& c = criteria_.at(g.label);
        lines.push_back("The required symptom count of " + std::to_string(c.min_symptom_count) +
                        " is reached and a core symptom is present.");
        if (c.required_duration_days && g.duration_days)
            lines.push_back("The reported duration of " + std::to_string(*g.duration_days) +
                            " days satisfies the duration requirement.");
        return lines;
    }
    for (const auto& cand : candidates(g)) {
        cite(cand.disorder, Relation::HasSymptom, g.symptoms);
        cite(cand.disorder, Relation::HasExclusion, g.exclusions);
    }
    lines.push_back("No candidate satisfies every rule, so the presentation stays below the diagnostic threshold.");
    return lines;
}

std::string OracleResponder::stage_response(const Dialogue& d, int stage) const
{
    GoldView g = gold_view(d, kg_, criteria_);
    CandidateDisorders cands = candidates(g);
    std::string out;
    switch (stage) {
    case 1: {
        out = "SYMPTOMS:\n";
        auto lines = cite_symptoms(d, g.symptoms, kg_);
        if (lines.empty())
            out += "- none\n";
        for (const auto& l : lines)
            out += render_symptom_line(kg_, l) + "\n";
        out += "DURATION: " + render_duration(g.duration_days) + "\n";
        return out;
    }
    case 2:
        out = "CANDIDATES:\n";
        for (const auto& c : cands)
            out += "- " + kg_.at(c.disorder).canonical_name + "\n";
        return out;
    case 3:
        out = "CRITERIA CHECK:\n";
        for (const auto& c : cands) {
            RuleOutcome r = evaluate_rules(criteria_.at(c.disorder), g.symptoms, g.exclusions, g.duration_days);
            out += "[" + kg_.at(c.disorder).canonical_name + "]\n";
            out += "Symptom count met: " + render_yes_no(r.count_met) + "\n";
            out += "Core symptom present: " + render_yes_no(r.core_met) + "\n";
            out += "Duration met: " + render_yes_no(r.duration_met) + "\n";
        }
        return out;
    case 4: {
        out = "EXCLUSION CHECK:\nActive exclusions: ";
        std::string names;
        for (const auto& x : g.exclusions)
            names += (names.empty() ? "" : ", ") + kg_.at(x).canonical_name;
        out += (names.empty() ? "none" : names) + "\n";
        for (const auto& c : cands) {
            RuleOutcome r = evaluate_rules(criteria_.at(c.disorder), g.symptoms, g.exclusions, g.duration_days);
            out += "[" + kg_.at(c.disorder).canonical_name + "]\n";
            out += "Exclusions clear: " + render_yes_no(r.exclusions_clear) + "\n";
        }
        return out;
    }
    case 5:
        out = "FINAL DIAGNOSIS: " + render_diagnosis(kg_, g.label) + "\nREASONING:\n";
        for (const auto& l : grounded_reasoning(g))
            out += l + "\n";
        return out;
    }
    throw DomainError("oracle responder got a request without a stage marker");
}

std::string OracleResponder::baseline_response(const Dialogue& d, PromptingMode mode) const
{
    GoldView g = gold_view(d, kg_, criteria_);
    auto lines = cite_symptoms(d, g.symptoms, kg_);
    std::string symptoms = "SYMPTOMS:\n";
    if (lines.empty())
        symptoms += "- none\n";
    for (const auto& l : lines)
        symptoms += render_symptom_line(kg_, l) + "\n";

    std::string out;
    if (mode == PromptingMode::CoT) {
        out += "STEPWISE REASONING:\n";
        out += "1. List the symptoms the patient describes.\n";
        out += "2. Compare them with each disorder's symptom count and core symptoms.\n";
        out += "3. Check duration and exclusionary conditions.\n";
        out += "4. Select the disorder whose rule is fully met, if any.\n";
    }
    out += symptoms;

    const bool overcall = flawed_ && g.label == kNoDiagnosis && !g.symptoms.empty();
    if (overcall) {
        out += "FINAL DIAGNOSIS: Major Depressive Disorder\nREASONING:\n";
        out += "The patient shows no depressed mood, yet the picture still fits Major Depressive Disorder.\n";
        out += "There is no anhedonia and never any loss of interest.\n";
        out += "The patient denies worthlessness but seems low.\n";
        out += "No suicidal ideation is reported, which does not rule out Major Depressive Disorder.\n";
        out += "The patient does not describe hopelessness or tearfulness.\n";
        return out;
    }
    out += "FINAL DIAGNOSIS: " + render_diagnosis(kg_, g.label) + "\nREASONING:\n";
    if (g.symptoms.empty()) {
        out += "The patient reports no symptoms of a depressive or anxiety disorder.\n";
        return out;
    }
    for (const auto& l : grounded_reasoning(g))
        out += l + "\n";
    return out;
}

std::string OracleResponder::respond(const Dialogue& d, PromptingMode mode, const ChatRequest& request) const
{
    if (mode == PromptingMode::EGDR)
        return stage_response(d, stage_of(request));
    return baseline_response(d, mode);
}

std::map<std::string, std::string> generate_script(const std::vector<Dialogue>& corpus, PromptingMode mode,
                                                   const KnowledgeGraph& kg, const CriteriaMap& criteria,
                                                   const TemplateSet& templates, const EgdrConfig& config,
                                                   bool flawed_baseline)
{
    OracleResponder oracle(kg, criteria, flawed_baseline);
    const Dialogue* current = nullptr;
    RecordingChatProvider recorder(
        [&](const ChatRequest& r) { return oracle.respond(*current, mode, r); }, "oracle");
    EgdrContext ctx{kg, criteria, templates, recorder, config};
    for (const auto& d : corpus) {
        current = &d;
        if (mode == PromptingMode::EGDR)
            run_egdr(d, ctx);
        else
            run_baseline(d, ctx, mode);
    }
    return recorder.script();
}

DiagnosticHypothesis fig5_hypothesis()
{
    DiagnosticHypothesis h;
    h.dialogue_id = "fig5";
    h.prompting_mode = PromptingMode::EGDR;
    h.template_version = "v1";
    h.extracted_symptoms = {{"sym_fatigue", {1}}, {"sym_insomnia", {1}}, {"sym_concentration", {3}},
                            {"sym_weight_change", {3}}};
    h.duration_days = 14;
    h.candidates = {{"dis_mdd", 4.0 / 9.0}};
    StepAssertions a;
    a.count_met = true;
    a.core_met = true;
    a.duration_met = true;
    a.exclusions_clear = true;
    h.criteria_analysis = {{"dis_mdd",
                            "Symptom count met: yes\nCore symptom present: yes\nDuration met: yes",
                            a}};
    h.exclusion_analysis.text = "Active exclusions: none\n[Major Depressive Disorder]\nExclusions clear: yes";
    h.exclusion_analysis.exclusions_clear = {{"dis_mdd", true}};
    h.final_diagnosis = "dis_mdd";
    h.reasoning_text =
        "SYMPTOMS:\n"
        "- fatigue (turns 1)\n"
        "- insomnia (turns 1)\n"
        "- diminished concentration (turns 3)\n"
        "- weight change (turns 3)\n"
        "DURATION: 14 days\n"
        "CANDIDATES:\n"
        "- Major Depressive Disorder (overlap 0.444)\n"
        "CRITERIA CHECK:\n"
        "[Major Depressive Disorder]\n"
        "Symptom count met: yes\n"
        "Core symptom present: yes\n"
        "Duration met: yes\n"
        "EXCLUSION CHECK:\n"
        "Active exclusions: none\n"
        "[Major Depressive Disorder]\n"
        "Exclusions clear: yes\n"
        "FINAL DIAGNOSIS: Major Depressive Disorder\n"
        "REASONING:\n"
        "The patient reports fatigue, insomnia, trouble concentrating and weight loss over two weeks, "
        "which meets the criteria for Major Depressive Disorder.\n";
    return h;
}

std::vector<std::string> fig5_claims()
{
    return {"The patient reports fatigue.",
            "The patient reports insomnia.",
            "The patient reports diminished concentration.",
            "The patient reports weight change.",
            "The symptoms have lasted two weeks.",
            "These symptoms meet the criteria for Major Depressive Disorder."};
}

namespace {

std::string claim_from_request(const ChatRequest& r)
{
    const std::string& user = r.messages.front().text;
    auto begin = user.find("Claim: ");
    if (begin == std::string::npos)
        return {};
    begin += 7;
    return user.substr(begin, user.find('\n', begin) - begin);
}

}  // namespace

Fig5Fixture build_fig5_fixture(const KnowledgeGraph& kg, const CriteriaMap& criteria, const TemplateSet& templates,
                               const ScoringConfig& config, double target_kas)
{
    const DiagnosticHypothesis h = fig5_hypothesis();
    const std::vector<std::string> claims = fig5_claims();
    std::string decomposition;
    for (const auto& c : claims)
        decomposition += "- " + c + "\n";

    auto run = [&](const std::vector<AttributionLabel>& labels) {
        RecordingChatProvider recorder(
            [&](const ChatRequest& r) -> std::string {
                if (r.system_text == templates.raw("decompose_system"))
                    return decomposition;
                std::string claim = claim_from_request(r);
                for (std::size_t i = 0; i < claims.size(); ++i)
                    if (claims[i] == claim)
                        return std::string(to_string(labels[i]));
                throw DomainError("unexpected fig5 request");
            },
            "oracle");
        LocalHashEmbedder embedder;
        ScoringProviders providers{&recorder, &templates, &embedder};
        ConfidenceReport report = score_reasoning(h, kg, criteria, config, providers);
        return std::make_pair(report, recorder.script());
    };

    // Label choice does not affect TMS, so one pass yields every claim's TMS.
    std::vector<AttributionLabel> labels(claims.size(), AttributionLabel::Extrapolatory);
    auto [probe, unused] = run(labels);
    (void)unused;
    std::vector<double> tms;
    for (const auto& c : probe.claims)
        tms.push_back(c.tms);

    const double target_sum = std::log(target_kas / (1.0 - target_kas));
    constexpr AttributionLabel kAll[] = {AttributionLabel::Attributable, AttributionLabel::Extrapolatory,
                                         AttributionLabel::Contradictory, AttributionLabel::NoAttribution};
    // Symptom claims are at best loosely supported; the conclusion claim is
    // related or contradicted. Fall back to all labels if that misses.
    auto search = [&](bool restricted) {
        double best_err = std::numeric_limits<double>::infinity();
        std::vector<AttributionLabel> best;
        std::size_t n = claims.size();
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n; ++i)
            combos *= 4;
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<AttributionLabel> cand(n);
            std::size_t c = code;
            bool ok = true;
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i, c /= 4) {
                cand[i] = kAll[c % 4];
                if (restricted && i < 4)
                    ok = ok && (cand[i] == AttributionLabel::Extrapolatory ||
                                cand[i] == AttributionLabel::NoAttribution);
                if (restricted && i == n - 1)
                    ok = ok && (cand[i] == AttributionLabel::Extrapolatory ||
                                cand[i] == AttributionLabel::Contradictory);
                sum += claim_weight(cand[i], tms[i]);
            }
            if (!ok)
                continue;
            double err = std::abs(sum - target_sum);
            if (err < best_err) {
                best_err = err;
                best = cand;
            }
        }
        return std::make_pair(best_err, best);
    };
    auto [err, chosen] = search(true);
    if (std::abs(sigmoid(target_sum + err) - target_kas) > 0.004)
        chosen = search(false).second;

    auto [report, script] = run(chosen);
    return Fig5Fixture{std::move(script), chosen, std::move(report)};
}

}  // namespace dxtrust::fixtures
