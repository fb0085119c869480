#include "support.hpp"

#include "dxtrust/egdr.hpp"
#include "dxtrust/errors.hpp"

#include "fixture_responder.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>

using namespace dxtrust;
using namespace dxtrust::test;

namespace {

const Dialogue& dialogue(const std::string& id)
{
    for (const auto& d : shipped_corpus())
        if (d.id == id)
            return d;
    throw NotFound(id);
}

EgdrConfig config() { return EgdrConfig{"gpt-4o-mini", 0, 1024}; }

/// Oracle answers, with `override_fn` given first refusal per stage call.
struct Harness {
    fixtures::OracleResponder oracle{shipped_kg(), shipped_criteria()};
    std::function<std::optional<std::string>(int stage, int call)> override_fn;
    std::map<int, int> calls;

    std::unique_ptr<RecordingChatProvider> provider(const Dialogue& d, PromptingMode mode = PromptingMode::EGDR)
    {
        return std::make_unique<RecordingChatProvider>([this, &d, mode](const ChatRequest& r) {
            int stage = fixtures::stage_of(r);
            int n = ++calls[stage];
            if (override_fn)
                if (auto o = override_fn(stage, n))
                    return *o;
            return oracle.respond(d, mode, r);
        });
    }
};

}  // namespace

TEST_CASE("EGDR replays the committed stub script")
{
    StubChatProvider stub = StubChatProvider::from_file(default_data_root() / "stub" / "egdr_v1.jsonl");
    EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), stub, config()};
    for (const char* id : {"syn-001", "syn-002", "syn-010"}) {
        const Dialogue& d = dialogue(id);
        DiagnosticHypothesis h = run_egdr(d, ctx);
        CHECK(h.final_diagnosis == *d.silver_label);
        CHECK(h.prompting_mode == PromptingMode::EGDR);
        CHECK(h.template_version == "v1");
        CHECK(h.reasoning_text.find("FINAL DIAGNOSIS:") != std::string::npos);
    }
}

TEST_CASE("stage prompts carry their stage and earlier artifacts")
{
    const Dialogue& d = dialogue("syn-001");
    StageArtifacts a;
    auto p1 = build_stage_prompt(1, d, a, shipped_kg(), shipped_criteria(), shipped_templates());
    CHECK(p1.stage == 1);
    CHECK(p1.system_text.find("stage 1 of 5") != std::string::npos);
    CHECK(p1.user_text.find(d.turns[1].text) != std::string::npos);
    CHECK(p1.expected_sections == std::vector<std::string>{"SYMPTOMS"});

    a.symptoms = {{"sym_fatigue", {1}}};
    a.ranking = rank_candidate_disorders(shipped_kg(), {"sym_fatigue"});
    auto p2 = build_stage_prompt(2, d, a, shipped_kg(), shipped_criteria(), shipped_templates());
    CHECK(p2.user_text.find("fatigue") != std::string::npos);
    CHECK(p2.user_text.find("Generalized Anxiety Disorder") != std::string::npos);
    CHECK_THROWS(build_stage_prompt(6, d, a, shipped_kg(), shipped_criteria(), shipped_templates()));
}

TEST_CASE("a malformed stage gets one repair")
{
    Harness h;
    h.override_fn = [](int stage, int call) -> std::optional<std::string> {
        if (stage == 3 && call == 1)
            return std::string("I am not sure.");
        return std::nullopt;
    };
    const Dialogue& d = dialogue("syn-001");
    auto p = h.provider(d);
    EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), *p, config()};
    DiagnosticHypothesis hyp = run_egdr(d, ctx);
    CHECK(hyp.final_diagnosis == "dis_mdd");
    CHECK(h.calls[3] == 2);
    auto reqs = p->requests();
    const ChatRequest* repair = nullptr;
    for (const auto& r : reqs)
        if (fixtures::stage_of(r) == 3 && r.messages.size() == 3)
            repair = &r;
    REQUIRE(repair);
    CHECK(repair->messages[1].role == "assistant");
    CHECK(repair->messages[1].text == "I am not sure.");
    CHECK(repair->messages[2].text.find("CRITERIA CHECK") != std::string::npos);
}

TEST_CASE("a stage that stays malformed fails with its number")
{
    for (int bad : {1, 2, 3, 4, 5}) {
        Harness h;
        h.override_fn = [bad](int stage, int) -> std::optional<std::string> {
            if (stage == bad)
                return std::string("nothing useful");
            return std::nullopt;
        };
        const Dialogue& d = dialogue("syn-001");
        auto p = h.provider(d);
        EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), *p, config()};
        try {
            run_egdr(d, ctx);
            FAIL("expected StageParseFailure");
        } catch (const StageParseFailure& e) {
            CHECK(e.stage_number() == bad);
            CHECK(h.calls[bad] == 2);
        }
    }
}

TEST_CASE("stage 2 candidates must come from the ranking")
{
    Harness h;
    h.override_fn = [](int stage, int) -> std::optional<std::string> {
        if (stage == 2)
            return std::string("CANDIDATES:\n- Adjustment Disorder with Depressed Mood\n- Bipolar Disorder\n");
        return std::nullopt;
    };
    const Dialogue& d = dialogue("syn-001");
    auto p = h.provider(d);
    EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), *p, config()};
    CHECK_THROWS_AS(run_egdr(d, ctx), StageParseFailure);
}

TEST_CASE("no symptoms short-circuits to no diagnosis")
{
    Dialogue d;
    d.id = "quiet";
    d.turns = {{Role::Clinician, "How are you?", 0}, {Role::Patient, "Honestly fine.", 1}};
    RecordingChatProvider p([](const ChatRequest&) { return "SYMPTOMS:\n- none\nDURATION: unknown\n"; });
    EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), p, config()};
    DiagnosticHypothesis h = run_egdr(d, ctx);
    CHECK(h.final_diagnosis == kNoDiagnosis);
    CHECK(h.candidates.empty());
    CHECK(p.requests().size() == 1);
}

TEST_CASE("baselines parse single-turn answers")
{
    const Dialogue& d = dialogue("syn-001");
    for (PromptingMode mode : {PromptingMode::Direct, PromptingMode::CoT}) {
        Harness h;
        auto p = h.provider(d, mode);
        EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), *p, config()};
        DiagnosticHypothesis hyp = run_baseline(d, ctx, mode);
        CHECK(hyp.prompting_mode == mode);
        CHECK(hyp.final_diagnosis == "dis_mdd");
        CHECK(p->requests().size() == 1);
        CHECK_FALSE(hyp.reasoning_text.empty());
    }
    auto direct = build_baseline_prompt(PromptingMode::Direct, d, shipped_kg(), shipped_criteria(), shipped_templates());
    auto cot = build_baseline_prompt(PromptingMode::CoT, d, shipped_kg(), shipped_criteria(), shipped_templates());
    CHECK(std::count(cot.expected_sections.begin(), cot.expected_sections.end(), "STEPWISE REASONING") == 1);
    CHECK(std::count(direct.expected_sections.begin(), direct.expected_sections.end(), "STEPWISE REASONING") == 0);
    CHECK(direct.system_text.find(describe_criteria(shipped_criteria().at("dis_mdd"), shipped_kg())) !=
          std::string::npos);
}

TEST_CASE("describe_criteria")
{
    CHECK(describe_criteria(shipped_criteria().at("dis_mdd"), shipped_kg()) ==
          "at least 5 of the listed symptoms, including at least 1 of: anhedonia, depressed mood; lasting at least "
          "14 days; not diagnosed when any of: history of manic episode, psychotic disorder, substance-induced "
          "condition");
}

TEST_CASE("hypotheses round trip through JSON")
{
    StubChatProvider stub = StubChatProvider::from_file(default_data_root() / "stub" / "egdr_v1.jsonl");
    EgdrContext ctx{shipped_kg(), shipped_criteria(), shipped_templates(), stub, config()};
    DiagnosticHypothesis h = run_egdr(dialogue("syn-001"), ctx);
    DiagnosticHypothesis back = hypothesis_from_json(to_json(h));
    CHECK(to_json(back) == to_json(h));
    CHECK(back.criteria_analysis == h.criteria_analysis);
    CHECK(back.exclusion_analysis == h.exclusion_analysis);
    CHECK(back.candidates == h.candidates);

    auto bad = to_json(h);
    bad["prompting_mode"] = "telepathy";
    CHECK_THROWS_AS(hypothesis_from_json(bad, 4), SchemaError);
    bad = to_json(h);
    bad.erase("final_diagnosis");
    CHECK_THROWS_AS(hypothesis_from_json(bad, 4), SchemaError);
}
