#include "support.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/text.hpp"
#include "dxtrust/sections.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dxtrust;
using dxtrust::test::shipped_kg;

TEST_CASE("scan_sections handles decoration and inline bodies")
{
    auto s = scan_sections("preamble\n## Symptoms\n- fatigue\n**FINAL DIAGNOSIS:** Major Depressive Disorder\n"
                           "reasoning: because\nmore\n");
    CHECK(s.count("SYMPTOMS"));
    CHECK(trim(s["SYMPTOMS"]) == "- fatigue");
    CHECK(trim(s["FINAL DIAGNOSIS"]) == "Major Depressive Disorder");
    CHECK(trim(s["REASONING"]) == "because\nmore");
    CHECK_FALSE(s.count("preamble"));
}

TEST_CASE("parse_structured_output lists every missing label")
{
    try {
        parse_structured_output("SYMPTOMS:\n- x\n", {"SYMPTOMS", "DURATION", "REASONING"});
        FAIL("expected MissingSection");
    } catch (const MissingSection& e) {
        CHECK(e.labels() == std::vector<std::string>{"DURATION", "REASONING"});
    }
}

TEST_CASE("symptom lines and durations")
{
    std::vector<std::string> unresolved;
    auto lines = parse_symptom_lines("- fatigue (turns 1, 3)\n- unicorn sightings (turn 2)\nprose\n", shipped_kg(),
                                     &unresolved);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].id == "sym_fatigue");
    CHECK(lines[0].turns == std::vector<int>{1, 3});
    CHECK(unresolved.size() == 1);
    CHECK(render_symptom_line(shipped_kg(), lines[0]) == "- fatigue (turns 1, 3)");

    CHECK(parse_duration_days("21 days") == 21);
    CHECK(parse_duration_days("3 weeks") == 21);
    CHECK(parse_duration_days("6 months") == 180);
    CHECK(parse_duration_days("2 years") == 730);
    CHECK_FALSE(parse_duration_days("unknown"));
    CHECK(parse_duration_days(render_duration(45)) == 45);
}

TEST_CASE("assertion blocks and exclusions")
{
    const auto& kg = shipped_kg();
    auto blocks = parse_assertion_blocks("[Major Depressive Disorder]\nSymptom count met: yes\nCore symptom present: no\n"
                                         "[Generalized Anxiety Disorder]\nDuration met: yes\n",
                                         kg);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks["dis_mdd"].count_met == true);
    CHECK(blocks["dis_mdd"].core_met == false);
    CHECK_FALSE(blocks["dis_mdd"].duration_met);
    CHECK(blocks["dis_gad"].duration_met == true);

    StepAssertions a{true, std::nullopt, std::nullopt, std::nullopt};
    merge_assertions(a, StepAssertions{false, true, std::nullopt, std::nullopt});
    CHECK(a == StepAssertions{false, true, std::nullopt, std::nullopt});

    std::vector<std::string> unresolved;
    auto ex = parse_active_exclusions("- Active exclusions: substance use; space weather", kg, &unresolved);
    REQUIRE(ex);
    CHECK(*ex == std::vector<EntityId>{"exc_substance"});
    CHECK(unresolved == std::vector<std::string>{"space weather"});
    CHECK_FALSE(parse_active_exclusions("nothing here", kg));
    ex = parse_active_exclusions("Active exclusions: none", kg);
    REQUIRE(ex);
    CHECK(ex->empty());

    CHECK(parse_final_diagnosis("Major Depressive Disorder\nmore", kg) == "dis_mdd");
    CHECK(parse_final_diagnosis("No diagnosis", kg) == kNoDiagnosis);
    CHECK_FALSE(parse_final_diagnosis("schizophrenia", kg));
    CHECK(parse_final_diagnosis(render_diagnosis(kg, "dis_gad"), kg) == "dis_gad");
    CHECK(parse_disorder_list("- Major Depressive Disorder\n- dysthymia\n", kg) ==
          std::vector<EntityId>{"dis_mdd", "dis_pdd"});
    CHECK(parse_disorder_list("none", kg).empty());
}
