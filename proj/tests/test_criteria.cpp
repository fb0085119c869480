#include "support.hpp"

#include "dxtrust/criteria.hpp"
#include "dxtrust/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace dxtrust;

namespace {

const DisorderCriteria& mdd() { return dxtrust::test::shipped_criteria().at("dis_mdd"); }

std::set<EntityId> five_with_core()
{
    return {"sym_depressed_mood", "sym_insomnia", "sym_fatigue", "sym_concentration", "sym_worthlessness"};
}

}  // namespace

TEST_CASE("criteria bind to the graph")
{
    const auto& c = dxtrust::test::shipped_criteria();
    CHECK(c.size() == 4);
    CHECK(mdd().symptoms.size() == 9);
    CHECK(mdd().min_symptom_count == 5);
    CHECK(mdd().required_duration_days == 14);
}

TEST_CASE("MDD rule worked examples")
{
    auto r = evaluate_rules(mdd(), five_with_core(), {}, 21);
    CHECK(r.indicated);
    CHECK(r.matched_symptoms == 5);
    CHECK(r.matched_core == 1);

    std::set<EntityId> four = five_with_core();
    four.erase("sym_worthlessness");
    r = evaluate_rules(mdd(), four, {}, 21);
    CHECK_FALSE(r.count_met);
    CHECK_FALSE(r.indicated);

    std::set<EntityId> no_core = {"sym_insomnia", "sym_fatigue", "sym_concentration", "sym_worthlessness",
                                  "sym_weight_change"};
    r = evaluate_rules(mdd(), no_core, {}, 21);
    CHECK(r.count_met);
    CHECK_FALSE(r.core_met);
    CHECK_FALSE(r.indicated);

    r = evaluate_rules(mdd(), five_with_core(), {"exc_substance"}, 21);
    CHECK_FALSE(r.exclusions_clear);
    CHECK_FALSE(r.indicated);

    r = evaluate_rules(mdd(), five_with_core(), {"exc_bereavement"}, 21);
    CHECK(r.exclusions_clear);  // not an MDD exclusion

    r = evaluate_rules(mdd(), five_with_core(), {}, 10);
    CHECK_FALSE(r.duration_met);
    r = evaluate_rules(mdd(), five_with_core(), {}, 14);
    CHECK(r.duration_met);
}

TEST_CASE("missing duration passes unless strict")
{
    DisorderCriteria c = mdd();
    CHECK(evaluate_rules(c, five_with_core(), {}, std::nullopt).duration_met);
    c.duration_strict = true;
    CHECK_FALSE(evaluate_rules(c, five_with_core(), {}, std::nullopt).duration_met);
    CHECK(evaluate_rules(c, five_with_core(), {}, 30).duration_met);
}

TEST_CASE("symptoms outside the disorder do not count")
{
    std::set<EntityId> s = {"sym_depressed_mood", "sym_worry", "sym_irritability", "sym_muscle_tension",
                            "sym_restlessness"};
    CHECK(evaluate_rules(mdd(), s, {}, 30).matched_symptoms == 1);
}

TEST_CASE("silver label picks the best indicated disorder")
{
    const auto& c = dxtrust::test::shipped_criteria();
    const auto& kg = dxtrust::test::shipped_kg();
    CHECK(silver_label(c, kg, five_with_core(), {}, 30) == "dis_mdd");
    CHECK(silver_label(c, kg, {"sym_fatigue"}, {}, 30) == kNoDiagnosis);
    // MDD needs 14 days; PDD needs two years and fewer symptoms.
    CHECK(silver_label(c, kg, five_with_core(), {}, 800) == "dis_mdd");
    CHECK(silver_label(c, kg, {"sym_depressed_mood", "sym_insomnia", "sym_fatigue"}, {}, 800) == "dis_pdd");
}

TEST_CASE("silver label breaks ties on the smaller id")
{
    KnowledgeGraph kg = dxtrust::test::kg_from_text(R"({"type":"entity","id":"root","name":"R","kind":"Root"}
{"type":"entity","id":"d_a","name":"A","kind":"Disorder"}
{"type":"entity","id":"d_b","name":"B","kind":"Disorder"}
{"type":"entity","id":"s1","name":"one","kind":"Symptom"}
{"type":"triplet","subject":"root","relation":"includes_disorder","object":"d_a","source":"t"}
{"type":"triplet","subject":"root","relation":"includes_disorder","object":"d_b","source":"t"}
{"type":"triplet","subject":"d_a","relation":"has_symptom","object":"s1","source":"t"}
{"type":"triplet","subject":"d_b","relation":"has_symptom","object":"s1","source":"t"}
)");
    std::istringstream in(R"({"disorder":"d_b","min_symptom_count":1,"core_symptoms":["s1"]}
{"disorder":"d_a","min_symptom_count":1,"core_symptoms":["s1"]}
)");
    CriteriaMap c = load_criteria(in, kg);
    CHECK(silver_label(c, kg, {"s1"}, {}, std::nullopt) == "d_a");
}

TEST_CASE("criteria validation")
{
    const auto& kg = dxtrust::test::shipped_kg();
    auto load = [&](const std::string& text) {
        std::istringstream in(text);
        return load_criteria(in, kg);
    };
    CHECK_THROWS_AS(load(R"({"disorder":"dis_nope","min_symptom_count":1,"core_symptoms":[]})"), IntegrityError);
    CHECK_THROWS_AS(load(R"({"disorder":"dis_mdd","min_symptom_count":1,"core_symptoms":["sym_worry"]})"),
                    IntegrityError);
    CHECK_THROWS_AS(load(R"({"disorder":"dis_mdd","min_symptom_count":1,"core_symptoms":[],"exclusions":["sym_worry"]})"),
                    IntegrityError);
    CHECK_THROWS_AS(load(R"({"disorder":"dis_mdd","min_symptom_count":"five"})"), ParseError);
}

TEST_CASE("surface forms resolve by id or alias")
{
    const auto& kg = dxtrust::test::shipped_kg();
    std::vector<std::string> unresolved;
    auto ids = resolve_surface_forms(kg, {"sym_fatigue", "Loss of interest", "astral projection", "dis_mdd"},
                                     EntityKind::Symptom, &unresolved);
    CHECK(ids == std::set<EntityId>{"sym_anhedonia", "sym_fatigue"});
    CHECK(unresolved == std::vector<std::string>{"astral projection", "dis_mdd"});
}
