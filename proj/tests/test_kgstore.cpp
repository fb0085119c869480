#include "support.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/kgstore.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dxtrust;
using dxtrust::test::kg_from_text;

namespace {

const char* kTiny = R"({"type":"entity","id":"root","name":"Root","kind":"Root"}
{"type":"entity","id":"d1","name":"Disorder One","kind":"Disorder","aliases":["D1"]}
{"type":"entity","id":"s1","name":"low mood","kind":"Symptom","aliases":["feeling down"]}
{"type":"entity","id":"s2","name":"poor sleep","kind":"Symptom"}
{"type":"triplet","subject":"root","relation":"includes_disorder","object":"d1","source":"t"}
{"type":"triplet","subject":"d1","relation":"has_symptom","object":"s2","source":"t"}
{"type":"triplet","subject":"d1","relation":"has_symptom","object":"s1","source":"t"}
{"type":"triplet","subject":"d1","relation":"has_specifier","object_literal":"with onset","source":"t"}
)";

}  // namespace

TEST_CASE("load_kg indexes entities and triplets")
{
    KnowledgeGraph kg = kg_from_text(kTiny);
    CHECK(kg.root() == "root");
    CHECK(kg.entities().size() == 5);  // literal becomes a Modifier
    REQUIRE(kg.triplets().size() == 4);
    CHECK(kg.relation_count(Relation::HasSymptom) == 2);
    CHECK(kg.lookup("Feeling DOWN") == std::set<EntityId>{"s1"});
    CHECK(lookup_entity(kg, "d1") == std::set<EntityId>{"d1"});
    CHECK(kg.lookup("nothing").empty());
    CHECK(kg.max_alias_tokens() == 2);
    CHECK(kg.at(literal_entity_id("with onset")).kind == EntityKind::Modifier);
}

TEST_CASE("neighbors are ordered and filterable")
{
    KnowledgeGraph kg = kg_from_text(kTiny);
    auto all = neighbors(kg, "d1");
    REQUIRE(all.size() == 3);
    CHECK(all[0].object == "s1");
    CHECK(all[1].object == "s2");
    CHECK(all[2].relation == Relation::HasSpecifier);
    auto sym = neighbors(kg, "d1", Relation::HasSymptom);
    CHECK(sym.size() == 2);
    CHECK(neighbors(kg, "s1").empty());
    CHECK_THROWS_AS(neighbors(kg, "missing"), NotFound);
    CHECK_THROWS_AS(kg.at("missing"), NotFound);
}

TEST_CASE("verbalize and triplet_key")
{
    KnowledgeGraph kg = kg_from_text(kTiny);
    Triplet t{"d1", Relation::HasSymptom, "s1", "t"};
    CHECK(kg.verbalize(t) == "Disorder One has symptom low mood");
    CHECK(triplet_key(t) == "d1|has_symptom|s1");
}

TEST_CASE("serialize_kg round trips")
{
    KnowledgeGraph kg = kg_from_text(kTiny);
    KnowledgeGraph again = kg_from_text(serialize_kg(kg));
    CHECK(again == kg);
    CHECK(serialize_kg(again) == serialize_kg(kg));

    const KnowledgeGraph& shipped = dxtrust::test::shipped_kg();
    CHECK(kg_from_text(serialize_kg(shipped)) == shipped);
}

TEST_CASE("integrity violations are rejected")
{
    std::string root = R"({"type":"entity","id":"root","name":"Root","kind":"Root"})" "\n";
    std::string d1 = R"({"type":"entity","id":"d1","name":"D","kind":"Disorder"})" "\n";
    std::string inc = R"({"type":"triplet","subject":"root","relation":"includes_disorder","object":"d1","source":"t"})" "\n";

    SECTION("undeclared endpoint")
    {
        CHECK_THROWS_AS(kg_from_text(root + d1 + inc +
                                     R"({"type":"triplet","subject":"d1","relation":"has_symptom","object":"nope","source":"t"})"),
                        IntegrityError);
    }
    SECTION("duplicate id")
    {
        CHECK_THROWS_AS(kg_from_text(root + d1 + d1 + inc), IntegrityError);
    }
    SECTION("duplicate triplet")
    {
        CHECK_THROWS_AS(kg_from_text(root + d1 + inc + inc), IntegrityError);
    }
    SECTION("no root")
    {
        CHECK_THROWS_AS(kg_from_text(d1), IntegrityError);
    }
    SECTION("two roots")
    {
        CHECK_THROWS_AS(kg_from_text(root + R"({"type":"entity","id":"r2","name":"R","kind":"Root"})"), IntegrityError);
    }
    SECTION("unreachable disorder")
    {
        CHECK_THROWS_AS(kg_from_text(root + d1), IntegrityError);
    }
    SECTION("relation with wrong endpoint kinds")
    {
        std::string s = R"({"type":"entity","id":"s","name":"S","kind":"Symptom"})" "\n";
        CHECK_THROWS_AS(kg_from_text(root + d1 + s + inc +
                                     R"({"type":"triplet","subject":"s","relation":"has_symptom","object":"d1","source":"t"})"),
                        IntegrityError);
    }
}

TEST_CASE("malformed lines are parse errors with line numbers")
{
    try {
        kg_from_text(std::string(R"({"type":"entity","id":"root","name":"Root","kind":"Root"})") + "\n{not json\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(kg_from_text(R"({"type":"entity","id":"x","name":"X","kind":"Planet"})"), ParseError);
    CHECK_THROWS_AS(kg_from_text(R"({"type":"edge"})"), ParseError);
}

TEST_CASE("shipped graph is well formed")
{
    const KnowledgeGraph& kg = dxtrust::test::shipped_kg();
    CHECK(kg.entities_of_kind(EntityKind::Disorder).size() == 4);
    CHECK(kg.objects("dis_mdd", Relation::HasSymptom).size() == 9);
    CHECK(kg.lookup("loss of interest") == std::set<EntityId>{"sym_anhedonia"});
}
