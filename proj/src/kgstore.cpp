#include "dxtrust/kgstore.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <tuple>

namespace dxtrust {

namespace {

constexpr std::array<std::pair<EntityKind, std::string_view>, 7> kKindNames{{
    {EntityKind::Root, "Root"},
    {EntityKind::Disorder, "Disorder"},
    {EntityKind::Symptom, "Symptom"},
    {EntityKind::Criterion, "Criterion"},
    {EntityKind::Exclusion, "Exclusion"},
    {EntityKind::Specifier, "Specifier"},
    {EntityKind::Modifier, "Modifier"},
}};

constexpr std::array<std::pair<Relation, std::string_view>, 5> kRelationNames{{
    {Relation::IncludesDisorder, "includes_disorder"},
    {Relation::HasSymptom, "has_symptom"},
    {Relation::HasCriterion, "has_criterion"},
    {Relation::HasExclusion, "has_exclusion"},
    {Relation::HasSpecifier, "has_specifier"},
}};

bool endpoint_kinds_ok(Relation r, EntityKind subject, EntityKind object)
{
    switch (r) {
    case Relation::IncludesDisorder:
        return subject == EntityKind::Root && object == EntityKind::Disorder;
    case Relation::HasSymptom:
        return subject == EntityKind::Disorder && object == EntityKind::Symptom;
    case Relation::HasCriterion:
        return subject == EntityKind::Disorder && object == EntityKind::Criterion;
    case Relation::HasExclusion:
        return subject == EntityKind::Disorder && object == EntityKind::Exclusion;
    case Relation::HasSpecifier:
        return subject == EntityKind::Disorder &&
               (object == EntityKind::Specifier || object == EntityKind::Modifier);
    }
    return false;
}

const std::vector<std::size_t> kEmpty;

std::string required_string(const json& rec, const char* field, std::size_t line)
{
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_string())
        throw ParseError(line, std::string("missing or non-string field '") + field + "'");
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EntityKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind)
            return name;
    return "Modifier";
}

std::string_view to_string(Relation relation)
{
    for (const auto& [r, name] : kRelationNames)
        if (r == relation)
            return name;
    return "has_symptom";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text)
{
    for (const auto& [k, name] : kKindNames)
        if (name == text)
            return k;
    return std::nullopt;
}

std::optional<Relation> parse_relation(std::string_view text)
{
    for (const auto& [r, name] : kRelationNames)
        if (name == text)
            return r;
    return std::nullopt;
}

std::string triplet_key(const Triplet& t)
{
    return t.subject + "|" + std::string(to_string(t.relation)) + "|" + t.object;
}

EntityId literal_entity_id(std::string_view literal)
{
    std::string id = "lit:" + normalize(literal);
    std::replace(id.begin(), id.end(), ' ', '_');
    return id;
}

// --- KnowledgeGraph ---------------------------------------------------------

const Entity* KnowledgeGraph::find(std::string_view id) const
{
    auto it = entities_.find(EntityId(id));
    return it == entities_.end() ? nullptr : &it->second;
}

const Entity& KnowledgeGraph::at(std::string_view id) const
{
    const Entity* e = find(id);
    if (!e)
        throw NotFound(std::string(id));
    return *e;
}

std::set<EntityId> KnowledgeGraph::lookup(std::string_view surface) const
{
    const auto* hit = lookup_normalized(normalize(surface));
    return hit ? *hit : std::set<EntityId>{};
}

const std::set<EntityId>* KnowledgeGraph::lookup_normalized(const std::string& normalized) const
{
    auto it = alias_index_.find(normalized);
    return it == alias_index_.end() ? nullptr : &it->second;
}

const std::vector<std::size_t>& KnowledgeGraph::outgoing(std::string_view id) const
{
    auto it = outgoing_.find(EntityId(id));
    return it == outgoing_.end() ? kEmpty : it->second;
}

const std::vector<std::size_t>& KnowledgeGraph::incoming(std::string_view id) const
{
    auto it = incoming_.find(EntityId(id));
    return it == incoming_.end() ? kEmpty : it->second;
}

std::vector<EntityId> KnowledgeGraph::entities_of_kind(EntityKind kind) const
{
    std::vector<EntityId> out;
    for (const auto& [id, e] : entities_)
        if (e.kind == kind)
            out.push_back(id);
    return out;
}

std::set<EntityId> KnowledgeGraph::objects(std::string_view subject, Relation relation) const
{
    std::set<EntityId> out;
    for (std::size_t idx : outgoing(subject))
        if (triplets_[idx].relation == relation)
            out.insert(triplets_[idx].object);
    return out;
}

std::string KnowledgeGraph::verbalize(const Triplet& t) const
{
    std::string rel(to_string(t.relation));
    std::replace(rel.begin(), rel.end(), '_', ' ');
    return at(t.subject).canonical_name + " " + rel + " " + at(t.object).canonical_name;
}

std::size_t KnowledgeGraph::relation_count(Relation r) const
{
    return static_cast<std::size_t>(
        std::count_if(triplets_.begin(), triplets_.end(), [r](const Triplet& t) { return t.relation == r; }));
}

// --- builder ----------------------------------------------------------------

void KnowledgeGraphBuilder::add_entity(Entity entity, std::size_t line)
{
    entities_.emplace_back(std::move(entity), line);
}

void KnowledgeGraphBuilder::add_triplet(EntityId subject, Relation relation, std::string object,
                                        std::string source, bool object_is_literal, std::size_t line)
{
    PendingTriplet p;
    p.triplet.subject = std::move(subject);
    p.triplet.relation = relation;
    p.triplet.source = std::move(source);
    p.literal = object_is_literal;
    p.line = line;
    p.triplet.object = std::move(object);
    triplets_.push_back(std::move(p));
}

KnowledgeGraph KnowledgeGraphBuilder::build() &&
{
    KnowledgeGraph kg;

    for (auto& [entity, line] : entities_) {
        if (entity.id.empty())
            throw IntegrityError("entity with empty id (line " + std::to_string(line) + ")");
        if (trim(entity.canonical_name).empty())
            throw IntegrityError("entity " + entity.id + " has an empty name");
        std::set<std::string> aliases;
        for (const auto& a : entity.aliases) {
            std::string n = normalize(a);
            if (!n.empty())
                aliases.insert(std::move(n));
        }
        aliases.insert(normalize(entity.canonical_name));
        entity.aliases = std::move(aliases);
        auto [it, inserted] = kg.entities_.emplace(entity.id, entity);
        if (!inserted)
            throw IntegrityError("duplicate entity id " + entity.id);
    }

    std::set<std::tuple<EntityId, Relation, EntityId>> seen;
    for (auto& p : triplets_) {
        Triplet& t = p.triplet;
        if (p.literal) {
            std::string literal = t.object;
            if (trim(literal).empty())
                throw IntegrityError("empty literal object (line " + std::to_string(p.line) + ")");
            t.object = literal_entity_id(literal);
            auto it = kg.entities_.find(t.object);
            if (it == kg.entities_.end()) {
                Entity lit;
                lit.id = t.object;
                lit.canonical_name = trim(literal);
                lit.aliases = {normalize(literal)};
                lit.kind = EntityKind::Modifier;
                kg.entities_.emplace(lit.id, std::move(lit));
            } else if (it->second.kind != EntityKind::Modifier) {
                throw IntegrityError("literal id " + t.object + " collides with a declared entity");
            }
        }
        const Entity* s = kg.find(t.subject);
        if (!s)
            throw IntegrityError("triplet references undeclared id " + t.subject);
        const Entity* o = kg.find(t.object);
        if (!o)
            throw IntegrityError("triplet references undeclared id " + t.object);
        if (!endpoint_kinds_ok(t.relation, s->kind, o->kind))
            throw IntegrityError("relation " + std::string(to_string(t.relation)) + " cannot link " +
                                 std::string(to_string(s->kind)) + " " + t.subject + " to " +
                                 std::string(to_string(o->kind)) + " " + t.object);
        if (!seen.emplace(t.subject, t.relation, t.object).second)
            throw IntegrityError("duplicate triplet " + triplet_key(t));
        kg.triplets_.push_back(std::move(t));
    }

    std::vector<EntityId> roots;
    for (const auto& [id, e] : kg.entities_)
        if (e.kind == EntityKind::Root)
            roots.push_back(id);
    if (roots.empty())
        throw IntegrityError("graph has no Root entity");
    if (roots.size() > 1)
        throw IntegrityError("graph has " + std::to_string(roots.size()) + " Root entities");
    kg.root_ = roots.front();

    std::sort(kg.triplets_.begin(), kg.triplets_.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.subject, a.relation, a.object) < std::tie(b.subject, b.relation, b.object);
    });
    for (std::size_t i = 0; i < kg.triplets_.size(); ++i) {
        kg.outgoing_[kg.triplets_[i].subject].push_back(i);
        kg.incoming_[kg.triplets_[i].object].push_back(i);
    }

    // includes_disorder only leaves Root, so reachability is one hop.
    std::set<EntityId> reachable = kg.objects(kg.root_, Relation::IncludesDisorder);
    for (const auto& [id, e] : kg.entities_)
        if (e.kind == EntityKind::Disorder && !reachable.count(id))
            throw IntegrityError("disorder " + id + " is not reachable from the root");

    for (const auto& [id, e] : kg.entities_) {
        for (const auto& alias : e.aliases) {
            kg.alias_index_[alias].insert(id);
            kg.max_alias_tokens_ = std::max(kg.max_alias_tokens_, tokenize_normalized(alias).size());
        }
    }
    return kg;
}

// --- file format ------------------------------------------------------------

KnowledgeGraph load_kg(std::istream& in)
{
    auto records = read_jsonl(in, [](std::size_t line, const std::string& msg) { throw ParseError(line, msg); });
    KnowledgeGraphBuilder builder;
    for (const auto& [line, rec] : records) {
        std::string type = required_string(rec, "type", line);
        if (type == "entity") {
            Entity e;
            e.id = required_string(rec, "id", line);
            e.canonical_name = required_string(rec, "name", line);
            auto kind = parse_entity_kind(required_string(rec, "kind", line));
            if (!kind)
                throw ParseError(line, "unknown entity kind '" + rec["kind"].get<std::string>() + "'");
            e.kind = *kind;
            if (auto it = rec.find("aliases"); it != rec.end()) {
                if (!it->is_array())
                    throw ParseError(line, "'aliases' must be an array");
                for (const auto& a : *it) {
                    if (!a.is_string())
                        throw ParseError(line, "alias must be a string");
                    e.aliases.insert(a.get<std::string>());
                }
            }
            builder.add_entity(std::move(e), line);
        } else if (type == "triplet") {
            std::string subject = required_string(rec, "subject", line);
            std::string rel_text = required_string(rec, "relation", line);
            auto relation = parse_relation(rel_text);
            if (!relation)
                throw ParseError(line, "unknown relation '" + rel_text + "'");
            std::string source;
            if (auto it = rec.find("source"); it != rec.end() && it->is_string())
                source = it->get<std::string>();
            if (rec.contains("object_literal")) {
                builder.add_triplet(std::move(subject), *relation, required_string(rec, "object_literal", line),
                                    std::move(source), true, line);
            } else {
                builder.add_triplet(std::move(subject), *relation, required_string(rec, "object", line),
                                    std::move(source), false, line);
            }
        } else {
            throw ParseError(line, "unknown record type '" + type + "'");
        }
    }
    return std::move(builder).build();
}

KnowledgeGraph load_kg(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return load_kg(in);
}

std::string serialize_kg(const KnowledgeGraph& kg)
{
    std::vector<json> records;
    for (const auto& [id, e] : kg.entities()) {
        json aliases = json::array();
        for (const auto& a : e.aliases)
            aliases.push_back(a);
        records.push_back(json{{"type", "entity"},
                               {"id", e.id},
                               {"name", e.canonical_name},
                               {"kind", std::string(to_string(e.kind))},
                               {"aliases", aliases}});
    }
    for (const auto& t : kg.triplets())
        records.push_back(json{{"type", "triplet"},
                               {"subject", t.subject},
                               {"relation", std::string(to_string(t.relation))},
                               {"object", t.object},
                               {"source", t.source}});
    return to_jsonl(records);
}

std::set<EntityId> lookup_entity(const KnowledgeGraph& kg, std::string_view surface)
{
    return kg.lookup(surface);
}

std::vector<Triplet> neighbors(const KnowledgeGraph& kg, std::string_view entity,
                               std::optional<Relation> relation_filter)
{
    if (!kg.contains(entity))
        throw NotFound(std::string(entity));
    std::vector<Triplet> out;
    for (std::size_t idx : kg.outgoing(entity)) {
        const Triplet& t = kg.triplets()[idx];
        if (!relation_filter || t.relation == *relation_filter)
            out.push_back(t);
    }
    return out;
}

}  // namespace dxtrust
