#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dxtrust {

using EntityId = std::string;

enum class EntityKind { Root, Disorder, Symptom, Criterion, Exclusion, Specifier, Modifier };

enum class Relation { IncludesDisorder, HasSymptom, HasCriterion, HasExclusion, HasSpecifier };

std::string_view to_string(EntityKind kind);
std::string_view to_string(Relation relation);
std::optional<EntityKind> parse_entity_kind(std::string_view text);
std::optional<Relation> parse_relation(std::string_view text);

struct Entity {
    EntityId id;
    std::string canonical_name;
    std::set<std::string> aliases;  // normalized; always contains normalize(canonical_name)
    EntityKind kind = EntityKind::Modifier;

    bool operator==(const Entity&) const = default;
};

struct Triplet {
    EntityId subject;
    Relation relation = Relation::HasSymptom;
    EntityId object;
    std::string source;

    bool operator==(const Triplet&) const = default;
};

/// Stable identifier "subject|relation|object".
std::string triplet_key(const Triplet& t);

/// Immutable DSM-5-style graph. Construct through load_kg(); all accessors
/// are const and safe for concurrent readers.
class KnowledgeGraph {
public:
    const std::map<EntityId, Entity>& entities() const noexcept { return entities_; }

    /// Sorted by (subject, relation, object).
    const std::vector<Triplet>& triplets() const noexcept { return triplets_; }

    const Entity* find(std::string_view id) const;
    const Entity& at(std::string_view id) const;  // throws NotFound
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const EntityId& root() const noexcept { return root_; }

    /// Entity ids whose normalized alias equals normalize(surface).
    std::set<EntityId> lookup(std::string_view surface) const;

    /// Exact lookup on an already-normalized form.
    const std::set<EntityId>* lookup_normalized(const std::string& normalized) const;

    /// Longest alias length in tokens; bounds the extractor's window.
    std::size_t max_alias_tokens() const noexcept { return max_alias_tokens_; }

    /// Indexes into triplets() with the entity as subject, ordered by
    /// (relation, object id).
    const std::vector<std::size_t>& outgoing(std::string_view id) const;

    /// Indexes into triplets() with the entity as object.
    const std::vector<std::size_t>& incoming(std::string_view id) const;

    std::vector<EntityId> entities_of_kind(EntityKind kind) const;

    /// Object ids of `subject`'s outgoing triplets with `relation`.
    std::set<EntityId> objects(std::string_view subject, Relation relation) const;

    /// "<subject name> <relation with spaces> <object name>".
    std::string verbalize(const Triplet& t) const;

    std::size_t relation_count(Relation r) const;

    bool operator==(const KnowledgeGraph& other) const
    {
        return entities_ == other.entities_ && triplets_ == other.triplets_;
    }

private:
    friend class KnowledgeGraphBuilder;

    std::map<EntityId, Entity> entities_;
    std::vector<Triplet> triplets_;
    std::unordered_map<std::string, std::set<EntityId>> alias_index_;
    std::unordered_map<EntityId, std::vector<std::size_t>> outgoing_;
    std::unordered_map<EntityId, std::vector<std::size_t>> incoming_;
    EntityId root_;
    std::size_t max_alias_tokens_ = 0;
};

/// Raw records, validated and indexed by build().
class KnowledgeGraphBuilder {
public:
    void add_entity(Entity entity, std::size_t line = 0);

    /// `object` may name a declared entity, or be a literal when
    /// `object_is_literal` is set; literals become Modifier entities.
    void add_triplet(EntityId subject, Relation relation, std::string object, std::string source,
                     bool object_is_literal = false, std::size_t line = 0);

    /// Checks every graph invariant and returns the indexed graph.
    /// Throws IntegrityError.
    KnowledgeGraph build() &&;

private:
    struct PendingTriplet {
        Triplet triplet;
        bool literal = false;
        std::size_t line = 0;
    };
    std::vector<std::pair<Entity, std::size_t>> entities_;
    std::vector<PendingTriplet> triplets_;
};

/// Id given to a literal triplet object.
EntityId literal_entity_id(std::string_view literal);

KnowledgeGraph load_kg(std::istream& in);
KnowledgeGraph load_kg(const std::filesystem::path& path);

/// Line-record serialization accepted by load_kg (entities then triplets,
/// both in id order).
std::string serialize_kg(const KnowledgeGraph& kg);

std::set<EntityId> lookup_entity(const KnowledgeGraph& kg, std::string_view surface);

/// Outgoing triplets of `entity` in (relation, object id) order, optionally
/// filtered. Throws NotFound.
std::vector<Triplet> neighbors(const KnowledgeGraph& kg, std::string_view entity,
                               std::optional<Relation> relation_filter = std::nullopt);

}  // namespace dxtrust
