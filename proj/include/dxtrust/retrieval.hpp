#pragma once

#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dxtrust {

struct EntityMention {
    EntityId id;
    std::size_t begin = 0;  // token index, inclusive
    std::size_t end = 0;    // token index, exclusive
};

/// Longest-match scan of normalized tokens against the alias index. An
/// alias shared by several entities yields one mention per entity.
std::vector<EntityMention> find_mentions(const std::vector<std::string>& normalized_tokens,
                                         const KnowledgeGraph& kg);

std::set<EntityId> extract_entities(std::string_view text, const KnowledgeGraph& kg);

/// Swappable entity extractor; the lexicon matcher is the default.
class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;
    virtual std::set<EntityId> extract(std::string_view text, const KnowledgeGraph& kg) const = 0;
};

class LexiconExtractor final : public EntityExtractor {
public:
    std::set<EntityId> extract(std::string_view text, const KnowledgeGraph& kg) const override
    {
        return extract_entities(text, kg);
    }
};

struct CandidateDisorder {
    EntityId disorder;
    double score = 0.0;

    bool operator==(const CandidateDisorder&) const = default;
};

using CandidateDisorders = std::vector<CandidateDisorder>;

/// Overlap = |symptoms ∩ has_symptom(d)| / max(1, |has_symptom(d)|); zero
/// overlaps dropped; top-k by score then id.
CandidateDisorders rank_candidate_disorders(const KnowledgeGraph& kg, const std::set<EntityId>& symptoms,
                                            std::size_t k = 3);

struct ScoredTriplet {
    Triplet triplet;
    double relevance = 0.0;
};

struct RetrievedEvidence {
    std::set<EntityId> seed_entities;
    std::vector<ScoredTriplet> triplets;  // non-increasing relevance
    int budget_used = 0;

    std::set<EntityId> entities() const;
};

inline constexpr int kDefaultRetrievalBudget = 32;

/// Best-first graph walk from `seeds`.
///
/// The walk proceeds hop by hop. At each hop the frontier is every triplet
/// touching the visited set that has not been emitted yet (Root-incident
/// structural edges are never walked). Frontier triplets are scored
///
///     relevance = 0.5 * symbolic + 0.5 * semantic
///
/// where symbolic is the fraction of the triplet's endpoints already
/// visited and semantic is clamp(cosine(verbalized triplet, seed names),
/// 0, 1), then emitted highest first until the budget is spent. Endpoints
/// of emitted triplets join the visited set for the next hop.
///
/// Throws NotFound for an unknown seed and DomainError for a negative budget.
RetrievedEvidence walk_retrieve(const KnowledgeGraph& kg, const std::set<EntityId>& seeds, int budget,
                                const Embedder& embedder);

struct SimMatch {
    double sim = 0.0;
    std::optional<std::size_t> best;  // index into evidence.triplets
};

/// Max clamped cosine between the claim and each verbalized evidence
/// triplet; ties keep the earliest (most relevant) triplet.
SimMatch claim_triplet_match(std::string_view claim_text, const RetrievedEvidence& evidence,
                             const KnowledgeGraph& kg, const Embedder& embedder);

double claim_triplet_sim(std::string_view claim_text, const RetrievedEvidence& evidence, const KnowledgeGraph& kg,
                         const Embedder& embedder);

}  // namespace dxtrust
