#pragma once

#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"
#include "dxtrust/retrieval.hpp"
#include "dxtrust/templates.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dxtrust {

enum class AttributionLabel { Attributable, Extrapolatory, Contradictory, NoAttribution };

/// Symbolic score: 2, 1, -1, 0 in declaration order.
int cs(AttributionLabel label) noexcept;
std::string_view to_string(AttributionLabel label);
/// Accepts the label names case-insensitively, with or without trailing
/// prose ("Attributable: the triplet ..." parses).
std::optional<AttributionLabel> parse_attribution_label(std::string_view text);

struct Claim {
    int id = 0;
    std::string text;
    std::set<EntityId> entities;
};

struct ClaimScore {
    int claim_id = 0;
    std::string text;
    AttributionLabel label = AttributionLabel::NoAttribution;
    double sim = 0.0;
    double epr = 0.0;
    double tms = 0.0;
    double weight = 0.0;
};

struct ScoringConfig {
    double alpha = 0.5;
    double lambda = 0.75;
    int retrieval_budget = kDefaultRetrievalBudget;
    int provider_retry_limit = 3;
    std::uint64_t seed = 0;
    /// Aggregate with the mean weight instead of the sum.
    bool kas_mean_normalized = false;
    std::string model;

    /// Throws DomainError when alpha or lambda leave [0, 1].
    void validate() const;
};

/// Provider-mode context; a null provider selects the symbolic fallbacks.
struct ClaimPrompting {
    ChatProvider* provider = nullptr;
    const TemplateSet* templates = nullptr;
    std::string model;
    std::uint64_t seed = 0;
};

/// Splits on terminal punctuation followed by whitespace (or end of text)
/// and on line breaks; pieces are trimmed and empties dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Throws EmptyReasoning for blank input.
std::vector<Claim> decompose_claims(std::string_view reasoning, const KnowledgeGraph& kg,
                                    const ClaimPrompting& prompting = {});

inline constexpr std::string_view kNegationTokens[] = {"no", "not", "denies", "never"};
/// A negation token negates mentions starting within this many tokens after it.
inline constexpr std::size_t kNegationWindow = 4;

/// Symbolic attribution against the retrieved triplets:
///   Attributable   some evidence triplet has both endpoints mentioned in
///                  the claim and neither mention is negated;
///   Contradictory  otherwise, a negated mention of an evidence entity;
///   Extrapolatory  otherwise, any claim entity among evidence entities;
///   NoAttribution  no overlap at all.
AttributionLabel classify_symbolic(const Claim& claim, const RetrievedEvidence& evidence, const KnowledgeGraph& kg);

/// Provider mode asks for one of the four labels, with one repair retry
/// before UnparsableLabel; without a provider, classify_symbolic().
AttributionLabel classify_attribution(const Claim& claim, const RetrievedEvidence& evidence,
                                      const KnowledgeGraph& kg, const ClaimPrompting& prompting = {});

/// Harmonic mean of entity precision (|∩|/|claim|) and recall
/// (|∩|/|evidence|); an empty denominator counts as 1, and both zero gives 0.
double entity_pr(const std::set<EntityId>& claim_entities, const std::set<EntityId>& evidence_entities);

/// alpha*sim + (1-alpha)*epr. Throws DomainError outside [0, 1].
double triplet_match_score(double sim, double epr, double alpha);

double claim_weight(AttributionLabel label, double tms);

double sigmoid(double x) noexcept;

/// sigmoid(sum of weights), or sigmoid(mean) when mean_normalized. Weights
/// are summed in sorted order, so any permutation gives the same bits.
double kas_aggregate(std::span<const double> weights, bool mean_normalized = false);

/// Similarity and EPR for one claim: sim is the best clamped cosine over
/// the evidence and EPR compares the claim's entities with the endpoints of
/// that best-matching triplet.
ClaimScore score_claim(const Claim& claim, AttributionLabel label, const RetrievedEvidence& evidence,
                       const KnowledgeGraph& kg, const Embedder& embedder, double alpha);

}  // namespace dxtrust
