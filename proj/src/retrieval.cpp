#include "dxtrust/retrieval.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace dxtrust {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<EntityMention> find_mentions(const std::vector<std::string>& toks, const KnowledgeGraph& kg)
{
    std::vector<EntityMention> out;
    const std::size_t window = kg.max_alias_tokens();
    std::size_t i = 0;
    while (i < toks.size()) {
        std::size_t matched = 0;
        const std::set<EntityId>* ids = nullptr;
        for (std::size_t len = std::min(window, toks.size() - i); len > 0; --len) {
            std::string candidate = toks[i];
            for (std::size_t j = 1; j < len; ++j) {
                candidate += ' ';
                candidate += toks[i + j];
            }
            if (const auto* hit = kg.lookup_normalized(candidate)) {
                matched = len;
                ids = hit;
                break;
            }
        }
        if (matched == 0) {
            ++i;
            continue;
        }
        for (const auto& id : *ids)
            out.push_back({id, i, i + matched});
        i += matched;
    }
    return out;
}

std::set<EntityId> extract_entities(std::string_view text, const KnowledgeGraph& kg)
{
    std::set<EntityId> out;
    for (const auto& m : find_mentions(tokens(text), kg))
        out.insert(m.id);
    return out;
}

CandidateDisorders rank_candidate_disorders(const KnowledgeGraph& kg, const std::set<EntityId>& symptoms,
                                            std::size_t k)
{
    CandidateDisorders all;
    for (const auto& d : kg.entities_of_kind(EntityKind::Disorder)) {
        std::set<EntityId> own = kg.objects(d, Relation::HasSymptom);
        std::size_t overlap = 0;
        for (const auto& s : symptoms)
            overlap += own.count(s);
        if (overlap == 0)
            continue;
        all.push_back({d, static_cast<double>(overlap) / static_cast<double>(std::max<std::size_t>(1, own.size()))});
    }
    std::stable_sort(all.begin(), all.end(), [](const CandidateDisorder& a, const CandidateDisorder& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.disorder < b.disorder;
    });
    if (all.size() > k)
        all.resize(k);
    return all;
}

std::set<EntityId> RetrievedEvidence::entities() const
{
    std::set<EntityId> out;
    for (const auto& st : triplets) {
        out.insert(st.triplet.subject);
        out.insert(st.triplet.object);
    }
    return out;
}

RetrievedEvidence walk_retrieve(const KnowledgeGraph& kg, const std::set<EntityId>& seeds, int budget,
                                const Embedder& embedder)
{
    if (budget < 0)
        throw DomainError("retrieval budget must be >= 0");
    for (const auto& s : seeds)
        if (!kg.contains(s))
            throw NotFound(s);

    RetrievedEvidence ev;
    ev.seed_entities = seeds;
    if (budget == 0 || seeds.empty())
        return ev;

    std::string seed_text;
    for (const auto& s : seeds) {
        if (!seed_text.empty())
            seed_text += ' ';
        seed_text += kg.at(s).canonical_name;
    }
    const EmbeddingVector seed_vec = embedder.embed(seed_text);

    const auto& all = kg.triplets();
    std::vector<char> emitted(all.size(), 0);
    std::vector<std::pair<std::size_t, double>> order;  // (triplet index, relevance)
    std::set<EntityId> visited = seeds;

    while (static_cast<int>(order.size()) < budget) {
        std::set<std::size_t> frontier;
        for (const auto& v : visited) {
            if (v == kg.root())
                continue;
            for (std::size_t idx : kg.outgoing(v))
                frontier.insert(idx);
            for (std::size_t idx : kg.incoming(v))
                frontier.insert(idx);
        }
        std::vector<std::pair<std::size_t, double>> scored;
        for (std::size_t idx : frontier) {
            const Triplet& t = all[idx];
            if (emitted[idx] || t.subject == kg.root() || t.object == kg.root())
                continue;
            double symbolic = 0.5 * (static_cast<double>(visited.count(t.subject)) +
                                     static_cast<double>(visited.count(t.object)));
            double semantic = clamp01(cosine(embedder.embed(kg.verbalize(t)), seed_vec));
            scored.emplace_back(idx, 0.5 * symbolic + 0.5 * semantic);
        }
        if (scored.empty())
            break;
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        std::set<EntityId> reached;
        for (const auto& [idx, rel] : scored) {
            if (static_cast<int>(order.size()) >= budget)
                break;
            emitted[idx] = 1;
            order.emplace_back(idx, rel);
            reached.insert(all[idx].subject);
            reached.insert(all[idx].object);
        }
        visited.insert(reached.begin(), reached.end());
    }

    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [idx, rel] : order)
        ev.triplets.push_back({all[idx], rel});
    ev.budget_used = static_cast<int>(ev.triplets.size());
    return ev;
}

SimMatch claim_triplet_match(std::string_view claim_text, const RetrievedEvidence& evidence,
                             const KnowledgeGraph& kg, const Embedder& embedder)
{
    SimMatch m;
    if (evidence.triplets.empty())
        return m;
    const EmbeddingVector claim_vec = embedder.embed(claim_text);
    for (std::size_t i = 0; i < evidence.triplets.size(); ++i) {
        double s = clamp01(cosine(claim_vec, embedder.embed(kg.verbalize(evidence.triplets[i].triplet))));
        if (!m.best || s > m.sim) {
            m.sim = s;
            m.best = i;
        }
    }
    return m;
}

double claim_triplet_sim(std::string_view claim_text, const RetrievedEvidence& evidence, const KnowledgeGraph& kg,
                         const Embedder& embedder)
{
    return claim_triplet_match(claim_text, evidence, kg, embedder).sim;
}

}  // namespace dxtrust
