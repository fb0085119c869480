#include "dxtrust/claims.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dxtrust {

int cs(AttributionLabel label) noexcept
{
    switch (label) {
    case AttributionLabel::Attributable: return 2;
    case AttributionLabel::Extrapolatory: return 1;
    case AttributionLabel::Contradictory: return -1;
    case AttributionLabel::NoAttribution: return 0;
    }
    return 0;
}

std::string_view to_string(AttributionLabel label)
{
    switch (label) {
    case AttributionLabel::Attributable: return "Attributable";
    case AttributionLabel::Extrapolatory: return "Extrapolatory";
    case AttributionLabel::Contradictory: return "Contradictory";
    case AttributionLabel::NoAttribution: return "NoAttribution";
    }
    return "NoAttribution";
}

std::optional<AttributionLabel> parse_attribution_label(std::string_view text)
{
    std::string n = normalize(text);
    auto is = [&n](std::string_view label) {
        return n == label || (n.size() > label.size() && n.compare(0, label.size(), label) == 0 &&
                              n[label.size()] == ' ');
    };
    if (is("attributable"))
        return AttributionLabel::Attributable;
    if (is("extrapolatory"))
        return AttributionLabel::Extrapolatory;
    if (is("contradictory"))
        return AttributionLabel::Contradictory;
    if (is("no attribution") || is("noattribution"))
        return AttributionLabel::NoAttribution;
    return std::nullopt;
}

void ScoringConfig::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("alpha must lie in [0, 1]");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda must lie in [0, 1]");
    if (retrieval_budget < 0)
        throw DomainError("retrieval budget must be >= 0");
}

std::vector<std::string> split_sentences(std::string_view text)
{
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        std::string t = trim(current);
        if (!t.empty())
            out.push_back(std::move(t));
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\n' || c == '\r') {
            flush();
            continue;
        }
        current += c;
        if (c == '.' || c == '!' || c == '?') {
            bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
            if (boundary)
                flush();
        }
    }
    flush();
    return out;
}

namespace {

std::string strip_bullet(std::string_view line)
{
    std::string t = trim(line);
    std::size_t i = 0;
    while (i < t.size() && (t[i] == '-' || t[i] == '*' || t[i] == ' '))
        ++i;
    std::size_t j = i;
    while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j])))
        ++j;
    if (j > i && j < t.size() && (t[j] == '.' || t[j] == ')'))
        i = j + 1;
    return trim(std::string_view(t).substr(i));
}

std::string render_evidence(const RetrievedEvidence& evidence, const KnowledgeGraph& kg)
{
    if (evidence.triplets.empty())
        return "(no triplets retrieved)";
    std::string out;
    for (const auto& st : evidence.triplets) {
        out += "- ";
        out += kg.verbalize(st.triplet);
        out += '\n';
    }
    return out;
}

ChatRequest make_request(const ClaimPrompting& p, const std::string& system, const std::string& user)
{
    ChatRequest req;
    req.system_text = system;
    req.messages.push_back({"user", user});
    req.model = p.model;
    req.seed = p.seed;
    return req;
}

}  // namespace

std::vector<Claim> decompose_claims(std::string_view reasoning, const KnowledgeGraph& kg,
                                    const ClaimPrompting& prompting)
{
    if (trim(reasoning).empty())
        throw EmptyReasoning();

    std::vector<std::string> pieces;
    if (prompting.provider) {
        if (!prompting.templates)
            throw DomainError("provider-mode decomposition needs prompt templates");
        std::map<std::string, std::string> vars{{"reasoning", std::string(reasoning)}};
        ChatRequest req = make_request(prompting, prompting.templates->render("decompose_system", vars),
                                       prompting.templates->render("decompose_user", vars));
        for (const auto& line : split_lines(prompting.provider->complete(req))) {
            std::string claim = strip_bullet(line);
            if (!claim.empty())
                pieces.push_back(std::move(claim));
        }
    } else {
        pieces = split_sentences(reasoning);
    }

    std::vector<Claim> claims;
    claims.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        Claim c;
        c.id = static_cast<int>(i);
        c.text = std::move(pieces[i]);
        c.entities = extract_entities(c.text, kg);
        claims.push_back(std::move(c));
    }
    return claims;
}

AttributionLabel classify_symbolic(const Claim& claim, const RetrievedEvidence& evidence, const KnowledgeGraph& kg)
{
    const std::vector<std::string> toks = tokens(claim.text);
    const std::vector<EntityMention> mentions = find_mentions(toks, kg);

    std::vector<char> inside(toks.size(), 0);
    for (const auto& m : mentions)
        for (std::size_t i = m.begin; i < m.end; ++i)
            inside[i] = 1;
    std::vector<std::size_t> negations;
    for (std::size_t i = 0; i < toks.size(); ++i)
        if (!inside[i] && std::find(std::begin(kNegationTokens), std::end(kNegationTokens), toks[i]) !=
                              std::end(kNegationTokens))
            negations.push_back(i);

    std::set<EntityId> mentioned;
    std::set<EntityId> negated;
    for (const auto& m : mentions) {
        mentioned.insert(m.id);
        for (std::size_t n : negations)
            if (n < m.begin && m.begin - n <= kNegationWindow)
                negated.insert(m.id);
    }
    // Entities supplied by the caller (e.g. a provider-backed extractor)
    // count as plain, non-negated mentions.
    for (const auto& e : claim.entities)
        mentioned.insert(e);

    for (const auto& st : evidence.triplets) {
        const Triplet& t = st.triplet;
        if (mentioned.count(t.subject) && mentioned.count(t.object) && !negated.count(t.subject) &&
            !negated.count(t.object))
            return AttributionLabel::Attributable;
    }
    const std::set<EntityId> ev = evidence.entities();
    for (const auto& e : negated)
        if (ev.count(e))
            return AttributionLabel::Contradictory;
    for (const auto& e : mentioned)
        if (ev.count(e))
            return AttributionLabel::Extrapolatory;
    return AttributionLabel::NoAttribution;
}

AttributionLabel classify_attribution(const Claim& claim, const RetrievedEvidence& evidence,
                                      const KnowledgeGraph& kg, const ClaimPrompting& prompting)
{
    if (!prompting.provider)
        return classify_symbolic(claim, evidence, kg);
    if (!prompting.templates)
        throw DomainError("provider-mode classification needs prompt templates");

    std::map<std::string, std::string> vars{{"claim", claim.text}, {"evidence", render_evidence(evidence, kg)}};
    ChatRequest req = make_request(prompting, prompting.templates->render("classify_system", vars),
                                   prompting.templates->render("classify_user", vars));
    std::string response = prompting.provider->complete(req);
    auto first_line = [](const std::string& text) {
        for (const auto& line : split_lines(text))
            if (!trim(line).empty())
                return trim(line);
        return std::string();
    };
    if (auto label = parse_attribution_label(first_line(response)))
        return *label;

    req.messages.push_back({"assistant", response});
    req.messages.push_back({"user", prompting.templates->render("classify_repair", {{"response", response}})});
    std::string repaired = prompting.provider->complete(req);
    if (auto label = parse_attribution_label(first_line(repaired)))
        return *label;
    throw UnparsableLabel(repaired);
}

double entity_pr(const std::set<EntityId>& claim_entities, const std::set<EntityId>& evidence_entities)
{
    std::size_t common = 0;
    for (const auto& e : claim_entities)
        common += evidence_entities.count(e);
    double precision = claim_entities.empty() ? 1.0
                                              : static_cast<double>(common) / static_cast<double>(claim_entities.size());
    double recall = evidence_entities.empty()
                        ? 1.0
                        : static_cast<double>(common) / static_cast<double>(evidence_entities.size());
    if (precision == 0.0 && recall == 0.0)
        return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double triplet_match_score(double sim, double epr, double alpha)
{
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(sim) || !in_unit(epr) || !in_unit(alpha))
        throw DomainError("triplet_match_score inputs must lie in [0, 1]");
    return alpha * sim + (1.0 - alpha) * epr;
}

double claim_weight(AttributionLabel label, double tms)
{
    return static_cast<double>(cs(label)) * tms;
}

double sigmoid(double x) noexcept
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double kas_aggregate(std::span<const double> weights, bool mean_normalized)
{
    // Summing in sorted order makes the result independent of claim order.
    std::vector<double> sorted(weights.begin(), weights.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double w : sorted)
        sum += w;
    if (mean_normalized && !weights.empty())
        sum /= static_cast<double>(weights.size());
    return sigmoid(sum);
}

ClaimScore score_claim(const Claim& claim, AttributionLabel label, const RetrievedEvidence& evidence,
                       const KnowledgeGraph& kg, const Embedder& embedder, double alpha)
{
    ClaimScore s;
    s.claim_id = claim.id;
    s.text = claim.text;
    s.label = label;
    SimMatch m = claim_triplet_match(claim.text, evidence, kg, embedder);
    s.sim = m.sim;
    std::set<EntityId> matched;
    if (m.best) {
        const Triplet& t = evidence.triplets[*m.best].triplet;
        matched = {t.subject, t.object};
    }
    s.epr = entity_pr(claim.entities, matched);
    s.tms = triplet_match_score(s.sim, s.epr, alpha);
    s.weight = claim_weight(label, s.tms);
    return s;
}

}  // namespace dxtrust
