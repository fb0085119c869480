#include "dxtrust/criteria.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"

#include <algorithm>
#include <fstream>

namespace dxtrust {

namespace {

int non_negative_int(const json& rec, const char* field, std::size_t line, std::optional<int> fallback)
{
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) {
        if (fallback)
            return *fallback;
        throw ParseError(line, std::string("missing field '") + field + "'");
    }
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw ParseError(line, std::string("field '") + field + "' must be a non-negative integer");
    return it->get<int>();
}

std::set<EntityId> id_set(const json& rec, const char* field, std::size_t line)
{
    std::set<EntityId> out;
    auto it = rec.find(field);
    if (it == rec.end())
        return out;
    if (!it->is_array())
        throw ParseError(line, std::string("field '") + field + "' must be an array");
    for (const auto& v : *it) {
        if (!v.is_string())
            throw ParseError(line, std::string("field '") + field + "' must hold strings");
        out.insert(v.get<std::string>());
    }
    return out;
}

int intersection_size(const std::set<EntityId>& a, const std::set<EntityId>& b)
{
    int n = 0;
    for (const auto& x : a)
        n += static_cast<int>(b.count(x));
    return n;
}

}  // namespace

void bind_criteria(DisorderCriteria& c, const KnowledgeGraph& kg)
{
    const Entity* d = kg.find(c.disorder);
    if (!d)
        throw IntegrityError("criteria reference unknown disorder " + c.disorder);
    if (d->kind != EntityKind::Disorder)
        throw IntegrityError("criteria subject " + c.disorder + " is not a Disorder");
    c.symptoms = kg.objects(c.disorder, Relation::HasSymptom);
    for (const auto& s : c.core_symptoms) {
        if (!kg.contains(s))
            throw IntegrityError("criteria for " + c.disorder + " reference unknown symptom " + s);
        if (!c.symptoms.count(s))
            throw IntegrityError("core symptom " + s + " is not a has_symptom neighbor of " + c.disorder);
    }
    for (const auto& x : c.exclusions) {
        const Entity* e = kg.find(x);
        if (!e)
            throw IntegrityError("criteria for " + c.disorder + " reference unknown exclusion " + x);
        if (e->kind != EntityKind::Exclusion)
            throw IntegrityError("criteria exclusion " + x + " is not an Exclusion entity");
    }
    if (c.min_core_count > static_cast<int>(c.core_symptoms.size()))
        throw IntegrityError("min_core_count exceeds core symptom count for " + c.disorder);
    if (c.min_symptom_count < c.min_core_count)
        throw IntegrityError("min_symptom_count below min_core_count for " + c.disorder);
}

CriteriaMap load_criteria(std::istream& in, const KnowledgeGraph& kg)
{
    auto records = read_jsonl(in, [](std::size_t line, const std::string& msg) { throw ParseError(line, msg); });
    CriteriaMap out;
    for (const auto& [line, rec] : records) {
        DisorderCriteria c;
        auto it = rec.find("disorder");
        if (it == rec.end() || !it->is_string())
            throw ParseError(line, "missing field 'disorder'");
        c.disorder = it->get<std::string>();
        c.min_symptom_count = non_negative_int(rec, "min_symptom_count", line, std::nullopt);
        c.min_core_count = non_negative_int(rec, "min_core_count", line, 1);
        c.core_symptoms = id_set(rec, "core_symptoms", line);
        c.exclusions = id_set(rec, "exclusions", line);
        if (auto d = rec.find("required_duration_days"); d != rec.end() && !d->is_null())
            c.required_duration_days = non_negative_int(rec, "required_duration_days", line, std::nullopt);
        if (auto s = rec.find("duration_strict"); s != rec.end()) {
            if (!s->is_boolean())
                throw ParseError(line, "field 'duration_strict' must be a boolean");
            c.duration_strict = s->get<bool>();
        }
        bind_criteria(c, kg);
        if (out.count(c.disorder))
            throw IntegrityError("duplicate criteria for " + c.disorder);
        out.emplace(c.disorder, std::move(c));
    }
    return out;
}

CriteriaMap load_criteria(const std::filesystem::path& path, const KnowledgeGraph& kg)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return load_criteria(in, kg);
}

RuleOutcome evaluate_rules(const DisorderCriteria& c, const std::set<EntityId>& present,
                           const std::set<EntityId>& active_exclusions, std::optional<int> duration_days)
{
    RuleOutcome r;
    r.disorder = c.disorder;
    r.matched_symptoms = intersection_size(present, c.symptoms);
    r.matched_core = intersection_size(present, c.core_symptoms);
    r.count_met = r.matched_symptoms >= c.min_symptom_count;
    r.core_met = r.matched_core >= c.min_core_count;
    r.exclusions_clear = intersection_size(active_exclusions, c.exclusions) == 0;
    if (!c.required_duration_days)
        r.duration_met = true;
    else if (!duration_days)
        r.duration_met = !c.duration_strict;
    else
        r.duration_met = *duration_days >= *c.required_duration_days;
    r.indicated = r.count_met && r.core_met && r.exclusions_clear && r.duration_met;
    return r;
}

std::string silver_label(const CriteriaMap& criteria, const KnowledgeGraph& /*kg*/,
                         const std::set<EntityId>& gold_symptoms, const std::set<EntityId>& gold_exclusions,
                         std::optional<int> duration_days)
{
    std::string best = kNoDiagnosis;
    int best_count = -1;
    // std::map iterates ids in lexicographic order, so strict > keeps the
    // smallest id among ties.
    for (const auto& [id, c] : criteria) {
        RuleOutcome r = evaluate_rules(c, gold_symptoms, gold_exclusions, duration_days);
        if (r.indicated && r.matched_symptoms > best_count) {
            best = id;
            best_count = r.matched_symptoms;
        }
    }
    return best;
}

std::set<EntityId> resolve_surface_forms(const KnowledgeGraph& kg, const std::vector<std::string>& forms,
                                         EntityKind kind, std::vector<std::string>* unresolved)
{
    std::set<EntityId> out;
    for (const auto& form : forms) {
        bool hit = false;
        if (const Entity* e = kg.find(form); e && e->kind == kind) {
            out.insert(e->id);
            continue;
        }
        for (const auto& id : kg.lookup(form)) {
            if (kg.at(id).kind == kind) {
                out.insert(id);
                hit = true;
            }
        }
        if (!hit && unresolved)
            unresolved->push_back(form);
    }
    return out;
}

}  // namespace dxtrust
