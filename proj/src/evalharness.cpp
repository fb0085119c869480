#include "dxtrust/evalharness.hpp"

#include "dxtrust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace dxtrust {

std::vector<PredictionRecord> join_predictions(const std::vector<Dialogue>& corpus,
                                               const std::vector<DiagnosticHypothesis>& hypotheses,
                                               const std::vector<ConfidenceReport>& scores)
{
    std::unordered_map<std::string, const Dialogue*> by_id;
    for (const auto& d : corpus)
        by_id[d.id] = &d;
    std::unordered_map<std::string, double> dcs;
    for (const auto& s : scores)
        dcs[s.dialogue_id] = s.dcs;

    std::vector<PredictionRecord> out;
    std::size_t line = 0;
    for (const auto& h : hypotheses) {
        ++line;
        auto it = by_id.find(h.dialogue_id);
        if (it == by_id.end())
            throw SchemaError(line, "dialogue_id", "unknown dialogue " + h.dialogue_id);
        const Dialogue& d = *it->second;
        if (!d.silver_label)
            throw SchemaError(line, "silver_label", "dialogue " + d.id + " has no reference label");
        PredictionRecord r;
        r.dialogue_id = h.dialogue_id;
        r.predicted = h.final_diagnosis;
        r.reference = *d.silver_label;
        if (auto s = dcs.find(h.dialogue_id); s != dcs.end())
            r.dcs = s->second;
        r.prompting_mode = std::string(to_string(h.prompting_mode));
        r.age_years = d.age_years;
        r.gender = d.gender;
        out.push_back(std::move(r));
    }
    return out;
}

Metrics compute_metrics(const std::vector<PredictionRecord>& records, const std::vector<std::string>& declared_labels)
{
    if (records.empty())
        throw EmptyInput("no prediction records");
    std::set<std::string> declared(declared_labels.begin(), declared_labels.end());
    std::set<std::string> labels;
    Metrics m;
    m.total = records.size();
    int correct = 0;
    for (const auto& r : records) {
        for (const auto* l : {&r.predicted, &r.reference})
            if (!declared.empty() && !declared.count(*l))
                throw DomainError("label '" + *l + "' is not in the declared label set");
        labels.insert(r.predicted);
        labels.insert(r.reference);
        ++m.confusion[r.reference][r.predicted];
        correct += r.predicted == r.reference;
    }
    const double total = static_cast<double>(m.total);
    m.accuracy = correct / total;

    for (const auto& label : labels) {
        ClassMetrics c;
        c.label = label;
        for (const auto& r : records) {
            c.support += r.reference == label;
            c.predicted += r.predicted == label;
            c.true_positive += r.reference == label && r.predicted == label;
        }
        c.precision_undefined = c.predicted == 0;
        c.precision = c.predicted ? static_cast<double>(c.true_positive) / c.predicted : 0.0;
        c.recall = c.support ? static_cast<double>(c.true_positive) / c.support : 0.0;
        c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
        m.precision += c.support * c.precision;
        m.recall += c.support * c.recall;
        m.f1 += c.support * c.f1;
        m.per_class.push_back(std::move(c));
    }
    m.precision /= total;
    m.recall /= total;
    m.f1 /= total;
    return m;
}

DistributionSummary summarize(std::vector<double> values)
{
    DistributionSummary s;
    s.count = values.size();
    if (values.empty())
        return s;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(values.size() - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        std::size_t hi = std::min(lo + 1, values.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return values[lo] + (values[hi] - values[lo]) * frac;
    };
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.min = values.front();
    s.max = values.back();
    s.q25 = quantile(0.25);
    s.median = quantile(0.5);
    s.q75 = quantile(0.75);
    return s;
}

DcsByCorrectness dcs_by_correctness(const std::vector<PredictionRecord>& records)
{
    std::vector<std::string> missing;
    DcsByCorrectness out;
    for (const auto& r : records) {
        if (!r.dcs) {
            missing.push_back(r.dialogue_id);
            continue;
        }
        (r.predicted == r.reference ? out.correct_values : out.incorrect_values).push_back(*r.dcs);
    }
    if (!missing.empty())
        throw MissingScore(missing);
    std::sort(out.correct_values.begin(), out.correct_values.end());
    std::sort(out.incorrect_values.begin(), out.incorrect_values.end());
    out.correct = summarize(out.correct_values);
    out.incorrect = summarize(out.incorrect_values);
    return out;
}

std::vector<SubgroupRow> subgroup_accuracy(const std::vector<PredictionRecord>& records)
{
    if (records.empty())
        throw EmptyInput("no prediction records");
    std::map<AgeBucket, SubgroupRow> ages;
    std::map<std::string, SubgroupRow> genders;
    SubgroupRow unknown_gender{"gender", "unknown"};
    for (const auto& r : records) {
        bool ok = r.predicted == r.reference;
        AgeBucket b = bucket_age(r.age_years);
        SubgroupRow& a = ages[b];
        a.dimension = "age";
        a.group = std::string(to_string(b));
        ++a.count;
        a.correct += ok;
        SubgroupRow* g = &unknown_gender;
        if (r.gender && !r.gender->empty()) {
            g = &genders[*r.gender];
            g->dimension = "gender";
            g->group = *r.gender;
        }
        ++g->count;
        g->correct += ok;
    }
    std::vector<SubgroupRow> out;
    auto emit = [&out](SubgroupRow row) {
        if (row.count == 0)
            return;
        row.accuracy = static_cast<double>(row.correct) / row.count;
        out.push_back(std::move(row));
    };
    for (auto& [b, row] : ages)
        emit(row);
    for (auto& [g, row] : genders)
        emit(row);
    emit(unknown_gender);
    return out;
}

std::vector<AblationStats> ablation_sweep(const std::vector<ConfidenceReport>& corpus,
                                          const std::vector<double>& alpha_grid,
                                          const std::vector<double>& lambda_grid, const AblationDefaults& defaults)
{
    if (corpus.empty())
        throw EmptyInput("no scored cases");
    for (const auto* grid : {&alpha_grid, &lambda_grid})
        for (double v : *grid)
            if (!(v >= 0.0 && v <= 1.0))
                throw DomainError("ablation grid values must lie in [0, 1]");

    std::vector<AblationStats> out;
    for (double alpha : alpha_grid) {
        std::vector<double> dcs;
        for (const auto& r : corpus) {
            std::vector<double> weights;
            for (const auto& c : r.claims)
                weights.push_back(claim_weight(c.label, triplet_match_score(c.sim, c.epr, alpha)));
            double kas = kas_aggregate(weights, defaults.kas_mean_normalized);
            dcs.push_back(diagnosis_confidence_score(kas, r.lcs, defaults.lambda));
        }
        out.push_back({"alpha", alpha, summarize(std::move(dcs))});
    }
    for (double lambda : lambda_grid) {
        std::vector<double> dcs;
        for (const auto& r : corpus)
            dcs.push_back(diagnosis_confidence_score(r.kas, r.lcs, lambda));
        out.push_back({"lambda", lambda, summarize(std::move(dcs))});
    }
    return out;
}

}  // namespace dxtrust
