#include "dxtrust/errors.hpp"
#include "dxtrust/evalharness.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>
#include <cmath>

namespace dxtrust {

namespace {

constexpr const char* kAveraging = "support-weighted";
constexpr const char* kAblationNote =
    "alpha rows hold attribution labels fixed and recompute TMS and KAS from cached sim and EPR";

json summary_json(const DistributionSummary& s)
{
    return json{{"count", s.count}, {"mean", s.mean},     {"std_dev", s.std_dev}, {"min", s.min},
                {"q25", s.q25},     {"median", s.median}, {"q75", s.q75},         {"max", s.max}};
}

DistributionSummary summary_from_json(const json& j)
{
    DistributionSummary s;
    s.count = j.at("count").get<std::size_t>();
    s.mean = j.at("mean").get<double>();
    s.std_dev = j.at("std_dev").get<double>();
    s.min = j.at("min").get<double>();
    s.q25 = j.at("q25").get<double>();
    s.median = j.at("median").get<double>();
    s.q75 = j.at("q75").get<double>();
    s.max = j.at("max").get<double>();
    return s;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double v)
{
    return format_fixed(v, 6);
}

std::string metrics_csv(const Metrics& m)
{
    std::string out = "scope,label,support,predicted,precision,recall,f1,precision_undefined,averaging\n";
    for (const auto& c : m.per_class)
        out += "class," + csv_field(c.label) + "," + std::to_string(c.support) + "," + std::to_string(c.predicted) +
               "," + num(c.precision) + "," + num(c.recall) + "," + num(c.f1) + "," +
               (c.precision_undefined ? "1" : "0") + ",\n";
    out += "overall,," + std::to_string(m.total) + "," + std::to_string(m.total) + "," + num(m.precision) + "," +
           num(m.recall) + "," + num(m.f1) + ",," + kAveraging + "\n";
    out += "accuracy,," + std::to_string(m.total) + ",," + num(m.accuracy) + ",,,,\n";
    return out;
}

std::string subgroups_csv(const std::vector<SubgroupRow>& rows)
{
    std::string out = "dimension,group,count,correct,accuracy\n";
    for (const auto& r : rows)
        out += r.dimension + "," + csv_field(r.group) + "," + std::to_string(r.count) + "," +
               std::to_string(r.correct) + "," + num(r.accuracy) + "\n";
    return out;
}

std::string ablation_csv(const std::vector<AblationStats>& rows)
{
    std::string out = "parameter,value,count,mean,std_dev,min,q25,median,q75,max\n";
    for (const auto& r : rows) {
        const auto& s = r.dcs;
        out += r.parameter + "," + num(r.value) + "," + std::to_string(s.count) + "," + num(s.mean) + "," +
               num(s.std_dev) + "," + num(s.min) + "," + num(s.q25) + "," + num(s.median) + "," + num(s.q75) +
               "," + num(s.max) + "\n";
    }
    return out;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

json to_json(const ReportResults& r)
{
    json j = json::object();
    if (r.metrics) {
        const Metrics& m = *r.metrics;
        json per_class = json::array();
        for (const auto& c : m.per_class)
            per_class.push_back(json{{"label", c.label},
                                     {"support", c.support},
                                     {"predicted", c.predicted},
                                     {"true_positive", c.true_positive},
                                     {"precision", c.precision},
                                     {"recall", c.recall},
                                     {"f1", c.f1},
                                     {"precision_undefined", c.precision_undefined}});
        j["metrics"] = json{{"total", m.total},       {"accuracy", m.accuracy}, {"precision", m.precision},
                            {"recall", m.recall},     {"f1", m.f1},             {"averaging", kAveraging},
                            {"per_class", per_class}, {"confusion", m.confusion}};
    }
    if (r.dcs)
        j["dcs_by_correctness"] = json{{"correct", summary_json(r.dcs->correct)},
                                       {"incorrect", summary_json(r.dcs->incorrect)},
                                       {"correct_values", r.dcs->correct_values},
                                       {"incorrect_values", r.dcs->incorrect_values}};
    if (!r.subgroups.empty()) {
        json rows = json::array();
        for (const auto& s : r.subgroups)
            rows.push_back(json{{"dimension", s.dimension},
                                {"group", s.group},
                                {"count", s.count},
                                {"correct", s.correct},
                                {"accuracy", s.accuracy}});
        j["subgroups"] = rows;
    }
    if (!r.ablation.empty()) {
        json rows = json::array();
        for (const auto& a : r.ablation)
            rows.push_back(json{{"parameter", a.parameter}, {"value", a.value}, {"dcs", summary_json(a.dcs)}});
        j["ablation"] = rows;
        j["ablation_note"] = kAblationNote;
    }
    return j;
}

ReportResults results_from_json(const json& j)
{
    ReportResults r;
    try {
        if (auto it = j.find("metrics"); it != j.end()) {
            Metrics m;
            m.total = it->at("total").get<std::size_t>();
            m.accuracy = it->at("accuracy").get<double>();
            m.precision = it->at("precision").get<double>();
            m.recall = it->at("recall").get<double>();
            m.f1 = it->at("f1").get<double>();
            for (const auto& c : it->at("per_class"))
                m.per_class.push_back({c.at("label").get<std::string>(), c.at("support").get<int>(),
                                       c.at("predicted").get<int>(), c.at("true_positive").get<int>(),
                                       c.at("precision").get<double>(), c.at("recall").get<double>(),
                                       c.at("f1").get<double>(), c.at("precision_undefined").get<bool>()});
            m.confusion = it->at("confusion").get<std::map<std::string, std::map<std::string, int>>>();
            r.metrics = std::move(m);
        }
        if (auto it = j.find("dcs_by_correctness"); it != j.end()) {
            DcsByCorrectness d;
            d.correct = summary_from_json(it->at("correct"));
            d.incorrect = summary_from_json(it->at("incorrect"));
            d.correct_values = it->at("correct_values").get<std::vector<double>>();
            d.incorrect_values = it->at("incorrect_values").get<std::vector<double>>();
            r.dcs = std::move(d);
        }
        if (auto it = j.find("subgroups"); it != j.end())
            for (const auto& s : *it)
                r.subgroups.push_back({s.at("dimension").get<std::string>(), s.at("group").get<std::string>(),
                                       s.at("count").get<int>(), s.at("correct").get<int>(),
                                       s.at("accuracy").get<double>()});
        if (auto it = j.find("ablation"); it != j.end())
            for (const auto& a : *it)
                r.ablation.push_back({a.at("parameter").get<std::string>(), a.at("value").get<double>(),
                                      summary_from_json(a.at("dcs"))});
    } catch (const json::exception& e) {
        throw SchemaError(0, "<results>", e.what());
    }
    return r;
}

std::vector<int> histogram_counts(const std::vector<double>& values, int bins)
{
    if (bins <= 0)
        throw DomainError("histogram needs at least one bin");
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        double c = std::clamp(v, 0.0, 1.0);
        int b = std::min(bins - 1, static_cast<int>(std::floor(c * bins)));
        ++counts[static_cast<std::size_t>(b)];
    }
    return counts;
}

std::string render_histogram_svg(const std::vector<double>& values, const std::string& title)
{
    constexpr int width = 640, height = 360;
    constexpr int left = 50, right = 20, top = 40, bottom = 50;
    constexpr int plot_w = width - left - right, plot_h = height - top - bottom;
    const std::vector<int> counts = histogram_counts(values);
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const double bar_w = static_cast<double>(plot_w) / kHistogramBins;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
           "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + xml_escape(title) + " (n=" + std::to_string(values.size()) + ")</text>\n";
    for (int i = 0; i < kHistogramBins; ++i) {
        int c = counts[static_cast<std::size_t>(i)];
        if (c == 0)
            continue;
        double h = static_cast<double>(plot_h) * c / peak;
        svg += "<rect x=\"" + format_fixed(left + i * bar_w, 2) + "\" y=\"" + format_fixed(top + plot_h - h, 2) +
               "\" width=\"" + format_fixed(bar_w - 1.0, 2) + "\" height=\"" + format_fixed(h, 2) +
               "\" fill=\"#4c72b0\"><title>" + format_fixed(i * 0.05, 2) + "-" + format_fixed((i + 1) * 0.05, 2) +
               ": " + std::to_string(c) + "</title></rect>\n";
    }
    const int axis_y = top + plot_h;
    svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(axis_y) + "\" x2=\"" +
           std::to_string(left + plot_w) + "\" y2=\"" + std::to_string(axis_y) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top) + "\" x2=\"" +
           std::to_string(left) + "\" y2=\"" + std::to_string(axis_y) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double x = left + plot_w * t / 4.0;
        svg += "<text x=\"" + format_fixed(x, 2) + "\" y=\"" + std::to_string(axis_y + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + format_fixed(t / 4.0, 2) +
               "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" + std::to_string(top + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + std::to_string(peak) +
           "</text>\n";
    svg += "<text x=\"" + std::to_string(left + plot_w / 2) + "\" y=\"" + std::to_string(height - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">DCS</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> emit_report(const ReportResults& results, const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& formats)
{
    for (const auto& f : formats)
        if (f != "json" && f != "csv" && f != "svg")
            throw UsageError("unknown report format '" + f + "' (expected json, csv or svg)");
    auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };

    std::vector<std::filesystem::path> written;
    auto write = [&](const char* name, const std::string& content) {
        auto path = out_dir / name;
        write_text_file(path, content);
        written.push_back(path);
    };
    if (wants("json"))
        write("results.json", to_json(results).dump(2) + "\n");
    if (wants("csv")) {
        if (results.metrics)
            write("metrics.csv", metrics_csv(*results.metrics));
        if (!results.subgroups.empty())
            write("subgroups.csv", subgroups_csv(results.subgroups));
        if (!results.ablation.empty())
            write("ablation.csv", ablation_csv(results.ablation));
    }
    if (wants("svg") && results.dcs) {
        write("dcs_correct.svg", render_histogram_svg(results.dcs->correct_values, "DCS, correct diagnoses"));
        write("dcs_incorrect.svg", render_histogram_svg(results.dcs->incorrect_values, "DCS, incorrect diagnoses"));
    }
    return written;
}

}  // namespace dxtrust
