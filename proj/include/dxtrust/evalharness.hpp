#pragma once

#include "dxtrust/claims.hpp"
#include "dxtrust/confidence.hpp"
#include "dxtrust/datasets.hpp"
#include "dxtrust/egdr.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dxtrust {

struct PredictionRecord {
    std::string dialogue_id;
    std::string predicted;
    std::string reference;
    std::optional<double> dcs;
    std::string prompting_mode;
    std::optional<int> age_years;
    std::optional<std::string> gender;
};

/// Joins hypotheses with the silver labels and demographics of their
/// dialogues, and with DCS values when scores are given. Throws SchemaError
/// for a hypothesis whose dialogue is unknown or has no silver label.
std::vector<PredictionRecord> join_predictions(const std::vector<Dialogue>& corpus,
                                               const std::vector<DiagnosticHypothesis>& hypotheses,
                                               const std::vector<ConfidenceReport>& scores = {});

struct ClassMetrics {
    std::string label;
    int support = 0;    // reference count
    int predicted = 0;  // prediction count
    int true_positive = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    /// No predictions of this class; precision reported as 0.
    bool precision_undefined = false;
};

struct Metrics {
    std::size_t total = 0;
    double accuracy = 0.0;
    // Support-weighted averages over the per-class table.
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<ClassMetrics> per_class;  // sorted by label
    /// confusion[reference][predicted] = count
    std::map<std::string, std::map<std::string, int>> confusion;
};

/// Throws EmptyInput for no records and DomainError for a label outside
/// `declared_labels` (when given).
Metrics compute_metrics(const std::vector<PredictionRecord>& records,
                        const std::vector<std::string>& declared_labels = {});

struct DistributionSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // sample (n-1); 0 below two values
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

/// Quantiles by linear interpolation between order statistics. An empty
/// sample yields all zeros.
DistributionSummary summarize(std::vector<double> values);

struct DcsByCorrectness {
    DistributionSummary correct;
    DistributionSummary incorrect;
    std::vector<double> correct_values;    // sorted
    std::vector<double> incorrect_values;  // sorted
};

/// Throws MissingScore naming every record without a DCS.
DcsByCorrectness dcs_by_correctness(const std::vector<PredictionRecord>& records);

struct SubgroupRow {
    std::string dimension;  // "age" or "gender"
    std::string group;
    int count = 0;
    int correct = 0;
    double accuracy = 0.0;
};

/// Age rows follow bucket order, gender rows sort by name; missing values
/// form an "unknown" row. Throws EmptyInput.
std::vector<SubgroupRow> subgroup_accuracy(const std::vector<PredictionRecord>& records);

struct AblationStats {
    std::string parameter;  // "alpha" or "lambda"
    double value = 0.0;
    DistributionSummary dcs;
};

struct AblationDefaults {
    double alpha = 0.5;
    double lambda = 0.75;
    bool kas_mean_normalized = false;
};

/// Alpha rows recompute TMS, weights and KAS from each report's cached
/// (sim, epr, label) with labels held fixed, then DCS at the default lambda.
/// Lambda rows recompute DCS from the stored KAS and LCS. Throws EmptyInput
/// and DomainError for grid values outside [0, 1].
std::vector<AblationStats> ablation_sweep(const std::vector<ConfidenceReport>& corpus,
                                          const std::vector<double>& alpha_grid,
                                          const std::vector<double>& lambda_grid,
                                          const AblationDefaults& defaults = {});

/// Everything a report can render; absent parts are skipped.
struct ReportResults {
    std::optional<Metrics> metrics;
    std::optional<DcsByCorrectness> dcs;
    std::vector<SubgroupRow> subgroups;
    std::vector<AblationStats> ablation;
};

nlohmann::json to_json(const ReportResults& r);
ReportResults results_from_json(const nlohmann::json& j);

inline constexpr int kHistogramBins = 20;

/// Counts per bin over [0, 1]; 1.0 falls in the last bin and values
/// outside the range are clamped to the edge bins.
std::vector<int> histogram_counts(const std::vector<double>& values, int bins = kHistogramBins);

std::string render_histogram_svg(const std::vector<double>& values, const std::string& title);

/// Writes results.json (format "json"), tables (format "csv": metrics.csv,
/// subgroups.csv, ablation.csv) and histograms (format "svg":
/// dcs_correct.svg, dcs_incorrect.svg) into `out_dir`. Returns the written
/// paths in write order. Throws IoError and UsageError for an unknown format.
std::vector<std::filesystem::path> emit_report(const ReportResults& results, const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& formats);

}  // namespace dxtrust
