#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "codeshot/metrics.hpp"

namespace codeshot {

// Self-describing evaluation report: a header naming the run configuration
// and the metric variants, one row of rounded scores per test sample, and
// an aggregate row. Serialized as JSON lines with no timestamps, so a rerun
// of the same inputs is byte-identical.
struct ReportHeader {
    std::string corpus;
    std::string model;
    std::string strategy;
    std::string template_family;
    std::string few_shot_layout;
    int k = 0;
    std::string metric_variants;
    std::size_t n = 0;
};

struct ReportRow {
    std::string id;
    MetricScore score;
};

struct EvalReport {
    ReportHeader header;
    std::vector<ReportRow> rows;
    MetricScore aggregate;
};

// Canonical description of the metric variants, stamped into headers.
std::string metric_variants_line();

// Round to 3 decimals, ties away from zero; applied to every stored score.
double round3(double v);

EvalReport make_report(ReportHeader header, const std::vector<std::string>& ids,
                       const EvalResult& result);

void write_report(const EvalReport& report, const std::filesystem::path& path);
std::string report_to_string(const EvalReport& report);
EvalReport read_report(const std::filesystem::path& path);

// ---- paired comparison ----------------------------------------------------

// Two-sided p-value of Student's t with the given degrees of freedom,
// computed through the regularized incomplete beta function.
double students_t_two_sided_p(double t, int df);

struct PairedTTest {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
    double mean_diff = 0.0;
};

// Paired two-sided Student's t-test over per-sample differences b[i] - a[i].
// Needs at least two pairs. A zero-variance, zero-mean difference yields
// t = 0, p = 1; a zero-variance nonzero shift yields p = 0.
PairedTTest paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b);

struct MetricComparison {
    std::string metric;
    double baseline = 0.0;
    double contender = 0.0;
    double gain_pct = 0.0; // (contender - baseline) / baseline * 100
    PairedTTest test;
};

struct ComparisonResult {
    std::string baseline_label;
    std::string contender_label;
    std::size_t n = 0;
    std::vector<MetricComparison> metrics; // bleu, rouge_l, meteor
};

// Compares two reports row-by-row. Both must cover exactly the same sample
// ids; rows are matched by id, not by position.
ComparisonResult compare_reports(const EvalReport& baseline,
                                 const EvalReport& contender);

std::string comparison_to_string(const ComparisonResult& result);

} // namespace codeshot
