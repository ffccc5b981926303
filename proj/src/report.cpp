#include "codeshot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "codeshot/errors.hpp"

namespace codeshot {

using nlohmann::ordered_json;

std::string metric_variants_line() {
    return "bleu=sentence,4-gram,add-one-smoothing(n>=2),brevity-penalty; "
           "rouge_l=f-measure(beta=1); "
           "meteor=exact-match,alpha=0.9,beta=3,gamma=0.5,min-chunks";
}

double round3(double v) {
    return std::round(v * 1000.0) / 1000.0;
}

EvalReport make_report(ReportHeader header, const std::vector<std::string>& ids,
                       const EvalResult& result) {
    if (ids.size() != result.per_sample.size())
        throw ValidationError("id list and score list sizes differ");
    if (ids.empty()) throw EmptyInput("report without rows");

    EvalReport report;
    header.n = ids.size();
    header.metric_variants = metric_variants_line();
    report.header = std::move(header);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& s = result.per_sample[i];
        report.rows.push_back(
            {ids[i], {round3(s.bleu), round3(s.rouge_l), round3(s.meteor)}});
    }
    report.aggregate = {round3(result.mean.bleu), round3(result.mean.rouge_l),
                        round3(result.mean.meteor)};
    return report;
}

std::string report_to_string(const EvalReport& report) {
    std::ostringstream out;
    ordered_json header;
    header["type"] = "header";
    header["corpus"] = report.header.corpus;
    header["model"] = report.header.model;
    header["strategy"] = report.header.strategy;
    header["template"] = report.header.template_family;
    header["few_shot_layout"] = report.header.few_shot_layout;
    header["k"] = report.header.k;
    header["metrics"] = report.header.metric_variants;
    header["n"] = report.header.n;
    out << header.dump() << '\n';

    for (const auto& row : report.rows) {
        ordered_json obj;
        obj["type"] = "row";
        obj["id"] = row.id;
        obj["bleu"] = round3(row.score.bleu);
        obj["rouge_l"] = round3(row.score.rouge_l);
        obj["meteor"] = round3(row.score.meteor);
        out << obj.dump() << '\n';
    }

    ordered_json agg;
    agg["type"] = "aggregate";
    agg["bleu"] = round3(report.aggregate.bleu);
    agg["rouge_l"] = round3(report.aggregate.rouge_l);
    agg["meteor"] = round3(report.aggregate.meteor);
    agg["n"] = report.rows.size();
    out << agg.dump() << '\n';
    return out.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw ValidationError("cannot write report: " + path.string());
        out << report_to_string(report);
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

EvalReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open report: " + path.string());

    EvalReport report;
    bool saw_header = false, saw_aggregate = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedRecord(line_no, e.what());
        }
        const auto type = obj.value("type", "");
        if (type == "header") {
            report.header.corpus = obj.value("corpus", "");
            report.header.model = obj.value("model", "");
            report.header.strategy = obj.value("strategy", "");
            report.header.template_family = obj.value("template", "");
            report.header.few_shot_layout = obj.value("few_shot_layout", "");
            report.header.k = obj.value("k", 0);
            report.header.metric_variants = obj.value("metrics", "");
            report.header.n = obj.value("n", std::size_t{0});
            saw_header = true;
        } else if (type == "row") {
            ReportRow row;
            row.id = obj.at("id").get<std::string>();
            row.score.bleu = obj.at("bleu").get<double>();
            row.score.rouge_l = obj.at("rouge_l").get<double>();
            row.score.meteor = obj.at("meteor").get<double>();
            report.rows.push_back(std::move(row));
        } else if (type == "aggregate") {
            report.aggregate.bleu = obj.at("bleu").get<double>();
            report.aggregate.rouge_l = obj.at("rouge_l").get<double>();
            report.aggregate.meteor = obj.at("meteor").get<double>();
            saw_aggregate = true;
        } else {
            throw MalformedRecord(line_no, "unknown record type '" + type + "'");
        }
    }
    if (!saw_header) throw ValidationError("report lacks a header: " + path.string());
    if (!saw_aggregate)
        throw ValidationError("report lacks an aggregate row: " + path.string());
    if (report.rows.empty())
        throw ValidationError("report has no rows: " + path.string());
    return report;
}

// ---- Student's t ------------------------------------------------------------

namespace {

// Continued fraction for the regularized incomplete beta, Lentz's method.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double eps = 3.0e-14;
    constexpr double tiny = 1.0e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace

double students_t_two_sided_p(double t, int df) {
    if (df < 1) throw ValidationError("t-test needs at least 1 degree of freedom");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) throw ValidationError("t statistic is NaN");
    const double v = static_cast<double>(df);
    const double x = v / (v + t * t);
    return regularized_incomplete_beta(v / 2.0, 0.5, x);
}

PairedTTest paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ValidationError("paired samples have different lengths");
    if (a.size() < 2)
        throw ValidationError("paired t-test needs at least two pairs");

    const std::size_t n = a.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = b[i] - a[i];

    double mean = 0.0;
    for (double d : diff) mean += d;
    mean /= static_cast<double>(n);

    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    PairedTTest out;
    out.df = static_cast<int>(n) - 1;
    out.mean_diff = mean;
    if (sd == 0.0) {
        // All differences identical: no spread to test against. A flat zero
        // difference is indistinguishable from noise (p = 1); a flat nonzero
        // shift is as significant as it gets.
        out.t = mean == 0.0 ? 0.0
                            : std::numeric_limits<double>::infinity() *
                                  (mean > 0.0 ? 1.0 : -1.0);
        out.p = mean == 0.0 ? 1.0 : 0.0;
        return out;
    }
    out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    out.p = students_t_two_sided_p(out.t, out.df);
    return out;
}

// ---- comparison -------------------------------------------------------------

ComparisonResult compare_reports(const EvalReport& baseline,
                                 const EvalReport& contender) {
    std::map<std::string, MetricScore> base_rows, cont_rows;
    for (const auto& row : baseline.rows) base_rows[row.id] = row.score;
    for (const auto& row : contender.rows) cont_rows[row.id] = row.score;

    if (base_rows.size() != baseline.rows.size() ||
        cont_rows.size() != contender.rows.size())
        throw SampleSetMismatch("duplicate row ids");
    if (base_rows.size() != cont_rows.size())
        throw SampleSetMismatch(std::to_string(base_rows.size()) + " vs " +
                                std::to_string(cont_rows.size()) + " rows");
    for (const auto& [id, score] : base_rows)
        if (cont_rows.find(id) == cont_rows.end())
            throw SampleSetMismatch("sample " + id +
                                    " is missing from the contender");

    ComparisonResult result;
    result.baseline_label = baseline.header.strategy + "/" +
                            baseline.header.model;
    result.contender_label = contender.header.strategy + "/" +
                             contender.header.model;
    result.n = base_rows.size();

    const char* names[3] = {"bleu", "rouge_l", "meteor"};
    for (int m = 0; m < 3; ++m) {
        auto pick = [m](const MetricScore& s) {
            return m == 0 ? s.bleu : m == 1 ? s.rouge_l : s.meteor;
        };
        std::vector<double> base_vals, cont_vals;
        for (const auto& [id, score] : base_rows) {
            base_vals.push_back(pick(score));
            cont_vals.push_back(pick(cont_rows[id]));
        }
        MetricComparison cmp;
        cmp.metric = names[m];
        cmp.baseline = pick(baseline.aggregate);
        cmp.contender = pick(contender.aggregate);
        cmp.gain_pct = cmp.baseline == 0.0
                           ? 0.0
                           : (cmp.contender - cmp.baseline) / cmp.baseline * 100.0;
        cmp.test = paired_t_test(base_vals, cont_vals);
        result.metrics.push_back(std::move(cmp));
    }
    return result;
}

std::string comparison_to_string(const ComparisonResult& result) {
    std::ostringstream out;
    out << "baseline:  " << result.baseline_label << '\n';
    out << "contender: " << result.contender_label << '\n';
    out << "paired samples: " << result.n << "\n\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %10s %10s %9s %12s %12s\n",
                  "metric", "baseline", "contender", "gain%", "t", "p");
    out << line;
    for (const auto& m : result.metrics) {
        std::snprintf(line, sizeof line,
                      "%-8s %10.3f %10.3f %8.2f%% %12.4f %12.6g\n",
                      m.metric.c_str(), m.baseline, m.contender, m.gain_pct,
                      m.test.t, m.test.p);
        out << line;
    }
    return out.str();
}

} // namespace codeshot
