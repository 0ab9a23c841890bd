#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdepose/harness/evaluate.h"
#include "mdepose/metrics/statistics.h"

namespace mdepose::harness {

inline constexpr std::string_view kReportSchema = "mdepose-report/1";

// One method column of the benchmark: an estimator fed with one provenance.
struct MethodKey {
    std::string estimator;
    std::string provenance;
    auto operator<=>(const MethodKey &) const = default;
};

struct SceneMaa {
    std::string scene;
    std::string group;
    MethodKey method;
    std::size_t pairs = 0;
    std::size_t failures = 0;
    double maa = 0.0;
};

// Row of a depth-metrics CSV (`scene,provenance,level,alignment,abs_rel,delta1,count`).
struct DepthMetricRow {
    std::string scene;
    std::string provenance;
    std::string level;
    std::string alignment;
    double abs_rel = 0.0;
    double delta1 = 0.0;
    std::size_t count = 0;
};

struct DepthSummary {
    std::string provenance;
    std::string level;
    std::string alignment;
    double abs_rel = 0.0;
    double delta1 = 0.0;
};

struct CorrelationBlock {
    std::string estimator;
    std::string level;
    std::string alignment;
    std::vector<std::string> provenances;
    std::vector<double> delta1;
    std::vector<double> maa;
    std::optional<metrics::LinearFit> fit;
};

struct Report {
    std::map<std::string, std::string> metadata;
    std::vector<SceneMaa> scenes;
    // method -> group -> mean of scene mAA
    std::map<MethodKey, std::map<std::string, double>> group_maa;
    std::map<MethodKey, double> overall_maa;
    std::vector<std::string> rank_columns;
    std::map<MethodKey, std::map<std::string, int>> ranks;
    std::vector<DepthSummary> depth;
    std::vector<CorrelationBlock> correlations;
};

struct ReportInputs {
    std::vector<std::filesystem::path> results;
    // scene -> group; scenes not listed form their own group.
    std::map<std::string, std::string> groups;
    std::vector<std::filesystem::path> depth_metrics;
    std::map<std::string, std::string> metadata;
};

// Throws Error(kEmptyResults) when no result rows are found.
Report build_report(const ReportInputs &inputs);

std::vector<DepthMetricRow> read_depth_metrics_csv(const std::filesystem::path &path);
void write_depth_metrics_csv(const std::vector<DepthMetricRow> &rows, const std::filesystem::path &path);

// report.json, report.csv and report.txt in `dir`.
void write_report(const Report &report, const std::filesystem::path &dir);
std::string format_report_table(const Report &report);

} // namespace mdepose::harness
