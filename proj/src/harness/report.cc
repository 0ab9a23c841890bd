#include "mdepose/harness/report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <sstream>
#include <tuple>

#include "mdepose/metrics/pose_metrics.h"
#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

namespace mdepose::harness {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kDepthHeader = "scene,provenance,level,alignment,abs_rel,delta1,count";

std::string group_of(const ReportInputs &in, const std::string &scene) {
    auto it = in.groups.find(scene);
    return it == in.groups.end() ? scene : it->second;
}

std::string maa_column(const std::string &group) { return "maa:" + group; }
std::string depth_column(const char *metric, const DepthSummary &d) {
    return std::string(metric) + ":" + d.level + "/" + d.alignment;
}

void rank_into(Report &report, const std::string &column, const std::map<MethodKey, double> &values,
               metrics::RankOrder order) {
    if (values.empty())
        return;
    std::vector<double> v;
    for (const auto &[m, x] : values)
        v.push_back(x);
    const auto ranks = metrics::rank_column(v, order);
    std::size_t i = 0;
    for (const auto &[m, x] : values)
        report.ranks[m][column] = ranks[i++];
    report.rank_columns.push_back(column);
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return buf;
}

} // namespace

std::vector<DepthMetricRow> read_depth_metrics_csv(const fs::path &path) {
    const std::string source = path.string();
    std::istringstream in(read_file(path));
    std::string line;
    std::uint64_t line_no = 0;
    std::vector<DepthMetricRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (line == kDepthHeader)
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 7)
            throw FormatError(source, FormatError::LineNumber{line_no}, "expected 7 fields");
        DepthMetricRow r{f[0], f[1], f[2], f[3]};
        auto num = [&](const std::string &t, auto &value) {
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw FormatError(source, FormatError::LineNumber{line_no}, "bad number '" + t + "'");
        };
        num(f[4], r.abs_rel);
        num(f[5], r.delta1);
        num(f[6], r.count);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_depth_metrics_csv(const std::vector<DepthMetricRow> &rows, const fs::path &path) {
    std::string out = std::string(kDepthHeader) + "\n";
    for (const auto &r : rows)
        out += r.scene + "," + r.provenance + "," + r.level + "," + r.alignment + "," + format_double(r.abs_rel) + "," +
               format_double(r.delta1) + "," + std::to_string(r.count) + "\n";
    write_file(path, out);
}

Report build_report(const ReportInputs &inputs) {
    Report report;
    report.metadata = inputs.metadata;

    std::map<std::tuple<std::string, std::string, std::string, std::string>, PairResult> rows;
    for (const auto &path : inputs.results) {
        for (auto &r : read_results_csv(path)) {
            auto key = std::make_tuple(r.scene, r.pair, r.estimator, r.provenance);
            if (!rows.emplace(key, r).second)
                throw Error(ErrorCode::kConfigError, "duplicate result row " + r.scene + "/" + r.pair + "/" +
                                                         r.estimator + "/" + r.provenance + " in " + path.string());
        }
    }
    if (rows.empty())
        throw Error(ErrorCode::kEmptyResults, "no result rows in the given files");

    // scene -> method -> errors
    std::map<std::string, std::map<MethodKey, std::vector<double>>> errors;
    std::map<std::string, std::map<MethodKey, std::size_t>> failures;
    for (const auto &[key, r] : rows) {
        const MethodKey m{r.estimator, r.provenance};
        errors[r.scene][m].push_back(r.status == PairStatus::kOk ? r.e_p : metrics::kFailureErrorDeg);
        failures[r.scene][m] += r.status != PairStatus::kOk;
    }

    std::map<MethodKey, std::map<std::string, std::vector<double>>> per_group;
    for (const auto &[scene, methods] : errors) {
        for (const auto &[m, errs] : methods) {
            SceneMaa s{scene, group_of(inputs, scene), m, errs.size(), failures[scene][m], metrics::maa(errs)};
            per_group[m][s.group].push_back(s.maa);
            report.scenes.push_back(std::move(s));
        }
    }
    std::set<std::string> all_groups;
    for (const auto &[m, groups] : per_group) {
        const auto agg = metrics::aggregate(groups);
        report.group_maa[m] = agg.group_means;
        report.overall_maa[m] = agg.overall;
        for (const auto &[g, v] : agg.group_means)
            all_groups.insert(g);
    }

    for (const auto &g : all_groups) {
        std::map<MethodKey, double> col;
        for (const auto &[m, groups] : report.group_maa)
            if (auto it = groups.find(g); it != groups.end())
                col[m] = it->second;
        rank_into(report, maa_column(g), col, metrics::RankOrder::kHigherIsBetter);
    }
    rank_into(report, maa_column("overall"), report.overall_maa, metrics::RankOrder::kHigherIsBetter);

    // Depth metrics: per (provenance, level, alignment), grouped like mAA.
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::map<std::string, std::vector<double>>,
                                                                          std::map<std::string, std::vector<double>>>>
        depth_groups;
    for (const auto &path : inputs.depth_metrics) {
        for (const auto &r : read_depth_metrics_csv(path)) {
            auto &[abs_rel, delta1] = depth_groups[{r.provenance, r.level, r.alignment}];
            abs_rel[group_of(inputs, r.scene)].push_back(r.abs_rel);
            delta1[group_of(inputs, r.scene)].push_back(r.delta1);
        }
    }
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> delta1_by_setting;
    for (const auto &[key, values] : depth_groups) {
        const auto &[prov, level, alignment] = key;
        DepthSummary d{prov, level, alignment, metrics::aggregate(values.first).overall,
                       metrics::aggregate(values.second).overall};
        delta1_by_setting[{level, alignment}][prov] = d.delta1;
        report.depth.push_back(d);
    }
    std::set<std::string> seen_columns;
    for (const auto &d : report.depth) {
        for (const auto &[metric, order] : {std::pair{"delta1", metrics::RankOrder::kHigherIsBetter},
                                            std::pair{"abs_rel", metrics::RankOrder::kLowerIsBetter}}) {
            const std::string column = depth_column(metric, d);
            if (!seen_columns.insert(column).second)
                continue;
            std::map<MethodKey, double> col;
            for (const auto &e : report.depth)
                if (e.level == d.level && e.alignment == d.alignment)
                    for (const auto &[m, v] : report.overall_maa)
                        if (m.provenance == e.provenance)
                            col[m] = std::string_view(metric) == "delta1" ? e.delta1 : e.abs_rel;
            rank_into(report, column, col, order);
        }
    }

    std::set<std::string> estimators;
    for (const auto &[m, v] : report.overall_maa)
        estimators.insert(m.estimator);
    for (const auto &[setting, by_prov] : delta1_by_setting) {
        for (const auto &est : estimators) {
            CorrelationBlock block{est, setting.first, setting.second};
            for (const auto &[prov, d1] : by_prov) {
                auto it = report.overall_maa.find(MethodKey{est, prov});
                if (it == report.overall_maa.end())
                    continue;
                block.provenances.push_back(prov);
                block.delta1.push_back(d1);
                block.maa.push_back(it->second);
            }
            if (block.provenances.empty())
                continue;
            try {
                block.fit = metrics::pearson_and_fit(block.delta1, block.maa);
            } catch (const Error &e) {
                if (e.code() != ErrorCode::kDegenerateInput)
                    throw;
            }
            report.correlations.push_back(std::move(block));
        }
    }
    return report;
}

std::string format_report_table(const Report &report) {
    std::vector<std::string> groups;
    for (const auto &[m, g] : report.group_maa)
        for (const auto &[name, v] : g)
            if (std::find(groups.begin(), groups.end(), name) == groups.end())
                groups.push_back(name);
    std::sort(groups.begin(), groups.end());

    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"estimator", "provenance"};
    for (const auto &g : groups)
        header.push_back(g);
    header.push_back("overall");
    header.push_back("rank");
    table.push_back(header);
    for (const auto &[m, overall] : report.overall_maa) {
        std::vector<std::string> row{m.estimator, m.provenance};
        const auto &gm = report.group_maa.at(m);
        for (const auto &g : groups) {
            auto it = gm.find(g);
            row.push_back(it == gm.end() ? "-" : pct(it->second));
        }
        row.push_back(pct(overall));
        row.push_back(std::to_string(report.ranks.at(m).at(maa_column("overall"))));
        table.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto &row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    std::string out = "mAA(10 deg) in %, 1-degree bins\n";
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t c = 0; c < table[r].size(); ++c) {
            const auto &cell = table[r][c];
            const std::string pad(width[c] - cell.size(), ' ');
            out += c < 2 ? cell + pad : pad + cell;
            out += c + 1 < table[r].size() ? "  " : "\n";
        }
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width)
                total += w + 2;
            out += std::string(total - 2, '-') + "\n";
        }
    }
    for (const auto &d : report.depth)
        out += "depth " + d.provenance + " (" + d.level + ", " + d.alignment + "): AbsRel " + pct(d.abs_rel) +
               "  delta1 " + pct(d.delta1) + "\n";
    for (const auto &c : report.correlations) {
        out += "delta1 vs mAA, " + c.estimator + " (" + c.level + ", " + c.alignment + "): ";
        if (c.fit) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "r = %.4f, mAA = %.4f * delta1 + %.4f", c.fit->r, c.fit->slope,
                          c.fit->intercept);
            out += buf;
        } else {
            out += "undefined (fewer than two distinct delta1 values)";
        }
        out += "\n";
    }
    return out;
}

void write_report(const Report &report, const fs::path &dir) {
    auto method_json = [](const MethodKey &m) { return json{{"estimator", m.estimator}, {"provenance", m.provenance}}; };

    json scenes = json::array();
    for (const auto &s : report.scenes) {
        json j = method_json(s.method);
        j["scene"] = s.scene;
        j["group"] = s.group;
        j["pairs"] = s.pairs;
        j["failures"] = s.failures;
        j["maa"] = s.maa;
        scenes.push_back(std::move(j));
    }
    json groups = json::array();
    json overall = json::array();
    for (const auto &[m, gm] : report.group_maa) {
        for (const auto &[g, v] : gm) {
            json j = method_json(m);
            j["group"] = g;
            j["maa"] = v;
            groups.push_back(std::move(j));
        }
        json j = method_json(m);
        j["maa"] = report.overall_maa.at(m);
        overall.push_back(std::move(j));
    }
    json ranks = json::array();
    for (const auto &[m, cols] : report.ranks) {
        json j = method_json(m);
        j["ranks"] = cols;
        ranks.push_back(std::move(j));
    }
    json depth = json::array();
    for (const auto &d : report.depth)
        depth.push_back({{"provenance", d.provenance},
                         {"level", d.level},
                         {"alignment", d.alignment},
                         {"abs_rel", d.abs_rel},
                         {"delta1", d.delta1}});
    json corr = json::array();
    for (const auto &c : report.correlations) {
        json j = {{"estimator", c.estimator}, {"level", c.level},  {"alignment", c.alignment},
                  {"provenances", c.provenances}, {"delta1", c.delta1}, {"maa", c.maa}};
        if (c.fit)
            j["fit"] = {{"r", c.fit->r}, {"slope", c.fit->slope}, {"intercept", c.fit->intercept}};
        else
            j["fit"] = nullptr;
        corr.push_back(std::move(j));
    }
    json doc = {{"schema", std::string(kReportSchema)},
                {"metadata", report.metadata},
                {"maa_definition", {{"threshold_deg", 10}, {"bins", "integer degrees 1..10, error < bin"}}},
                {"scenes", scenes},
                {"groups", groups},
                {"overall", overall},
                {"rank_columns", report.rank_columns},
                {"ranks", ranks},
                {"depth", depth},
                {"correlations", corr}};
    write_file(dir / "report.json", doc.dump(2) + "\n");

    std::string csv = "estimator,provenance,group,maa,rank\n";
    for (const auto &[m, gm] : report.group_maa) {
        for (const auto &[g, v] : gm)
            csv += m.estimator + "," + m.provenance + "," + g + "," + format_double(v) + "," +
                   std::to_string(report.ranks.at(m).at(maa_column(g))) + "\n";
        csv += m.estimator + "," + m.provenance + ",overall," + format_double(report.overall_maa.at(m)) + "," +
               std::to_string(report.ranks.at(m).at(maa_column("overall"))) + "\n";
    }
    write_file(dir / "report.csv", csv);
    write_file(dir / "report.txt", format_report_table(report));
}

} // namespace mdepose::harness
