// mdepose: command-line front end of the depth-to-pose benchmark.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mdepose/harness/config.h"
#include "mdepose/harness/depth_eval.h"
#include "mdepose/harness/evaluate.h"
#include "mdepose/harness/report.h"
#include "mdepose/harness/selfcheck.h"
#include "mdepose/synthetic/emit.h"
#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

#ifndef MDEPOSE_VERSION
#define MDEPOSE_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace mdepose;
using nlohmann::json;

namespace {

struct CommonOverrides {
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
};

harness::BenchmarkConfig load(const std::string &path, const CommonOverrides &o) {
    auto config = harness::load_config(path);
    if (o.output)
        config.output_dir = *o.output;
    return config;
}

std::vector<EstimatorId> parse_estimators(const std::vector<std::string> &names) {
    std::vector<EstimatorId> ids;
    for (const auto &n : names) {
        const auto id = parse_estimator_id(n);
        if (!id)
            throw Error(ErrorCode::kConfigError, "unknown estimator '" + n + "'");
        ids.push_back(*id);
    }
    return ids;
}

std::optional<metrics::DepthAlignment> parse_alignment(const std::string &s) {
    if (s == "none")
        return metrics::DepthAlignment::kNone;
    if (s == "scale")
        return metrics::DepthAlignment::kScale;
    if (s == "affine")
        return metrics::DepthAlignment::kAffine;
    return std::nullopt;
}

int cmd_sample_pairs(const std::string &config_path, const CommonOverrides &o, std::optional<std::size_t> count,
                     std::optional<double> min_overlap) {
    auto config = load(config_path, o);
    if (o.seed)
        config.pairs.seed = *o.seed;
    if (count)
        config.pairs.count = *count;
    if (min_overlap)
        config.pairs.min_overlap = *min_overlap;
    config.validate(false);
    const auto outcome = harness::sample_all_pairs(config);
    for (const auto &f : outcome.failures)
        std::cerr << "failed: " << f << "\n";
    return outcome.failures.empty() ? 0 : 1;
}

int cmd_evaluate(const std::string &config_path, const CommonOverrides &o, int jobs,
                 const std::vector<std::string> &estimators) {
    auto config = load(config_path, o);
    if (o.seed)
        config.seed = *o.seed;
    if (!estimators.empty())
        config.estimators = parse_estimators(estimators);
    config.validate(true);

    const auto results = harness::evaluate(config, {jobs});
    const fs::path out = config.output_dir / "results.csv";
    harness::write_results_csv(results, out);
    const json run = {{"schema", "mdepose-run/1"},
                      {"version", MDEPOSE_VERSION},
                      {"config_hash", harness::hex64(harness::config_hash(config))},
                      {"seed", config.seed},
                      {"pair_seed", config.pairs.seed},
                      {"results", "results.csv"}};
    write_file(config.output_dir / "run.json", run.dump(2) + "\n");

    std::size_t ok = 0;
    for (const auto &r : results)
        ok += r.status == harness::PairStatus::kOk;
    spdlog::info("{} rows ({} ok) -> {}", results.size(), ok, out.string());
    return 0;
}

int cmd_report(const std::vector<std::string> &results, const std::optional<std::string> &config_path,
               const std::vector<std::string> &depth_metrics, std::optional<std::string> output) {
    harness::ReportInputs in;
    for (const auto &r : results)
        in.results.emplace_back(r);
    for (const auto &d : depth_metrics)
        in.depth_metrics.emplace_back(d);
    in.metadata["version"] = MDEPOSE_VERSION;
    if (config_path) {
        const auto config = harness::load_config(*config_path);
        for (const auto &s : config.scenes)
            in.groups[s.name] = s.group;
        in.metadata["config_hash"] = harness::hex64(harness::config_hash(config));
        in.metadata["seed"] = std::to_string(config.seed);
        in.metadata["pair_seed"] = std::to_string(config.pairs.seed);
        if (!output)
            output = config.output_dir.string();
    }
    // Run metadata written by evaluate next to the first results file.
    const fs::path run_json = fs::path(results.front()).parent_path() / "run.json";
    if (!config_path && fs::exists(run_json)) {
        const json run = json::parse(read_file(run_json));
        for (const char *key : {"config_hash", "seed", "pair_seed"})
            if (run.contains(key))
                in.metadata[key] = run[key].is_string() ? run[key].get<std::string>() : run[key].dump();
    }
    const fs::path dir = output ? fs::path(*output) : fs::path(results.front()).parent_path();
    const auto report = harness::build_report(in);
    harness::write_report(report, dir);
    std::cout << harness::format_report_table(report);
    return 0;
}

int cmd_selfcheck(std::uint64_t seed, bool inject_fault) {
    const auto summary = harness::run_selfcheck({seed, inject_fault});
    std::cout << harness::format_selfcheck(summary);
    return summary.passed() ? 0 : 1;
}

struct EmitArgs {
    std::string output;
    std::string scene = "synthetic";
    std::size_t pairs = 20;
    std::size_t points = 200;
    std::uint64_t seed = 0;
    double noise_px = 0.0;
    double outliers = 0.0;
    double depth_sigma = 0.05;
    bool binary = false;
};

int cmd_emit_synthetic(const EmitArgs &a) {
    synthetic::DatasetSpec spec;
    spec.scene = a.scene;
    spec.num_pairs = a.pairs;
    spec.seed = a.seed;
    spec.binary_model = a.binary;
    spec.pair.n_points = a.points;
    spec.pair.keypoint_noise_px = a.noise_px;
    spec.pair.outlier_fraction = a.outliers;
    spec.provenances = {{"exact", synthetic::DepthNoise::none()},
                        {"lognormal", synthetic::DepthNoise::lognormal(a.depth_sigma)}};
    const fs::path root = a.output;
    const auto scene = synthetic::emit_dataset(spec, root);

    harness::BenchmarkConfig config;
    harness::SceneConfig sc;
    sc.name = scene.name;
    sc.group = scene.name;
    sc.model = scene.model_dir;
    sc.matches = scene.matches_dir;
    sc.depth = scene.depth_dirs;
    config.scenes.push_back(sc);
    config.estimators = {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR, EstimatorId::kGtH};
    config.pairs.count = a.pairs;
    config.seed = a.seed;
    config.output_dir = root / "out";
    harness::save_config(config, root / "config.json");
    spdlog::info("wrote {} pairs of scene '{}' and {}", a.pairs, scene.name, (root / "config.json").string());
    return 0;
}

int cmd_depth_eval(const std::string &config_path, const CommonOverrides &o, const std::vector<std::string> &alignments,
                   const std::string &scale_method, std::optional<std::string> csv) {
    const auto config = load(config_path, o);
    harness::DepthEvalOptions options;
    if (!alignments.empty()) {
        options.alignments.clear();
        for (const auto &s : alignments) {
            const auto a = parse_alignment(s);
            if (!a)
                throw Error(ErrorCode::kConfigError, "unknown alignment '" + s + "'");
            options.alignments.push_back(*a);
        }
    }
    if (scale_method == "median")
        options.scale_method = metrics::ScaleMethod::kMedianRatio;
    else if (scale_method != "least-squares")
        throw Error(ErrorCode::kConfigError, "unknown scale method '" + scale_method + "'");
    const auto rows = harness::evaluate_depth_config(config, options);
    const fs::path out = csv ? fs::path(*csv) : config.output_dir / "depth_metrics.csv";
    harness::write_depth_metrics_csv(rows, out);
    spdlog::info("{} depth metric rows -> {}", rows.size(), out.string());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Benchmark monocular depth predictions by two-view relative pose accuracy"};
    app.set_version_flag("--version", std::string(MDEPOSE_VERSION));
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

    std::string config_path;
    CommonOverrides overrides;
    auto add_common = [&](CLI::App *cmd, const char *seed_help) {
        cmd->add_option("--config", config_path, "benchmark config (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", overrides.output, "output directory (overrides output_dir)");
        cmd->add_option("--seed", overrides.seed, seed_help);
    };

    auto *sp = app.add_subcommand("sample-pairs", "sample evaluation pairs per scene");
    add_common(sp, "pair sampling seed (overrides pairs.seed)");
    std::optional<std::size_t> count;
    std::optional<double> min_overlap;
    sp->add_option("--count", count, "pairs per scene");
    sp->add_option("--min-overlap", min_overlap, "minimum covisibility overlap");

    auto *ev = app.add_subcommand("evaluate", "run the estimators on every pair");
    add_common(ev, "run seed (overrides seed)");
    int jobs = 1;
    std::vector<std::string> estimators;
    ev->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_option("--estimators", estimators, "estimator ids (B, H, R, GT-H, GT-R)")->delimiter(',');

    auto *rp = app.add_subcommand("report", "aggregate results into report.json/.csv/.txt");
    std::vector<std::string> results, depth_metrics;
    std::optional<std::string> report_config, report_output;
    rp->add_option("--results", results, "results CSV files")->required()->check(CLI::ExistingFile);
    rp->add_option("--config", report_config, "config providing scene groups")->check(CLI::ExistingFile);
    rp->add_option("--depth-metrics", depth_metrics, "depth metric CSVs from depth-eval")->check(CLI::ExistingFile);
    rp->add_option("--output", report_output, "report directory");

    auto *sc = app.add_subcommand("selfcheck", "synthetic end-to-end checks");
    std::uint64_t selfcheck_seed = 0;
    bool inject_fault = false;
    sc->add_option("--seed", selfcheck_seed, "seed")->capture_default_str();
    sc->add_flag("--inject-fault", inject_fault, "swap per-view depths (negative control)");

    auto *em = app.add_subcommand("emit-synthetic", "write a synthetic scene in the ingest formats plus a config");
    EmitArgs emit;
    em->add_option("--output", emit.output, "dataset root")->required();
    em->add_option("--scene", emit.scene, "scene name")->capture_default_str();
    em->add_option("--pairs", emit.pairs, "number of image pairs")->capture_default_str();
    em->add_option("--points", emit.points, "matches per pair")->capture_default_str();
    em->add_option("--seed", emit.seed, "seed")->capture_default_str();
    em->add_option("--noise", emit.noise_px, "keypoint noise sigma in pixels")->capture_default_str();
    em->add_option("--outliers", emit.outliers, "outlier fraction")->capture_default_str();
    em->add_option("--depth-noise", emit.depth_sigma, "log-normal sigma of the 'lognormal' provenance")
        ->capture_default_str();
    em->add_flag("--binary", emit.binary, "write the COLMAP model in binary");

    auto *de = app.add_subcommand("depth-eval", "AbsRel and delta1 of every provenance");
    add_common(de, "unused");
    std::vector<std::string> alignments;
    std::string scale_method = "least-squares";
    std::optional<std::string> depth_csv;
    de->add_option("--alignment", alignments, "none, scale, affine")->delimiter(',');
    de->add_option("--scale-method", scale_method, "least-squares or median")->capture_default_str();
    de->add_option("--csv", depth_csv, "output CSV (default <output_dir>/depth_metrics.csv)");

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_st("mdepose");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*sp)
            return cmd_sample_pairs(config_path, overrides, count, min_overlap);
        if (*ev)
            return cmd_evaluate(config_path, overrides, jobs, estimators);
        if (*rp)
            return cmd_report(results, report_config, depth_metrics, report_output);
        if (*sc)
            return cmd_selfcheck(selfcheck_seed, inject_fault);
        if (*em)
            return cmd_emit_synthetic(emit);
        if (*de)
            return cmd_depth_eval(config_path, overrides, alignments, scale_method, depth_csv);
    } catch (const Error &e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception &e) {
        spdlog::error("unexpected: {}", e.what());
        return 3;
    }
    return 0;
}
