#include "mdepose/harness/evaluate.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <map>
#include <mutex>
#include <optional>
#include <spdlog/spdlog.h>
#include <sstream>
#include <thread>
#include <tuple>

#include "mdepose/colmap/model_io.h"
#include "mdepose/colmap/pairs.h"
#include "mdepose/ingest/depth_map.h"
#include "mdepose/ingest/matches.h"
#include "mdepose/ingest/sampling.h"
#include "mdepose/metrics/pose_metrics.h"
#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"
#include "mdepose/util/random.h"

namespace mdepose::harness {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStatusNames[] = {"ok",
                                             "missing_input",
                                             "invalid_input",
                                             "insufficient_matches",
                                             "estimation_failed",
                                             "degenerate_pair",
                                             "scene_failed"};

PairStatus status_from_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::kInsufficientMatches:
        return PairStatus::kInsufficientMatches;
    case ErrorCode::kZeroBaseline:
    case ErrorCode::kDegenerate:
        return PairStatus::kDegeneratePair;
    case ErrorCode::kIoError:
        return PairStatus::kMissingInput;
    case ErrorCode::kFormatError:
    case ErrorCode::kVersionError:
        return PairStatus::kInvalidInput;
    default:
        return PairStatus::kEstimationFailed;
    }
}

// (estimator, provenance) combinations evaluated for one scene.
std::vector<std::pair<EstimatorId, std::string>> combinations(const BenchmarkConfig &config, const SceneConfig &scene) {
    std::vector<std::pair<EstimatorId, std::string>> out;
    for (auto id : config.estimators) {
        const EstimatorConfig cfg = config.estimator_config(id);
        if (cfg.is_gt_depth())
            out.emplace_back(id, std::string(kGtDepthProvenance));
        else if (!cfg.uses_depth())
            out.emplace_back(id, std::string(kNoDepthProvenance));
        else
            for (const auto &[prov, dir] : scene.depth)
                out.emplace_back(id, prov);
    }
    return out;
}

PairResult failed_row(const std::string &scene, const std::string &pair, EstimatorId id, const std::string &prov,
                      PairStatus status, std::size_t n_matches = 0) {
    PairResult r;
    r.scene = scene;
    r.pair = pair;
    r.estimator = std::string(estimator_name(id));
    r.provenance = prov;
    r.status = status;
    r.n_matches = n_matches;
    return r;
}

std::optional<fs::path> find_matches(const fs::path &dir, const std::string &key) {
    for (const char *ext : {".d2pm", ".json"}) {
        fs::path p = dir / (key + ext);
        if (fs::exists(p))
            return p;
    }
    return std::nullopt;
}

struct PairJob {
    const SceneConfig *scene;
    const colmap::SfmModel *model;
    colmap::ImagePair pair;
};

std::vector<PairResult> evaluate_pair(const BenchmarkConfig &config, const PairJob &job) {
    const SceneConfig &scene = *job.scene;
    const auto &p = job.pair;
    const std::string key = ingest::pair_key(p.name1, p.name2);
    const auto combos = combinations(config, scene);
    std::vector<PairResult> rows;
    auto fail_all = [&](PairStatus status) {
        for (const auto &[id, prov] : combos)
            rows.push_back(failed_row(scene.name, key, id, prov, status));
        return rows;
    };

    if (!job.model->images.count(p.id1) || !job.model->images.count(p.id2))
        return fail_all(PairStatus::kMissingInput);
    const CameraIntrinsics K1 = job.model->intrinsics_of(p.id1);
    const CameraIntrinsics K2 = job.model->intrinsics_of(p.id2);
    const Pose gt = colmap::gt_relative_pose(*job.model, p.id1, p.id2);

    const auto match_path = find_matches(scene.matches, key);
    if (!match_path) {
        spdlog::warn("{}: no match file for {}", scene.name, key);
        return fail_all(PairStatus::kMissingInput);
    }
    ingest::MatchFile matches;
    try {
        matches = ingest::read_matches(*match_path);
    } catch (const Error &e) {
        spdlog::warn("{}: {}", scene.name, e.what());
        return fail_all(status_from_error(e.code()));
    }

    // Raw depths per provenance, loaded lazily.
    std::map<std::string, std::optional<std::pair<std::vector<double>, std::vector<double>>>> depth_cache;
    std::map<std::string, PairStatus> depth_failure;
    auto depths_for = [&](const std::string &prov) -> const std::pair<std::vector<double>, std::vector<double>> * {
        auto it = depth_cache.find(prov);
        if (it == depth_cache.end()) {
            std::optional<std::pair<std::vector<double>, std::vector<double>>> loaded;
            try {
                const fs::path dir = scene.depth.at(prov);
                const fs::path f1 = ingest::depth_map_path(dir, p.name1);
                const fs::path f2 = ingest::depth_map_path(dir, p.name2);
                if (!fs::exists(f1) || !fs::exists(f2)) {
                    spdlog::warn("{}: missing {} depth for {}", scene.name, prov, key);
                    depth_failure[prov] = PairStatus::kMissingInput;
                } else {
                    loaded.emplace(ingest::sample_depth_nn(ingest::read_pfm(f1), matches.kp1, K1.width, K1.height),
                                   ingest::sample_depth_nn(ingest::read_pfm(f2), matches.kp2, K2.width, K2.height));
                }
            } catch (const Error &e) {
                spdlog::warn("{}: {}", scene.name, e.what());
                depth_failure[prov] = status_from_error(e.code());
            }
            it = depth_cache.emplace(prov, std::move(loaded)).first;
        }
        return it->second ? &*it->second : nullptr;
    };

    for (const auto &[id, prov] : combos) {
        const EstimatorConfig cfg = config.estimator_config(id);
        std::vector<Correspondence> corrs;
        if (cfg.uses_depth() && !cfg.is_gt_depth()) {
            const auto *d = depths_for(prov);
            if (!d) {
                rows.push_back(failed_row(scene.name, key, id, prov, depth_failure.at(prov)));
                continue;
            }
            corrs = ingest::filter_and_cap(matches, d->first, d->second, config.match_cap);
        } else {
            corrs = ingest::filter_and_cap(matches, {}, {}, config.match_cap);
        }

        const RansacSeed seed{pair_seed(config.seed, scene.name, key, estimator_name(id))};
        Result<PoseEstimate> est = cfg.is_gt_depth() ? gt_depth_estimate(corrs, gt, cfg, K1, K2, seed)
                                                     : ransac_estimate(corrs, cfg, K1, K2, seed);
        if (!est.ok()) {
            rows.push_back(failed_row(scene.name, key, id, prov, status_from_error(est.code()), corrs.size()));
            continue;
        }
        const auto errors = metrics::pose_errors(est->scaled_pose.pose, gt);
        PairResult r = failed_row(scene.name, key, id, prov, PairStatus::kOk, corrs.size());
        r.e_r = errors.e_r;
        r.e_t = errors.e_t;
        r.e_p = errors.e_p;
        r.inliers = est->num_inliers;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_row(const PairResult &r) {
    return r.scene + "," + r.pair + "," + r.estimator + "," + r.provenance + "," + format_double(r.e_r) + "," +
           format_double(r.e_t) + "," + format_double(r.e_p) + "," + std::to_string(r.inliers) + "," +
           std::to_string(r.n_matches) + "," + std::string(status_name(r.status));
}

} // namespace

std::string_view status_name(PairStatus s) { return kStatusNames[static_cast<int>(s)]; }

std::optional<PairStatus> parse_status(std::string_view s) {
    for (int i = 0; i < static_cast<int>(std::size(kStatusNames)); ++i)
        if (kStatusNames[i] == s)
            return static_cast<PairStatus>(i);
    return std::nullopt;
}

bool canonical_less(const PairResult &a, const PairResult &b) {
    return std::tie(a.scene, a.pair, a.estimator, a.provenance) < std::tie(b.scene, b.pair, b.estimator, b.provenance);
}

std::uint64_t pair_seed(std::uint64_t run_seed, const std::string &scene, const std::string &pair,
                        std::string_view estimator) {
    std::string key = scene;
    key += '\0';
    key += pair;
    key += '\0';
    key += estimator;
    return mix64(fnv1a64(key) ^ mix64(run_seed));
}

fs::path pairs_csv_path(const BenchmarkConfig &config, const std::string &scene) {
    return config.output_dir / "pairs" / (scene + ".csv");
}

SamplePairsOutcome sample_all_pairs(const BenchmarkConfig &config) {
    SamplePairsOutcome out;
    for (const auto &scene : config.scenes) {
        try {
            const auto model = colmap::parse_model(scene.model);
            const auto pairs = colmap::sample_pairs(model, config.pairs.min_overlap, config.pairs.count, config.pairs.seed);
            const fs::path path = pairs_csv_path(config, scene.name);
            colmap::write_pairs_csv(pairs, path);
            spdlog::info("{}: {} pairs -> {}", scene.name, pairs.size(), path.string());
            out.written.push_back(path);
        } catch (const Error &e) {
            spdlog::error("{}: {}", scene.name, e.what());
            out.failures.push_back(scene.name + ": " + e.what());
        }
    }
    return out;
}

std::vector<colmap::ImagePair> load_or_sample_pairs(const BenchmarkConfig &config, const SceneConfig &scene,
                                                    const colmap::SfmModel &model) {
    const fs::path csv = pairs_csv_path(config, scene.name);
    if (fs::exists(csv))
        return colmap::read_pairs_csv(csv);
    auto pairs = colmap::sample_pairs(model, config.pairs.min_overlap, config.pairs.count, config.pairs.seed);
    colmap::write_pairs_csv(pairs, csv);
    spdlog::info("{}: sampled {} pairs -> {}", scene.name, pairs.size(), csv.string());
    return pairs;
}

std::vector<PairResult> evaluate(const BenchmarkConfig &config, const EvaluateOptions &options) {
    std::vector<PairResult> results;
    std::vector<colmap::SfmModel> models;
    models.reserve(config.scenes.size());
    std::vector<PairJob> jobs;

    for (const auto &scene : config.scenes) {
        const fs::path csv = pairs_csv_path(config, scene.name);
        std::optional<std::vector<colmap::ImagePair>> pairs;
        try {
            if (fs::exists(csv))
                pairs = colmap::read_pairs_csv(csv);
            models.push_back(colmap::parse_model(scene.model));
            if (!pairs)
                pairs = load_or_sample_pairs(config, scene, models.back());
        } catch (const Error &e) {
            spdlog::error("{}: {}", scene.name, e.what());
            for (const auto &[id, prov] : combinations(config, scene)) {
                if (pairs)
                    for (const auto &p : *pairs)
                        results.push_back(failed_row(scene.name, ingest::pair_key(p.name1, p.name2), id, prov,
                                                     PairStatus::kSceneFailed));
                else
                    results.push_back(failed_row(scene.name, "*", id, prov, PairStatus::kSceneFailed));
            }
            continue;
        }
        spdlog::info("{}: evaluating {} pairs", scene.name, pairs->size());
        for (auto &p : *pairs)
            jobs.push_back({&scene, &models.back(), std::move(p)});
    }

    std::vector<std::vector<PairResult>> per_job(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size())
                return;
            try {
                per_job[i] = evaluate_pair(config, jobs[i]);
            } catch (const std::exception &e) {
                spdlog::error("{}: {}", jobs[i].scene->name, e.what());
                per_job[i].clear();
                const std::string key = ingest::pair_key(jobs[i].pair.name1, jobs[i].pair.name2);
                for (const auto &[id, prov] : combinations(config, *jobs[i].scene))
                    per_job[i].push_back(failed_row(jobs[i].scene->name, key, id, prov, PairStatus::kInvalidInput));
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(options.jobs, static_cast<int>(std::max<std::size_t>(1, jobs.size()))));
    std::vector<std::thread> threads;
    for (int t = 1; t < n_threads; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto &t : threads)
        t.join();

    for (auto &rows : per_job)
        for (auto &r : rows)
            results.push_back(std::move(r));
    std::sort(results.begin(), results.end(), canonical_less);
    return results;
}

void write_results_csv(const std::vector<PairResult> &results, const fs::path &path) {
    std::string out = "# " + std::string(kResultsSchema) + "\n" + std::string(kResultsHeader) + "\n";
    for (const auto &r : results)
        out += format_row(r) + "\n";
    write_file(path, out);
}

std::vector<PairResult> read_results_csv(const fs::path &path) {
    const std::string source = path.string();
    std::istringstream in(read_file(path));
    std::string line;
    std::uint64_t line_no = 0;
    bool header_seen = false;
    std::vector<PairResult> out;
    auto fail = [&](const std::string &msg) { throw FormatError(source, FormatError::LineNumber{line_no}, msg); };
    auto num = [&](const std::string &tok, auto &value) {
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail("bad number '" + tok + "'");
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line_no == 1 && line != "# " + std::string(kResultsSchema))
                fail("unsupported results schema '" + line.substr(1) + "'");
            continue;
        }
        if (!header_seen) {
            if (line != kResultsHeader)
                fail("expected header '" + std::string(kResultsHeader) + "'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 10)
            fail("expected 10 fields");
        PairResult r;
        r.scene = f[0];
        r.pair = f[1];
        r.estimator = f[2];
        r.provenance = f[3];
        num(f[4], r.e_r);
        num(f[5], r.e_t);
        num(f[6], r.e_p);
        num(f[7], r.inliers);
        num(f[8], r.n_matches);
        const auto st = parse_status(f[9]);
        if (!st)
            fail("unknown status '" + f[9] + "'");
        r.status = *st;
        out.push_back(std::move(r));
    }
    if (!header_seen)
        throw FormatError(source, "no header line");
    return out;
}

} // namespace mdepose::harness
