#include "mdepose/harness/config.h"

#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <set>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"
#include "mdepose/util/random.h"

namespace mdepose::harness {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string &msg) { throw Error(ErrorCode::kConfigError, msg); }

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object())
        config_error(where + " must be an object");
    for (const auto &[key, value] : obj.items())
        if (!allowed.count(key))
            config_error("unknown key '" + key + "' in " + where);
}

template <typename T> T get(const json &obj, const char *key, const std::string &where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &e) {
        config_error(where + "." + key + ": " + e.what());
    }
}

fs::path resolve(const json &obj, const char *key, const std::string &where, const fs::path &base) {
    fs::path p = expand_env(get<std::string>(obj, key, where));
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::string relative_to(const fs::path &p, const fs::path &base) {
    if (base.empty())
        return p.generic_string();
    const fs::path rel = p.lexically_relative(base);
    return rel.empty() ? p.generic_string() : rel.generic_string();
}

json to_json(const BenchmarkConfig &c, const fs::path &base) {
    json scenes = json::array();
    for (const auto &s : c.scenes) {
        json depth = json::object();
        for (const auto &[prov, dir] : s.depth)
            depth[prov] = relative_to(dir, base);
        json j = {{"name", s.name},
                  {"group", s.group},
                  {"model", relative_to(s.model, base)},
                  {"matches", relative_to(s.matches, base)},
                  {"depth", depth}};
        if (s.gt_depth)
            j["gt_depth"] = relative_to(*s.gt_depth, base);
        scenes.push_back(std::move(j));
    }
    json estimators = json::array();
    for (auto id : c.estimators)
        estimators.push_back(std::string(estimator_name(id)));
    json ransac = json::object();
    if (c.ransac.sampson_threshold_px)
        ransac["sampson_threshold_px"] = *c.ransac.sampson_threshold_px;
    if (c.ransac.reproj_threshold_px)
        ransac["reproj_threshold_px"] = *c.ransac.reproj_threshold_px;
    if (c.ransac.max_iterations)
        ransac["max_iterations"] = *c.ransac.max_iterations;
    if (c.ransac.final_refinement_iterations)
        ransac["final_refinement_iterations"] = *c.ransac.final_refinement_iterations;
    return {{"version", kConfigVersion},
            {"seed", c.seed},
            {"match_cap", c.match_cap},
            {"output_dir", relative_to(c.output_dir, base)},
            {"pairs", {{"min_overlap", c.pairs.min_overlap}, {"count", c.pairs.count}, {"seed", c.pairs.seed}}},
            {"estimators", estimators},
            {"ransac", ransac},
            {"scenes", scenes}};
}

} // namespace

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string expand_env(const std::string &value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
            const std::size_t end = value.find('}', i + 2);
            if (end == std::string::npos)
                config_error("unterminated ${ in '" + value + "'");
            const std::string name = value.substr(i + 2, end - i - 2);
            const char *env = std::getenv(name.c_str());
            if (!env)
                config_error("environment variable " + name + " is not set");
            out += env;
            i = end + 1;
        } else {
            out += value[i++];
        }
    }
    return out;
}

EstimatorConfig BenchmarkConfig::estimator_config(EstimatorId id) const {
    EstimatorConfig cfg = EstimatorConfig::preset(id);
    if (ransac.sampson_threshold_px)
        cfg.sampson_threshold_px = *ransac.sampson_threshold_px;
    if (ransac.reproj_threshold_px)
        cfg.reproj_threshold_px = *ransac.reproj_threshold_px;
    if (ransac.max_iterations)
        cfg.max_iterations = *ransac.max_iterations;
    if (ransac.final_refinement_iterations)
        cfg.final_refinement_iterations = *ransac.final_refinement_iterations;
    return cfg;
}

void BenchmarkConfig::validate(bool check_paths) const {
    if (scenes.empty())
        config_error("no scenes configured");
    if (estimators.empty())
        config_error("no estimators configured");
    if (pairs.count == 0)
        config_error("pairs.count must be >= 1");
    if (!(pairs.min_overlap >= 0.0))
        config_error("pairs.min_overlap must be >= 0");
    if (match_cap == 0)
        config_error("match_cap must be >= 1");
    std::set<std::string> names;
    for (const auto &s : scenes) {
        if (s.name.empty() || s.name.find_first_of("/,\n") != std::string::npos)
            config_error("scene names must be non-empty and free of '/', ',' and newlines");
        if (!names.insert(s.name).second)
            config_error("duplicate scene '" + s.name + "'");
        if (s.group.empty() || s.group == "overall" || s.group.find_first_of(",\n") != std::string::npos)
            config_error("scene '" + s.name + "': invalid group '" + s.group + "'");
        for (const auto &[prov, dir] : s.depth)
            if (prov.empty() || prov.find_first_of(",\n") != std::string::npos || prov == "none" || prov == "gt")
                config_error("scene '" + s.name + "': invalid provenance label '" + prov + "'");
        if (check_paths) {
            auto need = [&](const fs::path &p, const char *what) {
                if (!fs::exists(p))
                    config_error("scene '" + s.name + "': " + what + " " + p.string() + " does not exist");
            };
            need(s.model, "model");
            need(s.matches, "matches");
            for (const auto &[prov, dir] : s.depth)
                need(dir, "depth dir");
        }
    }
    for (auto id : estimators)
        estimator_config(id).validate();
}

BenchmarkConfig load_config(const fs::path &path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error &e) {
        throw FormatError(path.string(), FormatError::ByteOffset{e.byte}, e.what());
    }
    const fs::path base = fs::absolute(path).parent_path();
    check_keys(doc, {"version", "seed", "match_cap", "output_dir", "pairs", "estimators", "ransac", "scenes"}, "config");
    if (doc.contains("version") && get<int>(doc, "version", "config") != kConfigVersion)
        config_error("unsupported config version");

    BenchmarkConfig c;
    if (doc.contains("seed"))
        c.seed = get<std::uint64_t>(doc, "seed", "config");
    if (doc.contains("match_cap"))
        c.match_cap = get<std::size_t>(doc, "match_cap", "config");
    if (doc.contains("output_dir"))
        c.output_dir = resolve(doc, "output_dir", "config", base);
    else
        c.output_dir = base / "out";
    if (doc.contains("pairs")) {
        const auto &p = doc["pairs"];
        check_keys(p, {"min_overlap", "count", "seed"}, "pairs");
        if (p.contains("min_overlap"))
            c.pairs.min_overlap = get<double>(p, "min_overlap", "pairs");
        if (p.contains("count"))
            c.pairs.count = get<std::size_t>(p, "count", "pairs");
        if (p.contains("seed"))
            c.pairs.seed = get<std::uint64_t>(p, "seed", "pairs");
    }
    if (doc.contains("estimators")) {
        c.estimators.clear();
        for (const auto &e : doc["estimators"]) {
            if (!e.is_string())
                config_error("estimators must be strings");
            const auto id = parse_estimator_id(e.get<std::string>());
            if (!id)
                config_error("unknown estimator '" + e.get<std::string>() + "'");
            c.estimators.push_back(*id);
        }
    }
    if (doc.contains("ransac")) {
        const auto &r = doc["ransac"];
        check_keys(r, {"sampson_threshold_px", "reproj_threshold_px", "max_iterations", "final_refinement_iterations"},
                   "ransac");
        if (r.contains("sampson_threshold_px"))
            c.ransac.sampson_threshold_px = get<double>(r, "sampson_threshold_px", "ransac");
        if (r.contains("reproj_threshold_px"))
            c.ransac.reproj_threshold_px = get<double>(r, "reproj_threshold_px", "ransac");
        if (r.contains("max_iterations"))
            c.ransac.max_iterations = get<int>(r, "max_iterations", "ransac");
        if (r.contains("final_refinement_iterations"))
            c.ransac.final_refinement_iterations = get<int>(r, "final_refinement_iterations", "ransac");
    }
    if (!doc.contains("scenes") || !doc["scenes"].is_array())
        config_error("config needs a 'scenes' array");
    for (const auto &s : doc["scenes"]) {
        check_keys(s, {"name", "group", "model", "matches", "depth", "gt_depth"}, "scene");
        SceneConfig sc;
        sc.name = get<std::string>(s, "name", "scene");
        sc.group = s.contains("group") ? get<std::string>(s, "group", "scene") : sc.name;
        sc.model = resolve(s, "model", "scene " + sc.name, base);
        sc.matches = resolve(s, "matches", "scene " + sc.name, base);
        if (s.contains("depth")) {
            if (!s["depth"].is_object())
                config_error("scene " + sc.name + ": depth must map provenance to directory");
            for (const auto &[prov, dir] : s["depth"].items())
                sc.depth[prov] = resolve(s["depth"], prov.c_str(), "scene " + sc.name + ".depth", base);
        }
        if (s.contains("gt_depth"))
            sc.gt_depth = resolve(s, "gt_depth", "scene " + sc.name, base);
        c.scenes.push_back(std::move(sc));
    }
    c.validate(false);
    return c;
}

void save_config(const BenchmarkConfig &config, const fs::path &path) {
    const fs::path base = fs::absolute(path).parent_path();
    write_file(path, to_json(config, base).dump(2) + "\n");
}

std::uint64_t config_hash(const BenchmarkConfig &config) { return fnv1a64(to_json(config, {}).dump()); }

} // namespace mdepose::harness
