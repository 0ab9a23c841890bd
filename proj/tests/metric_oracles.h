#pragma once

// Brute-force reference implementations of the scalar metrics, written
// directly from their definitions, and a random-instance comparison driver.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mdepose/metrics/depth_metrics.h"
#include "mdepose/metrics/pose_metrics.h"
#include "mdepose/metrics/statistics.h"
#include "mdepose/util/error.h"

namespace mdepose::test {

inline double oracle_maa(const std::vector<double> &errors) {
    double acc = 0.0;
    for (int theta = 1; theta <= 10; ++theta) {
        int hits = 0;
        for (double e : errors)
            if (e < theta)
                ++hits;
        acc += static_cast<double>(hits) / static_cast<double>(errors.size());
    }
    return acc / 10.0;
}

struct Selection {
    std::vector<double> est, gt;
};

inline Selection select(const metrics::DepthEvalInput &in) {
    Selection s;
    for (std::size_t i = 0; i < in.z_gt.size(); ++i) {
        const bool masked_in = in.mask.empty() || in.mask[i] != 0;
        if (masked_in && std::isfinite(in.z_gt[i]) && in.z_gt[i] > 0) {
            s.est.push_back(in.z_est[i]);
            s.gt.push_back(in.z_gt[i]);
        }
    }
    return s;
}

inline double oracle_abs_rel(const metrics::DepthEvalInput &in) {
    const auto s = select(in);
    long double acc = 0;
    for (std::size_t i = 0; i < s.gt.size(); ++i)
        acc += std::fabs(s.est[i] - s.gt[i]) / s.gt[i];
    return static_cast<double>(acc / s.gt.size());
}

inline double oracle_delta1(const metrics::DepthEvalInput &in) {
    const auto s = select(in);
    int hits = 0;
    for (std::size_t i = 0; i < s.gt.size(); ++i)
        if (s.est[i] > 0 && s.gt[i] / s.est[i] < 1.25 && s.est[i] / s.gt[i] < 1.25)
            ++hits;
    return static_cast<double>(hits) / s.gt.size();
}

// argmin_s sum (s e - g)^2 from the one-dimensional normal equation.
inline double oracle_ls_scale(const metrics::DepthEvalInput &in) {
    const auto s = select(in);
    long double eg = 0, ee = 0;
    for (std::size_t i = 0; i < s.gt.size(); ++i) {
        eg += static_cast<long double>(s.est[i]) * s.gt[i];
        ee += static_cast<long double>(s.est[i]) * s.est[i];
    }
    return static_cast<double>(eg / ee);
}

inline double oracle_median_scale(const metrics::DepthEvalInput &in) {
    const auto s = select(in);
    std::vector<double> r;
    for (std::size_t i = 0; i < s.gt.size(); ++i)
        r.push_back(s.gt[i] / s.est[i]);
    std::sort(r.begin(), r.end());
    const std::size_t n = r.size();
    return n % 2 ? r[n / 2] : 0.5 * (r[n / 2 - 1] + r[n / 2]);
}

// [sum e^2  sum e; sum e  n] [a; b] = [sum e g; sum g] by Cramer's rule.
inline std::pair<double, double> oracle_affine(const metrics::DepthEvalInput &in) {
    const auto s = select(in);
    long double see = 0, se = 0, seg = 0, sg = 0;
    const long double n = s.gt.size();
    for (std::size_t i = 0; i < s.gt.size(); ++i) {
        see += static_cast<long double>(s.est[i]) * s.est[i];
        se += s.est[i];
        seg += static_cast<long double>(s.est[i]) * s.gt[i];
        sg += s.gt[i];
    }
    const long double det = see * n - se * se;
    return {static_cast<double>((seg * n - se * sg) / det), static_cast<double>((see * sg - se * seg) / det)};
}

inline metrics::LinearFit oracle_pearson(const std::vector<double> &x, const std::vector<double> &y) {
    const long double n = x.size();
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    metrics::LinearFit f;
    f.slope = static_cast<double>(cxy / cxx);
    f.intercept = static_cast<double>(my - cxy / cxx * mx);
    f.r = static_cast<double>(cxy / std::sqrt(cxx * cyy));
    return f;
}

inline metrics::DepthEvalInput random_depth_input(std::mt19937_64 &gen) {
    std::uniform_int_distribution<int> size(2, 200);
    std::uniform_real_distribution<double> z(0.5, 80.0), noise(-0.3, 0.3), u(0.0, 1.0);
    metrics::DepthEvalInput in;
    const int n = size(gen);
    const double scale = std::exp(2.0 * noise(gen)), shift = 2.0 * noise(gen);
    const bool use_mask = u(gen) < 0.5;
    for (int i = 0; i < n; ++i) {
        const double g = z(gen);
        in.z_gt.push_back(u(gen) < 0.05 ? (u(gen) < 0.5 ? -1.0 : std::nan("")) : g);
        in.z_est.push_back(std::max(0.05, scale * g * (1.0 + noise(gen)) + shift));
        if (use_mask)
            in.mask.push_back(u(gen) < 0.8);
    }
    // Keep at least two selected entries.
    in.z_gt[0] = z(gen);
    in.z_gt[1] = z(gen);
    if (use_mask)
        in.mask[0] = in.mask[1] = 1;
    return in;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Largest relative discrepancy per metric over `instances` random inputs.
inline std::map<std::string, double> compare_metric_oracles(int instances, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::map<std::string, double> worst{{"maa", 0.0},          {"abs_rel", 0.0},       {"delta1", 0.0},
                                        {"align_scale", 0.0},  {"align_affine", 0.0}, {"pearson_and_fit", 0.0}};
    auto upd = [&](const char *k, double v) { worst[k] = std::max(worst[k], v); };
    std::uniform_real_distribution<double> err(0.0, 15.0), u(-5.0, 5.0);
    std::uniform_int_distribution<int> size(1, 300);
    for (int it = 0; it < instances; ++it) {
        std::vector<double> errors(size(gen));
        for (double &e : errors)
            e = std::round(err(gen) * 4.0) / 4.0; // includes exact integer thresholds
        upd("maa", rel_diff(metrics::maa(errors), oracle_maa(errors)));

        const auto in = random_depth_input(gen);
        upd("abs_rel", rel_diff(metrics::abs_rel(in), oracle_abs_rel(in)));
        upd("delta1", rel_diff(metrics::delta1(in), oracle_delta1(in)));
        upd("align_scale", rel_diff(metrics::align_scale(in).scale, oracle_ls_scale(in)));
        upd("align_scale",
            rel_diff(metrics::align_scale(in, metrics::ScaleMethod::kMedianRatio).scale, oracle_median_scale(in)));
        const auto aff = metrics::align_affine(in);
        const auto [a, b] = oracle_affine(in);
        upd("align_affine", std::max(rel_diff(aff.a, a), rel_diff(aff.b, b)));

        std::vector<double> x(size(gen) + 2), y(x.size());
        const double slope = u(gen), icpt = u(gen);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(gen);
            y[i] = slope * x[i] + icpt + u(gen);
        }
        const auto fit = metrics::pearson_and_fit(x, y);
        const auto ref = oracle_pearson(x, y);
        upd("pearson_and_fit",
            std::max({rel_diff(fit.r, ref.r), rel_diff(fit.slope, ref.slope), rel_diff(fit.intercept, ref.intercept)}));
    }
    return worst;
}

} // namespace mdepose::test
