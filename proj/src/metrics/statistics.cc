#include "mdepose/metrics/statistics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdepose/util/error.h"

namespace mdepose::metrics {

LinearFit pearson_and_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::kInvalidArgument, "x and y have different lengths");
    if (x.size() < 2)
        throw Error(ErrorCode::kDegenerateInput, "need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !std::isfinite(sxx))
        throw Error(ErrorCode::kDegenerateInput, "x is constant");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
    return fit;
}

GroupedMean aggregate(const std::map<std::string, std::vector<double>> &groups) {
    if (groups.empty())
        throw Error(ErrorCode::kEmptyGroup, "no groups to aggregate");
    GroupedMean out;
    double acc = 0.0;
    for (const auto &[name, values] : groups) {
        if (values.empty())
            throw Error(ErrorCode::kEmptyGroup, "group '" + name + "' has no values");
        const double m = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        out.group_means[name] = m;
        acc += m;
    }
    out.overall = acc / static_cast<double>(groups.size());
    return out;
}

std::vector<int> rank_column(std::span<const double> values, RankOrder order) {
    auto better = [&](double a, double b) {
        if (std::isnan(b))
            return !std::isnan(a);
        if (std::isnan(a))
            return false;
        return order == RankOrder::kHigherIsBetter ? a > b : a < b;
    };
    std::vector<int> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int r = 1;
        for (std::size_t j = 0; j < values.size(); ++j)
            if (better(values[j], values[i]))
                ++r;
        ranks[i] = r;
    }
    return ranks;
}

} // namespace mdepose::metrics
