#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace mdepose::metrics {

struct LinearFit {
    double r = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

// Pearson correlation and ordinary least-squares line y = slope x + b.
// Throws DegenerateInput for < 2 points or constant x. Constant y gives r = 0.
LinearFit pearson_and_fit(std::span<const double> x, std::span<const double> y);

struct GroupedMean {
    std::map<std::string, double> group_means;
    double overall = 0.0;
};

// Unweighted mean within each group, then unweighted mean of the group
// means. Throws EmptyGroup for an empty group or no groups.
GroupedMean aggregate(const std::map<std::string, std::vector<double>> &groups);

enum class RankOrder { kHigherIsBetter, kLowerIsBetter };

// 1-based ranks; tied values share the better rank and the following rank
// is skipped (1, 1, 3). NaN ranks last.
std::vector<int> rank_column(std::span<const double> values, RankOrder order);

} // namespace mdepose::metrics
