#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mdepose::harness {

struct SelfcheckOptions {
    std::uint64_t seed = 0;
    // Negative control: swaps the two views' depths of every match before
    // the depth-aware estimators see them. The check must then fail.
    bool inject_fault = false;
};

struct SelfcheckItem {
    std::string name;
    std::string measured;
    std::string required;
    bool passed = false;
};

struct SelfcheckSummary {
    std::vector<SelfcheckItem> items;
    bool passed() const;
};

SelfcheckSummary run_selfcheck(const SelfcheckOptions &options);
std::string format_selfcheck(const SelfcheckSummary &summary);

} // namespace mdepose::harness
