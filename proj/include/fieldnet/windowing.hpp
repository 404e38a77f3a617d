#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fieldnet/records.hpp"

namespace fieldnet {

// Rolling windows anchored at year t: predictors are aggregated over
// [t - iv_width + 1, t], the outcome over [t + 1, t + dv_width].
struct WindowSpec {
    int anchor = 0;
    int iv_width = 3;
    int dv_width = 3;

    YearRange iv() const { return {anchor - iv_width + 1, anchor}; }
    YearRange dv() const { return {anchor + 1, anchor + dv_width}; }
};

enum class CareerStage { Early, Mid, Late };

const char* to_string(CareerStage stage);

// Early: tau < 5, Mid: 5 <= tau < 10, Late: tau >= 10. Throws on tau < 0.
CareerStage career_stage(int tau);

template <class Record>
std::vector<Record> slice(std::span<const Record> records, YearRange window) {
    std::vector<Record> out;
    for (const auto& r : records)
        if (window.contains(r.date.year)) out.push_back(r);
    return out;
}

// First performance year per musician.
std::unordered_map<std::string, int> cohort_years(
    std::span<const PerformanceRecord> performances);

// Throws ValidationError when the musician has no performances.
int cohort_of(std::span<const PerformanceRecord> performances,
              const std::string& musician_id);

}  // namespace fieldnet
