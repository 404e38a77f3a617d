#include "fieldnet/windowing.hpp"

#include "fieldnet/errors.hpp"

namespace fieldnet {

const char* to_string(CareerStage stage) {
    switch (stage) {
        case CareerStage::Early: return "early";
        case CareerStage::Mid: return "mid";
        case CareerStage::Late: return "late";
    }
    return "?";
}

CareerStage career_stage(int tau) {
    if (tau < 0) throw ValidationError("career age must be non-negative");
    if (tau < 5) return CareerStage::Early;
    if (tau < 10) return CareerStage::Mid;
    return CareerStage::Late;
}

std::unordered_map<std::string, int> cohort_years(
    std::span<const PerformanceRecord> performances) {
    std::unordered_map<std::string, int> out;
    for (const auto& rec : performances) {
        auto [it, inserted] = out.try_emplace(rec.musician_id, rec.date.year);
        if (!inserted && rec.date.year < it->second) it->second = rec.date.year;
    }
    return out;
}

int cohort_of(std::span<const PerformanceRecord> performances,
              const std::string& musician_id) {
    bool found = false;
    int year = 0;
    for (const auto& rec : performances) {
        if (rec.musician_id != musician_id) continue;
        if (!found || rec.date.year < year) year = rec.date.year;
        found = true;
    }
    if (!found)
        throw ValidationError("musician \"" + musician_id + "\" has no performances");
    return year;
}

}  // namespace fieldnet
