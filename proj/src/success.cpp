#include "fieldnet/success.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "fieldnet/errors.hpp"
#include "fieldnet/windowing.hpp"

namespace fieldnet {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<TravelTrajectory> build_trajectories(
    std::span<const PerformanceRecord> performances, YearRange window) {
    std::vector<TravelTrajectory> out;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& rec : performances) {
        if (!window.contains(rec.date.year)) continue;
        auto [it, inserted] = index.try_emplace(rec.musician_id, out.size());
        if (inserted) out.push_back({rec.musician_id, {}});
        out[it->second].visits.push_back({rec.city_id, rec.lat, rec.lon, rec.date});
    }
    for (auto& traj : out)
        std::stable_sort(traj.visits.begin(), traj.visits.end(),
                         [](const Visit& a, const Visit& b) { return a.date < b.date; });
    return out;
}

double travel_distance_km(const TravelTrajectory& trajectory) {
    double total = 0.0;
    for (std::size_t i = 1; i < trajectory.visits.size(); ++i) {
        const Visit& prev = trajectory.visits[i - 1];
        const Visit& next = trajectory.visits[i];
        total += haversine_km(prev.lat, prev.lon, next.lat, next.lon);
    }
    return total;
}

std::unordered_map<std::string, int> yearly_quintile_ranks(
    const std::vector<std::pair<std::string, double>>& distances) {
    std::vector<std::size_t> order(distances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (distances[a].second != distances[b].second)
            return distances[a].second > distances[b].second;
        return distances[a].first < distances[b].first;
    });

    const std::size_t n = distances.size();
    std::unordered_map<std::string, int> ranks;
    ranks.reserve(n);
    std::size_t i = 0;
    while (i < n) {
        // All musicians tied at this distance get the bucket of the group head.
        std::size_t j = i;
        while (j < n && distances[order[j]].second == distances[order[i]].second) ++j;
        const int rank = 1 + static_cast<int>(5 * i / n);
        for (std::size_t k = i; k < j; ++k) ranks[distances[order[k]].first] = rank;
        i = j;
    }
    return ranks;
}

const char* to_string(CareerType type) {
    switch (type) {
        case CareerType::StableSuccessful: return "stable_successful";
        case CareerType::StableMediocre: return "stable_mediocre";
        case CareerType::StableUnsuccessful: return "stable_unsuccessful";
        case CareerType::Upward: return "upward";
        case CareerType::Downward: return "downward";
    }
    return "?";
}

CareerType career_type(std::span<const int> ranks) {
    if (ranks.size() < 2)
        throw ValidationError("career type needs at least 2 ranked years");
    double mean = 0.0;
    for (const int r : ranks) mean += r;
    mean /= static_cast<double>(ranks.size());
    if (mean <= 2.0) return CareerType::StableSuccessful;
    if (mean >= 4.0) return CareerType::StableUnsuccessful;
    const int delta = ranks.front() - ranks.back();  // positive = improving
    if (delta > 0) return CareerType::Upward;
    if (delta < 0) return CareerType::Downward;
    return CareerType::StableMediocre;
}

namespace {

struct YearlyRankTable {
    // musician -> (year -> rank), years ascending via std::map
    std::map<std::string, std::map<int, int>> ranks;
    std::map<std::string, std::map<int, double>> distances;
};

YearlyRankTable yearly_ranks(std::span<const PerformanceRecord> performances) {
    int first_year = 0, last_year = 0;
    bool any = false;
    for (const auto& rec : performances) {
        if (!any || rec.date.year < first_year) first_year = rec.date.year;
        if (!any || rec.date.year > last_year) last_year = rec.date.year;
        any = true;
    }
    YearlyRankTable table;
    if (!any) return table;

    for (int year = first_year; year <= last_year; ++year) {
        const auto trajectories =
            build_trajectories(performances, YearRange{year, year});
        if (trajectories.empty()) continue;
        std::vector<std::pair<std::string, double>> dist;
        dist.reserve(trajectories.size());
        for (const auto& t : trajectories)
            dist.emplace_back(t.musician_id, travel_distance_km(t));
        for (const auto& [musician, rank] : yearly_quintile_ranks(dist))
            table.ranks[musician][year] = rank;
        for (const auto& [musician, km] : dist) table.distances[musician][year] = km;
    }
    return table;
}

}  // namespace

std::vector<CareerSummary> career_summaries(
    std::span<const PerformanceRecord> performances) {
    const auto table = yearly_ranks(performances);
    std::vector<CareerSummary> out;
    for (const auto& [musician, by_year] : table.ranks) {
        if (by_year.size() < 2) continue;
        std::vector<int> sequence;
        sequence.reserve(by_year.size());
        for (const auto& [year, rank] : by_year) sequence.push_back(rank);
        CareerSummary summary;
        summary.musician_id = musician;
        summary.type = career_type(sequence);
        double mean = 0.0;
        for (const int r : sequence) mean += r;
        summary.mean_rank = mean / static_cast<double>(sequence.size());
        summary.delta = sequence.front() - sequence.back();
        out.push_back(std::move(summary));
    }
    return out;
}

std::vector<CareerCurvePoint> career_curves(
    std::span<const PerformanceRecord> performances) {
    const auto summaries = career_summaries(performances);
    std::map<std::string, CareerType> type_of;
    for (const auto& s : summaries) type_of[s.musician_id] = s.type;

    const auto cohorts = cohort_years(performances);
    const auto table = yearly_ranks(performances);

    // (type, career age) -> welford-style accumulation
    std::map<std::pair<int, int>, std::array<double, 3>> acc;  // n, sum, sumsq
    for (const auto& [musician, by_year] : table.distances) {
        auto type_it = type_of.find(musician);
        if (type_it == type_of.end()) continue;
        const int start = cohorts.at(musician);
        for (const auto& [year, km] : by_year) {
            auto& a = acc[{static_cast<int>(type_it->second), year - start}];
            a[0] += 1.0;
            a[1] += km;
            a[2] += km * km;
        }
    }

    std::vector<CareerCurvePoint> out;
    for (const auto& [key, a] : acc) {
        CareerCurvePoint p;
        p.type = static_cast<CareerType>(key.first);
        p.career_age = key.second;
        p.n = static_cast<int>(a[0]);
        p.mean_km = a[1] / a[0];
        const double var = a[0] > 1 ? (a[2] - a[1] * a[1] / a[0]) / (a[0] - 1) : 0.0;
        p.sd_km = var > 0.0 ? std::sqrt(var) : 0.0;
        out.push_back(p);
    }
    return out;
}

}  // namespace fieldnet
