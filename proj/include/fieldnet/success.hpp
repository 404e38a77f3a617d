#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fieldnet/records.hpp"

namespace fieldnet {

// Great-circle distance, spherical earth with R = 6371 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct Visit {
    std::string city_id;
    double lat = 0.0;
    double lon = 0.0;
    Date date;
};

// Time-ordered city visits of one musician; the same city may appear many
// times, and the visit order matters for the summed distance.
struct TravelTrajectory {
    std::string musician_id;
    std::vector<Visit> visits;
};

// One trajectory per musician appearing in the window, visits sorted by date
// (stable, so same-day visits keep input order). Musicians ordered by first
// appearance.
std::vector<TravelTrajectory> build_trajectories(
    std::span<const PerformanceRecord> performances, YearRange window);

// Sum of leg distances between consecutive visits; 0 for fewer than 2 visits.
double travel_distance_km(const TravelTrajectory& trajectory);

// Quintile ranks from the year's distance distribution: rank 1 = top 20%,
// rank 5 = bottom. Ties share the rank of the best-placed tied musician.
std::unordered_map<std::string, int> yearly_quintile_ranks(
    const std::vector<std::pair<std::string, double>>& distances);

enum class CareerType {
    StableSuccessful,
    StableMediocre,
    StableUnsuccessful,
    Upward,
    Downward,
};

const char* to_string(CareerType type);

// Classifies a year-ordered rank sequence. Precedence: mean rank <= 2 ->
// stable successful; mean >= 4 -> stable unsuccessful; then delta = first -
// last rank: positive -> upward, negative -> downward, else stable mediocre.
// Requires at least 2 observed years.
CareerType career_type(std::span<const int> ranks);

struct CareerSummary {
    std::string musician_id;
    CareerType type = CareerType::StableMediocre;
    double mean_rank = 0.0;
    int delta = 0;
};

// Ranks every musician active in each calendar year by that year's travel
// distance and types all careers with >= 2 ranked years.
std::vector<CareerSummary> career_summaries(
    std::span<const PerformanceRecord> performances);

struct CareerCurvePoint {
    CareerType type = CareerType::StableMediocre;
    int career_age = 0;
    double mean_km = 0.0;
    double sd_km = 0.0;
    int n = 0;
};

// Average yearly travel distance by career age for each career type.
std::vector<CareerCurvePoint> career_curves(
    std::span<const PerformanceRecord> performances);

}  // namespace fieldnet
