#include <doctest.h>

#include <cmath>
#include <map>

#include "fieldnet/errors.hpp"
#include "fieldnet/rng.hpp"
#include "fieldnet/success.hpp"

using namespace fieldnet;

namespace {

constexpr double kBerlinLat = 52.52, kBerlinLon = 13.405;
constexpr double kLondonLat = 51.5074, kLondonLon = -0.1278;
constexpr double kParisLat = 48.8566, kParisLon = 2.3522;

Visit visit(const char* city, double lat, double lon, int month, int day = 1) {
    return {city, lat, lon, Date{2005, month, day}};
}

TravelTrajectory traj(std::vector<Visit> visits) {
    return {"m", std::move(visits)};
}

}  // namespace

TEST_CASE("single visit travels nowhere") {
    CHECK(travel_distance_km(traj({visit("berlin", kBerlinLat, kBerlinLon, 1)})) == 0.0);
    CHECK(travel_distance_km(traj({})) == 0.0);
}

TEST_CASE("Berlin to London is about 932 km") {
    const double d = haversine_km(kBerlinLat, kBerlinLon, kLondonLat, kLondonLon);
    CHECK(std::abs(d - 932.0) <= 1.0);
}

TEST_CASE("a round trip doubles the distance") {
    const double leg = haversine_km(kBerlinLat, kBerlinLon, kLondonLat, kLondonLon);
    const double total =
        travel_distance_km(traj({visit("berlin", kBerlinLat, kBerlinLon, 1),
                                 visit("london", kLondonLat, kLondonLon, 2),
                                 visit("berlin", kBerlinLat, kBerlinLon, 3)}));
    CHECK(total == doctest::Approx(2.0 * leg).epsilon(1e-12));
    CHECK(std::abs(total - 1864.0) <= 2.0);
}

TEST_CASE("repeating the final visit adds nothing") {
    const auto base = traj({visit("berlin", kBerlinLat, kBerlinLon, 1),
                            visit("london", kLondonLat, kLondonLon, 2)});
    auto extended = base;
    extended.visits.push_back(visit("london", kLondonLat, kLondonLon, 3));
    CHECK(travel_distance_km(extended) == travel_distance_km(base));
}

TEST_CASE("visit order changes the total") {
    const double a =
        travel_distance_km(traj({visit("berlin", kBerlinLat, kBerlinLon, 1),
                                 visit("london", kLondonLat, kLondonLon, 2),
                                 visit("paris", kParisLat, kParisLon, 3)}));
    const double b =
        travel_distance_km(traj({visit("london", kLondonLat, kLondonLon, 1),
                                 visit("berlin", kBerlinLat, kBerlinLon, 2),
                                 visit("paris", kParisLat, kParisLon, 3)}));
    CHECK(std::abs(a - b) > 100.0);
}

TEST_CASE("trajectories sort by date with stable ties") {
    std::vector<PerformanceRecord> records = {
        {"m", "g2", "v", Date{2005, 3, 1}, "b", 1.0, 1.0},
        {"m", "g1", "v", Date{2005, 1, 1}, "a", 0.0, 0.0},
        {"m", "g3", "v", Date{2005, 3, 1}, "c", 2.0, 2.0},  // same day as g2
    };
    const auto trajectories = build_trajectories(records, YearRange{2005, 2005});
    REQUIRE(trajectories.size() == 1);
    const auto& visits = trajectories[0].visits;
    REQUIRE(visits.size() == 3);
    CHECK(visits[0].city_id == "a");
    CHECK(visits[1].city_id == "b");  // input order preserved on the tie
    CHECK(visits[2].city_id == "c");
}

TEST_CASE("five distinct distances spread over all ranks") {
    const std::vector<std::pair<std::string, double>> distances = {
        {"a", 50.0}, {"b", 40.0}, {"c", 30.0}, {"d", 20.0}, {"e", 10.0}};
    const auto ranks = yearly_quintile_ranks(distances);
    CHECK(ranks.at("a") == 1);
    CHECK(ranks.at("b") == 2);
    CHECK(ranks.at("c") == 3);
    CHECK(ranks.at("d") == 4);
    CHECK(ranks.at("e") == 5);
}

TEST_CASE("top 20% of ten musicians get rank 1") {
    std::vector<std::pair<std::string, double>> distances;
    for (int i = 0; i < 10; ++i)
        distances.emplace_back("m" + std::to_string(i), 100.0 - i);
    const auto ranks = yearly_quintile_ranks(distances);
    CHECK(ranks.at("m0") == 1);
    CHECK(ranks.at("m1") == 1);
    CHECK(ranks.at("m2") == 2);
    CHECK(ranks.at("m9") == 5);
}

TEST_CASE("all-equal distances share one rank") {
    std::vector<std::pair<std::string, double>> distances;
    for (int i = 0; i < 7; ++i) distances.emplace_back("m" + std::to_string(i), 42.0);
    const auto ranks = yearly_quintile_ranks(distances);
    for (const auto& [musician, rank] : ranks) CHECK(rank == ranks.at("m0"));
}

TEST_CASE("larger distance never ranks worse") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, double>> distances;
        const int n = 1 + static_cast<int>(rng.below(40));
        for (int i = 0; i < n; ++i)
            distances.emplace_back("m" + std::to_string(i),
                                   std::floor(rng.uniform() * 20.0));
        const auto ranks = yearly_quintile_ranks(distances);
        for (const auto& [ma, da] : distances)
            for (const auto& [mb, db] : distances)
                if (da > db) CHECK(ranks.at(ma) <= ranks.at(mb));
    }
}

TEST_CASE("career type thresholds") {
    CHECK(career_type(std::vector<int>{1, 1, 2}) == CareerType::StableSuccessful);
    CHECK(career_type(std::vector<int>{5, 4, 5}) == CareerType::StableUnsuccessful);
    CHECK(career_type(std::vector<int>{4, 3, 2}) == CareerType::Upward);
    CHECK(career_type(std::vector<int>{2, 3, 4}) == CareerType::Downward);
    CHECK(career_type(std::vector<int>{3, 2, 4, 3}) == CareerType::StableMediocre);
}

TEST_CASE("career type needs two ranked years") {
    CHECK_THROWS_AS(career_type(std::vector<int>{3}), ValidationError);
}

TEST_CASE("career typing respects precedence on random sequences") {
    Rng rng(13);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<int> ranks(2 + rng.below(14));
        for (auto& r : ranks) r = 1 + static_cast<int>(rng.below(5));
        const CareerType type = career_type(ranks);

        double mean = 0.0;
        for (const int r : ranks) mean += r;
        mean /= static_cast<double>(ranks.size());
        const int delta = ranks.front() - ranks.back();

        if (mean <= 2.0) CHECK(type == CareerType::StableSuccessful);
        else if (mean >= 4.0) CHECK(type == CareerType::StableUnsuccessful);
        else if (delta > 0) CHECK(type == CareerType::Upward);
        else if (delta < 0) CHECK(type == CareerType::Downward);
        else CHECK(type == CareerType::StableMediocre);
    }
}

TEST_CASE("career summaries rank within calendar years") {
    // Two musicians over three years; m1 always travels farther.
    std::vector<PerformanceRecord> records;
    for (int y = 2005; y <= 2007; ++y) {
        records.push_back({"m1", "a" + std::to_string(y), "v", Date{y, 1, 1}, "berlin",
                           kBerlinLat, kBerlinLon});
        records.push_back({"m1", "b" + std::to_string(y), "v", Date{y, 6, 1}, "london",
                           kLondonLat, kLondonLon});
        records.push_back({"m2", "c" + std::to_string(y), "v", Date{y, 1, 1}, "berlin",
                           kBerlinLat, kBerlinLon});
        records.push_back({"m2", "d" + std::to_string(y), "v", Date{y, 6, 1}, "paris",
                           kParisLat, kParisLon});
    }
    const auto summaries = career_summaries(records);
    REQUIRE(summaries.size() == 2);
    std::map<std::string, CareerSummary> by_id;
    for (const auto& s : summaries) by_id[s.musician_id] = s;
    // With two musicians per year the ranks are 1 and 3.
    CHECK(by_id.at("m1").type == CareerType::StableSuccessful);
    CHECK(by_id.at("m2").type == CareerType::StableMediocre);
    CHECK(by_id.at("m1").mean_rank < by_id.at("m2").mean_rank);
    CHECK(by_id.at("m1").delta == 0);

    const auto curves = career_curves(records);
    CHECK(!curves.empty());
    for (const auto& p : curves) {
        CHECK(p.n > 0);
        CHECK(p.mean_km >= 0.0);
    }
}
