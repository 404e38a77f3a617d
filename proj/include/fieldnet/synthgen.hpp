#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fieldnet/panel.hpp"
#include "fieldnet/records.hpp"

namespace fieldnet {

// Seeded generator of performance/release traces with planted community
// structure and a planted linear success model, used as the ground-truth
// oracle for pipeline tests.
//
// Musicians belong to home communities of unequal size. Each community owns
// venues, labels, and styles in one home city; a practice is redirected to a
// uniformly drawn community with probability `mixing`, so mixing = 0 keeps
// all four networks community-pure and mixing = 1 erases the partition.
// Per-year success targets come from
//   eta = beta0 + beta_gigs z(activity) + beta_releases z(productivity)
//         + u_musician + u_cohort + noise,
// realized as solo round trips to a synthetic city at the exact distance
// (the round trips never enter the networks: single-musician gigs are
// filtered out there). Realized travel approximates the target up to
// boundary legs between years.
struct SynthConfig {
    int n_musicians = 200;
    int first_year = 2001;
    int n_years = 16;
    int n_communities = 8;
    double mixing = 0.15;
    int venues_per_community = 3;
    int labels_per_community = 2;
    int styles_per_community = 2;
    int gigs_per_community_year = 6;
    double attend_prob = 0.6;
    int releases_per_year = 2;
    double second_style_prob = 0.25;
    int tour_stops_per_year = 2;
    int start_year_span = 3;  // cohorts spread over [first_year, first_year+span-1]
    int n_pre_period = 0;     // musicians planted with activity before first_year
    double beta0 = 5.5;
    double beta_gigs = 0.5;
    double beta_releases = 0.15;
    double sigma2_musician = 0.5;
    double sigma2_cohort = 0.05;
    double sigma2_resid = 0.15;
    std::uint64_t seed = 1;

    int last_year() const { return first_year + n_years - 1; }
};

struct SynthTruth {
    std::vector<int> community;           // per musician
    std::vector<int> start_year;          // planted cohort
    std::vector<double> u_musician;
    std::map<int, double> u_cohort;       // keyed by start year
    std::map<std::pair<int, int>, double> eta;         // (musician, year)
    std::map<std::pair<int, int>, double> planted_km;  // yearly target distance
};

struct SynthField {
    std::vector<PerformanceRecord> performances;
    std::vector<ReleaseRecord> releases;
    SynthTruth truth;
};

SynthField generate_field(const SynthConfig& config);

void write_truth_json(std::ostream& out, const SynthConfig& config,
                      const SynthTruth& truth);

// Direct panel generator with exact mixed-model ground truth, for estimator
// recovery tests: covariates are iid standard normal, the outcome is
// X beta + u_musician + u_cohort + noise.
struct PanelSynthConfig {
    int n_musicians = 250;
    int rows_per_musician = 25;
    int n_cohorts = 20;
    std::vector<double> beta = {1.0, 0.5, -0.3, 0.8};  // intercept first
    double sigma2_musician = 1.0;
    double sigma2_cohort = 0.5;
    double sigma2_resid = 2.0;
    std::uint64_t seed = 7;
};

struct PanelSynth {
    PanelTable panel;
    std::vector<std::string> covariate_names;
    std::vector<double> beta;
    double sigma2_musician = 0.0;
    double sigma2_cohort = 0.0;
    double sigma2_resid = 0.0;
};

PanelSynth generate_panel(const PanelSynthConfig& config);

}  // namespace fieldnet
