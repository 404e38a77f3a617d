#include "fieldnet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fieldnet/csv.hpp"
#include "fieldnet/errors.hpp"
#include "fieldnet/rng.hpp"

#include <nlohmann/json.hpp>

namespace fieldnet {

namespace {

// Stream tags keep entity RNGs independent of each other.
enum Stream : std::uint64_t {
    kStart = 1,
    kIntercept,
    kCohortIntercept,
    kActivity,
    kAttend,
    kRedirect,
    kGigDate,
    kRelease,
    kNoise,
    kTour,
    kPanelX,
    kPanelNoise,
    kPanelCohort,
};

std::uint64_t key(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                  std::uint64_t b = 0) {
    return Rng::mix(Rng::mix(Rng::mix(seed, stream), a), b);
}

constexpr double kKmPerDegreeEquator = 6371.0 * std::numbers::pi / 180.0;

struct Geography {
    // Home cities sit on the equator, packed into one degree of longitude so
    // cross-community hops stay small next to planted tours.
    static double home_lon(int community, int n_communities) {
        return static_cast<double>(community) / std::max(1, n_communities);
    }
};

Date pick_date(Rng& rng, int year) {
    const int month = 1 + static_cast<int>(rng.below(12));
    const int day = 1 + static_cast<int>(rng.below(28));
    return Date{year, month, day};
}

}  // namespace

SynthField generate_field(const SynthConfig& cfg) {
    if (cfg.n_musicians < 1 || cfg.n_communities < 1 || cfg.n_years < 1)
        throw ValidationError("synth: counts must be >= 1");
    if (cfg.mixing < 0.0 || cfg.mixing > 1.0)
        throw ValidationError("synth: mixing must lie in [0, 1]");

    SynthField field;
    SynthTruth& truth = field.truth;
    const int k = cfg.n_communities;

    // Community sizes grow with the community index. Assignment follows a
    // repeating pattern where community c appears c+1 times, so a musician's
    // community depends on its index alone and the roster can grow without
    // disturbing anyone.
    truth.community.resize(cfg.n_musicians);
    {
        const int cycle = k * (k + 1) / 2;
        for (int m = 0; m < cfg.n_musicians; ++m) {
            int position = m % cycle;
            int c = 0;
            while (position > c) {
                position -= c + 1;
                ++c;
            }
            truth.community[m] = c;
        }
    }

    truth.start_year.resize(cfg.n_musicians);
    truth.u_musician.resize(cfg.n_musicians);
    std::vector<double> activity(cfg.n_musicians), productivity(cfg.n_musicians);
    for (int m = 0; m < cfg.n_musicians; ++m) {
        Rng start_rng(key(cfg.seed, kStart, m));
        truth.start_year[m] =
            cfg.first_year + static_cast<int>(start_rng.below(
                                 std::max(1, cfg.start_year_span)));
        Rng intercept_rng(key(cfg.seed, kIntercept, m));
        truth.u_musician[m] = std::sqrt(cfg.sigma2_musician) * intercept_rng.normal();
        Rng act_rng(key(cfg.seed, kActivity, m));
        activity[m] = act_rng.normal();
        productivity[m] = act_rng.normal();
    }
    for (int y = cfg.first_year; y < cfg.first_year + std::max(1, cfg.start_year_span);
         ++y) {
        Rng cohort_rng(key(cfg.seed, kCohortIntercept, y));
        truth.u_cohort[y] = std::sqrt(cfg.sigma2_cohort) * cohort_rng.normal();
    }

    auto gig_id = [](int c, int y, int g) {
        return "gig_" + std::to_string(c) + "_" + std::to_string(y) + "_" +
               std::to_string(g);
    };
    auto venue_of = [&](int c, int y, int g) {
        return "ven_" + std::to_string(c) + "_" +
               std::to_string((g + y) % std::max(1, cfg.venues_per_community));
    };

    // Per-gig dates, fixed per (community, year, gig).
    auto gig_date = [&](int c, int y, int g) {
        Rng rng(key(cfg.seed, kGigDate, Rng::mix(c, y), g));
        return pick_date(rng, y);
    };

    for (int m = 0; m < cfg.n_musicians; ++m) {
        const int home = truth.community[m];
        const double home_lon = Geography::home_lon(home, k);
        const std::string musician = "mus_" + std::to_string(m);

        // Latent activity levels follow stationary AR(1) careers, so lagged
        // activity predicts later success within a career; gig attendance and
        // release counts track them, making the planted coefficients visible.
        double act = activity[m];
        double prod = productivity[m];
        for (int y = truth.start_year[m]; y <= cfg.last_year(); ++y) {
            if (y > truth.start_year[m]) {
                Rng latent(key(cfg.seed, kActivity, m, y + 1));
                act = 0.9 * act + 0.436 * latent.normal();
                prod = 0.9 * prod + 0.436 * latent.normal();
            }

            Rng attend(key(cfg.seed, kAttend, m, y));
            Rng redirect(key(cfg.seed, kRedirect, m, y));
            const double p_attend =
                std::clamp(cfg.attend_prob + 0.2 * act, 0.05, 0.95);
            for (int g = 0; g < cfg.gigs_per_community_year; ++g) {
                const bool force = (y == truth.start_year[m] && g == 0);
                if (!force && !attend.bernoulli(p_attend)) continue;
                int community = home;
                if (!force && redirect.bernoulli(cfg.mixing))
                    community = static_cast<int>(redirect.below(k));
                const double lon = Geography::home_lon(community, k);
                field.performances.push_back({musician, gig_id(community, y, g),
                                              venue_of(community, y, g),
                                              gig_date(community, y, g),
                                              "city_" + std::to_string(community), 0.0,
                                              lon});
            }

            // Planted yearly success target, realized as solo round trips.
            Rng noise(key(cfg.seed, kNoise, m, y));
            const double eta = cfg.beta0 + cfg.beta_gigs * act +
                               cfg.beta_releases * prod + truth.u_musician[m] +
                               truth.u_cohort.at(truth.start_year[m]) +
                               std::sqrt(cfg.sigma2_resid) * noise.normal();
            const double target_km = std::expm1(std::clamp(eta, 0.0, 11.0));
            truth.eta[{m, y}] = eta;
            truth.planted_km[{m, y}] = target_km;

            const int stops = cfg.tour_stops_per_year;
            if (stops > 0 && target_km > 0.0) {
                const double leg_km = target_km / (2.0 * stops);
                const double delta_deg =
                    std::min(170.0, leg_km / kKmPerDegreeEquator);
                for (int s = 0; s < stops; ++s) {
                    const std::string suffix = std::to_string(m) + "_" +
                                               std::to_string(y) + "_" +
                                               std::to_string(s);
                    // Out and back: a gig away, then one at home.
                    const int month = 2 + 10 * s / std::max(1, stops);
                    field.performances.push_back(
                        {musician, "tour_" + suffix, "tven_" + suffix,
                         Date{y, month, 10}, "tcity_" + suffix, 0.0,
                         home_lon + delta_deg});
                    field.performances.push_back(
                        {musician, "tour_home_" + suffix, "thome_" + suffix,
                         Date{y, month, 20}, "city_" + std::to_string(home), 0.0,
                         home_lon});
                }
            }

            Rng release_rng(key(cfg.seed, kRelease, m, y));
            const int n_releases = std::max(
                0, static_cast<int>(std::lround(cfg.releases_per_year + prod +
                                                0.5 * release_rng.normal())));
            for (int r = 0; r < n_releases; ++r) {
                int community = home;
                if (release_rng.bernoulli(cfg.mixing))
                    community = static_cast<int>(release_rng.below(k));
                const std::string label =
                    "lab_" + std::to_string(community) + "_" +
                    std::to_string(release_rng.below(
                        std::max(1, cfg.labels_per_community)));
                int style_community = home;
                if (release_rng.bernoulli(cfg.mixing))
                    style_community = static_cast<int>(release_rng.below(k));
                const auto style = [&](int c) {
                    return "sty_" + std::to_string(c) + "_" +
                           std::to_string(release_rng.below(
                               std::max(1, cfg.styles_per_community)));
                };
                const std::string release = "rel_" + std::to_string(m) + "_" +
                                            std::to_string(y) + "_" +
                                            std::to_string(r);
                const Date date = pick_date(release_rng, y);
                const std::string first_style = style(style_community);
                field.releases.push_back({musician, release, label, first_style, date});
                if (release_rng.bernoulli(cfg.second_style_prob)) {
                    const std::string second = style(style_community);
                    if (second != first_style)
                        field.releases.push_back(
                            {musician, release, label, second, date});
                }
            }
        }
    }

    // Pre-period activity for censoring tests: one early gig per planted
    // musician, taken from the tail of the roster.
    for (int i = 0; i < cfg.n_pre_period && i < cfg.n_musicians; ++i) {
        const int m = cfg.n_musicians - 1 - i;
        const int home = truth.community[m];
        field.performances.push_back({"mus_" + std::to_string(m), "gig_pre_" +
                                          std::to_string(m),
                                      "ven_" + std::to_string(home) + "_0",
                                      Date{cfg.first_year - 1, 6, 15},
                                      "city_" + std::to_string(home), 0.0,
                                      Geography::home_lon(home, k)});
    }

    // Stable global order: by date, then musician, then gig. Makes the
    // emitted CSV independent of generation loop order.
    std::stable_sort(field.performances.begin(), field.performances.end(),
                     [](const PerformanceRecord& a, const PerformanceRecord& b) {
                         if (a.date != b.date) return a.date < b.date;
                         if (a.musician_id != b.musician_id)
                             return a.musician_id < b.musician_id;
                         return a.gig_id < b.gig_id;
                     });
    std::stable_sort(field.releases.begin(), field.releases.end(),
                     [](const ReleaseRecord& a, const ReleaseRecord& b) {
                         if (a.date != b.date) return a.date < b.date;
                         if (a.musician_id != b.musician_id)
                             return a.musician_id < b.musician_id;
                         return a.release_id < b.release_id;
                     });
    return field;
}

void write_truth_json(std::ostream& out, const SynthConfig& cfg,
                      const SynthTruth& truth) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["beta"] = {{"intercept", cfg.beta0},
                 {"gig_activity", cfg.beta_gigs},
                 {"release_activity", cfg.beta_releases}};
    j["variance"] = {{"musician", cfg.sigma2_musician},
                     {"cohort", cfg.sigma2_cohort},
                     {"residual", cfg.sigma2_resid}};
    j["mixing"] = cfg.mixing;
    nlohmann::ordered_json musicians = nlohmann::ordered_json::array();
    for (std::size_t m = 0; m < truth.community.size(); ++m) {
        nlohmann::ordered_json entry;
        entry["id"] = "mus_" + std::to_string(m);
        entry["community"] = truth.community[m];
        entry["start_year"] = truth.start_year[m];
        entry["intercept"] = truth.u_musician[m];
        musicians.push_back(std::move(entry));
    }
    j["musicians"] = std::move(musicians);
    nlohmann::ordered_json cohorts = nlohmann::ordered_json::object();
    for (const auto& [year, u] : truth.u_cohort) cohorts[std::to_string(year)] = u;
    j["cohort_intercepts"] = std::move(cohorts);
    nlohmann::ordered_json targets = nlohmann::ordered_json::array();
    for (const auto& [my, km] : truth.planted_km)
        targets.push_back({{"musician", my.first},
                           {"year", my.second},
                           {"eta", truth.eta.at(my)},
                           {"km", km}});
    j["yearly_targets"] = std::move(targets);
    out << j.dump(2) << '\n';
}

PanelSynth generate_panel(const PanelSynthConfig& cfg) {
    if (cfg.beta.empty()) throw ValidationError("panel synth: beta needs an intercept");
    const int n_cov = static_cast<int>(cfg.beta.size()) - 1;

    PanelSynth out;
    out.beta = cfg.beta;
    out.sigma2_musician = cfg.sigma2_musician;
    out.sigma2_cohort = cfg.sigma2_cohort;
    out.sigma2_resid = cfg.sigma2_resid;
    for (int j = 0; j < n_cov; ++j)
        out.covariate_names.push_back("x" + std::to_string(j + 1));

    std::vector<double> u_m(cfg.n_musicians), u_c(cfg.n_cohorts);
    for (int m = 0; m < cfg.n_musicians; ++m) {
        Rng rng(key(cfg.seed, kIntercept, m));
        u_m[m] = std::sqrt(cfg.sigma2_musician) * rng.normal();
    }
    for (int c = 0; c < cfg.n_cohorts; ++c) {
        Rng rng(key(cfg.seed, kPanelCohort, c));
        u_c[c] = std::sqrt(cfg.sigma2_cohort) * rng.normal();
    }

    PanelTable& panel = out.panel;
    panel.columns = out.covariate_names;
    panel.columns.emplace_back("y");
    panel.data.assign(panel.columns.size(), {});

    for (int m = 0; m < cfg.n_musicians; ++m) {
        const int cohort = m % cfg.n_cohorts;
        for (int r = 0; r < cfg.rows_per_musician; ++r) {
            Rng x_rng(key(cfg.seed, kPanelX, m, r));
            Rng e_rng(key(cfg.seed, kPanelNoise, m, r));
            double y = cfg.beta[0] + u_m[m] + u_c[cohort] +
                       std::sqrt(cfg.sigma2_resid) * e_rng.normal();
            for (int j = 0; j < n_cov; ++j) {
                const double x = x_rng.normal();
                panel.data[j].push_back(x);
                y += cfg.beta[j + 1] * x;
            }
            panel.data[n_cov].push_back(y);
            panel.musician_ids.push_back("m" + std::to_string(m));
            panel.years.push_back(r);
            panel.cohorts.push_back(2000 + cohort);
        }
    }
    return out;
}

}  // namespace fieldnet
