#include "fieldnet/panel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fieldnet/csv.hpp"
#include "fieldnet/errors.hpp"
#include "fieldnet/success.hpp"
#include "fieldnet/windowing.hpp"

namespace fieldnet {

namespace {

constexpr std::array<NetworkKind, 4> kNetworks = {
    NetworkKind::CoGig, NetworkKind::CoVenue, NetworkKind::CoLabel,
    NetworkKind::CoStyle};
constexpr std::array<const char*, 4> kMeasures = {"community", "mainstream",
                                                  "bridging", "constraint"};

double measure_of(const PositionVector& p, std::size_t measure) {
    switch (measure) {
        case 0: return static_cast<double>(p.coreness);
        case 1: return p.closeness;
        case 2: return p.betweenness;
        default: return p.clustering;
    }
}

}  // namespace

const char* const kPanelOutcomeColumn = "log_travel_km";

std::vector<std::string> panel_feature_columns() {
    std::vector<std::string> names = {"n_gigs", "n_releases"};
    for (const NetworkKind net : kNetworks)
        for (const char* measure : kMeasures)
            names.push_back(std::string(to_string(net)) + "_" + measure);
    return names;
}

int PanelTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<double>& PanelTable::col(const std::string& name) const {
    const int i = column_index(name);
    if (i < 0) throw ValidationError("panel has no column \"" + name + "\"");
    return data[i];
}

void zstandardize_by_year(std::vector<double>& column, std::span<const int> years) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < column.size(); ++i) groups[years[i]].push_back(i);
    for (const auto& [year, rows] : groups) {
        double mean = 0.0;
        for (const std::size_t r : rows) mean += column[r];
        mean /= static_cast<double>(rows.size());
        double ss = 0.0;
        for (const std::size_t r : rows) {
            const double d = column[r] - mean;
            ss += d * d;
        }
        const double sd =
            rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
        for (const std::size_t r : rows)
            column[r] = sd > 0.0 ? (column[r] - mean) / sd : 0.0;
    }
}

PanelTable assemble_panel(std::span<const PerformanceRecord> performances,
                          std::span<const ReleaseRecord> releases,
                          std::span<const PositionVector> metrics,
                          const PanelConfig& config) {
    // Coverage check before any work.
    std::set<int> metric_years;
    for (const auto& p : metrics) metric_years.insert(p.year);
    for (const int t : config.anchor_years)
        if (!metric_years.count(t))
            throw ValidationError("anchor year " + std::to_string(t) +
                                  " outside metric coverage");

    // metric lookup: (network, year) -> musician -> position
    std::map<std::pair<int, int>, std::unordered_map<std::string, const PositionVector*>>
        positions;
    for (const auto& p : metrics)
        positions[{static_cast<int>(p.network), p.year}][p.musician_id] = &p;

    const auto cohorts = cohort_years(performances);

    std::unordered_map<std::string, int> last_active;
    for (const auto& rec : performances) {
        auto [it, inserted] = last_active.try_emplace(rec.musician_id, rec.date.year);
        if (rec.date.year > it->second) it->second = rec.date.year;
    }

    std::unordered_set<std::string> censored;
    for (const auto& rec : performances)
        if (rec.date.year < config.observation_start) censored.insert(rec.musician_id);
    for (const auto& rec : releases)
        if (rec.date.year < config.observation_start) censored.insert(rec.musician_id);

    struct Candidate {
        std::string musician;
        int year = 0;
        int cohort = 0;
        int tau = 0;
        double n_gigs = 0.0;
        double n_releases = 0.0;
        std::array<double, 16> features{};
        double dv = 0.0;
    };
    std::vector<Candidate> candidates;

    std::vector<int> anchors = config.anchor_years;
    std::sort(anchors.begin(), anchors.end());

    for (const int t : anchors) {
        const WindowSpec window{t, config.iv_width, config.dv_width};
        const YearRange iv = window.iv();
        const YearRange dv = window.dv();

        // Distinct gigs and releases per musician inside the predictor window.
        std::unordered_map<std::string, std::unordered_set<std::string>> gigs, rels;
        for (const auto& rec : performances)
            if (iv.contains(rec.date.year)) gigs[rec.musician_id].insert(rec.gig_id);
        for (const auto& rec : releases)
            if (iv.contains(rec.date.year)) rels[rec.musician_id].insert(rec.release_id);

        std::unordered_map<std::string, double> dv_km;
        for (const auto& traj : build_trajectories(performances, dv))
            dv_km[traj.musician_id] = travel_distance_km(traj);

        // Deterministic row order: musicians sorted within each anchor year.
        std::vector<std::string> musicians;
        musicians.reserve(gigs.size());
        for (const auto& [musician, gig_set] : gigs) musicians.push_back(musician);
        std::sort(musicians.begin(), musicians.end());

        for (const auto& musician : musicians) {
            const auto cohort_it = cohorts.find(musician);
            if (cohort_it == cohorts.end() || cohort_it->second > t) continue;
            if (last_active.at(musician) - cohort_it->second < config.min_career_age)
                continue;
            if (censored.count(musician)) continue;
            const auto rel_it = rels.find(musician);
            if (rel_it == rels.end() || rel_it->second.empty()) continue;

            Candidate c;
            c.musician = musician;
            c.year = t;
            c.cohort = cohort_it->second;
            c.tau = t - cohort_it->second;
            c.n_gigs = static_cast<double>(gigs.at(musician).size());
            c.n_releases = static_cast<double>(rel_it->second.size());
            for (std::size_t net = 0; net < kNetworks.size(); ++net) {
                const auto& by_musician = positions[{static_cast<int>(kNetworks[net]), t}];
                const auto pos_it = by_musician.find(musician);
                for (std::size_t measure = 0; measure < 4; ++measure)
                    c.features[net * 4 + measure] =
                        pos_it == by_musician.end() ? 0.0
                                                    : measure_of(*pos_it->second, measure);
            }
            const auto km_it = dv_km.find(musician);
            c.dv = std::log1p(km_it == dv_km.end() ? 0.0 : km_it->second);
            candidates.push_back(std::move(c));
        }
    }

    // Minimum-observations filter over the surviving rows.
    std::unordered_map<std::string, int> row_counts;
    for (const auto& c : candidates) ++row_counts[c.musician];
    std::erase_if(candidates, [&](const Candidate& c) {
        return row_counts.at(c.musician) < config.min_observations;
    });

    PanelTable panel;
    panel.columns = {"mid_career", "late_career"};
    const auto feature_names = panel_feature_columns();
    panel.columns.insert(panel.columns.end(), feature_names.begin(),
                         feature_names.end());
    for (const auto& name : feature_names) {
        panel.columns.push_back(name + "_x_mid");
        panel.columns.push_back(name + "_x_late");
    }
    panel.columns.push_back(kPanelOutcomeColumn);
    panel.data.assign(panel.columns.size(), {});

    const std::size_t n = candidates.size();
    for (auto& column : panel.data) column.resize(n, 0.0);
    panel.musician_ids.resize(n);
    panel.years.resize(n);
    panel.cohorts.resize(n);

    for (std::size_t r = 0; r < n; ++r) {
        const Candidate& c = candidates[r];
        panel.musician_ids[r] = c.musician;
        panel.years[r] = c.year;
        panel.cohorts[r] = c.cohort;
        const CareerStage stage = career_stage(c.tau);
        panel.data[0][r] = stage == CareerStage::Mid ? 1.0 : 0.0;
        panel.data[1][r] = stage == CareerStage::Late ? 1.0 : 0.0;
        panel.data[2][r] = c.n_gigs;
        panel.data[3][r] = c.n_releases;
        for (std::size_t k = 0; k < 16; ++k) panel.data[4 + k][r] = c.features[k];
        panel.data[panel.columns.size() - 1][r] = c.dv;
    }

    // Z-score the 18 regressors within anchor year, then form interactions.
    for (std::size_t k = 0; k < feature_names.size(); ++k)
        zstandardize_by_year(panel.data[2 + k], panel.years);
    const std::size_t inter_base = 2 + feature_names.size();
    for (std::size_t k = 0; k < feature_names.size(); ++k) {
        for (std::size_t r = 0; r < n; ++r) {
            const double z = panel.data[2 + k][r];
            panel.data[inter_base + 2 * k][r] = z * panel.data[0][r];
            panel.data[inter_base + 2 * k + 1][r] = z * panel.data[1][r];
        }
    }
    return panel;
}

void write_panel_csv(std::ostream& out, const PanelTable& panel) {
    out << "musician_id,year,cohort";
    for (const auto& name : panel.columns) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < panel.rows(); ++r) {
        out << panel.musician_ids[r] << ',' << panel.years[r] << ','
            << panel.cohorts[r];
        for (const auto& column : panel.data)
            out << ',' << csv::format_double(column[r]);
        out << '\n';
    }
}

PanelTable read_panel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("panel: empty input");
    const auto header = csv::split(csv::strip_cr(line));
    if (header.size() < 4 || header[0] != "musician_id" || header[1] != "year" ||
        header[2] != "cohort")
        throw ValidationError("panel: header mismatch");

    PanelTable panel;
    for (std::size_t i = 3; i < header.size(); ++i)
        panel.columns.emplace_back(header[i]);
    panel.data.assign(panel.columns.size(), {});

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = csv::strip_cr(line);
        if (row.empty()) continue;
        const auto fields = csv::split(row);
        if (fields.size() != header.size())
            throw ValidationError("panel line " + std::to_string(line_no) +
                                  ": wrong field count");
        panel.musician_ids.emplace_back(fields[0]);
        int year = 0, cohort = 0;
        if (!csv::parse_int(fields[1], year) || !csv::parse_int(fields[2], cohort))
            throw ValidationError("panel line " + std::to_string(line_no) +
                                  ": bad year/cohort");
        panel.years.push_back(year);
        panel.cohorts.push_back(cohort);
        for (std::size_t i = 3; i < fields.size(); ++i) {
            double v = 0.0;
            if (!csv::parse_double(fields[i], v))
                throw ValidationError("panel line " + std::to_string(line_no) +
                                      ": bad number \"" + std::string(fields[i]) + "\"");
            panel.data[i - 3].push_back(v);
        }
    }
    return panel;
}

}  // namespace fieldnet
