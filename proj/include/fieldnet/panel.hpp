#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fieldnet/metrics.hpp"
#include "fieldnet/records.hpp"

namespace fieldnet {

struct PanelConfig {
    std::vector<int> anchor_years;
    int iv_width = 3;
    int dv_width = 3;
    int observation_start = 2001;
    // Keep musicians whose last performance lies >= this many years after
    // their first one.
    int min_career_age = 5;
    // Keep musicians with at least this many surviving rows.
    int min_observations = 5;
};

// Column-major table of one row per retained (musician, anchor year).
// Column order is fixed: stage dummies, activity baselines, the 16 position
// features grouped by network, then a (mid, late) interaction pair per
// variable, then the outcome. Baselines and features are z-scored within
// anchor year; interactions are products of the z-scored columns with the
// dummies.
struct PanelTable {
    std::vector<std::string> musician_ids;
    std::vector<int> years;
    std::vector<int> cohorts;  // musician start year
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[column][row]

    std::size_t rows() const { return musician_ids.size(); }
    int column_index(const std::string& name) const;  // -1 when absent
    const std::vector<double>& col(const std::string& name) const;
};

// The 18 z-scored regressors in export order (baselines then features).
std::vector<std::string> panel_feature_columns();
// Outcome column name: log1p of the travel distance in the outcome window.
extern const char* const kPanelOutcomeColumn;

// In-place per-year z-standardization with sample sd; a zero-variance year
// group becomes all zeros.
void zstandardize_by_year(std::vector<double>& column, std::span<const int> years);

// Builds the regression panel. `metrics` must cover every anchor year.
// Row filters: musician reaches career age >= min_career_age, has no
// activity before observation_start, has both a gig and a release in the
// predictor window, and keeps >= min_observations such rows.
PanelTable assemble_panel(std::span<const PerformanceRecord> performances,
                          std::span<const ReleaseRecord> releases,
                          std::span<const PositionVector> metrics,
                          const PanelConfig& config);

void write_panel_csv(std::ostream& out, const PanelTable& panel);
PanelTable read_panel_csv(std::istream& in);

}  // namespace fieldnet
