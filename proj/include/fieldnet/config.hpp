#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fieldnet/metrics.hpp"
#include "fieldnet/synthgen.hpp"

namespace fieldnet {

// Declarative run configuration: `key = value` lines, '#' comments.
// Unknown keys are rejected. All defaults match the standard analysis
// settings; anchor years accept "2003..2015" or a comma list.
struct RunConfig {
    std::string performances_path;
    std::string releases_path;
    std::string output_dir = "out";
    std::string panel_file;  // `fit` input; defaults to <output_dir>/panel.csv

    int observation_start = 2001;
    int observation_end = 2018;
    std::vector<int> anchor_years;  // default 2003..2015
    int iv_width = 3;
    int dv_width = 3;

    std::vector<NetworkKind> networks = {NetworkKind::CoGig, NetworkKind::CoVenue,
                                         NetworkKind::CoLabel, NetworkKind::CoStyle};
    bool closeness_component_scaled = true;
    bool strict_parse = false;
    int min_career_age = 5;
    int min_observations = 5;
    // full | no_performance | no_release
    std::string fit_preset = "full";
    bool write_graphml = true;
    std::uint64_t seed = 1;

    SynthConfig synth;

    static RunConfig from_file(const std::string& path);
    void apply_override(const std::string& key_equals_value);
    void validate() const;

    // Sorted key=value rendering of every setting; its FNV-1a hash stamps
    // all manifests so identical configurations are recognizable.
    std::string canonical() const;
    std::string hash() const;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace fieldnet
