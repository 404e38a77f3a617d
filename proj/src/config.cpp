#include "fieldnet/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fieldnet/csv.hpp"
#include "fieldnet/errors.hpp"

namespace fieldnet {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

bool parse_bool(const std::string& v, const std::string& k) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config: " + k + " expects true/false, got \"" + v + "\"");
}

int parse_int_or_throw(const std::string& v, const std::string& k) {
    int out = 0;
    if (!csv::parse_int(v, out))
        throw ValidationError("config: " + k + " expects an integer, got \"" + v + "\"");
    return out;
}

double parse_double_or_throw(const std::string& v, const std::string& k) {
    double out = 0.0;
    if (!csv::parse_double(v, out))
        throw ValidationError("config: " + k + " expects a number, got \"" + v + "\"");
    return out;
}

std::vector<int> parse_years(const std::string& v, const std::string& k) {
    std::vector<int> out;
    const auto range_pos = v.find("..");
    if (range_pos != std::string::npos) {
        const int first = parse_int_or_throw(v.substr(0, range_pos), k);
        const int last = parse_int_or_throw(v.substr(range_pos + 2), k);
        if (last < first) throw ValidationError("config: " + k + " range reversed");
        for (int y = first; y <= last; ++y) out.push_back(y);
        return out;
    }
    for (const auto part : csv::split(v))
        out.push_back(parse_int_or_throw(trim(part), k));
    return out;
}

std::vector<NetworkKind> parse_networks(const std::string& v) {
    std::vector<NetworkKind> out;
    for (const auto part : csv::split(v)) {
        const std::string name = trim(part);
        if (name == "cogig") out.push_back(NetworkKind::CoGig);
        else if (name == "covenue") out.push_back(NetworkKind::CoVenue);
        else if (name == "colabel") out.push_back(NetworkKind::CoLabel);
        else if (name == "costyle") out.push_back(NetworkKind::CoStyle);
        else throw ValidationError("config: unknown network \"" + name + "\"");
    }
    return out;
}

std::string years_to_string(const std::vector<int>& years) {
    std::string out;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(years[i]);
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void RunConfig::apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ValidationError("config: expected key=value, got \"" + kv + "\"");
    const std::string k = trim(kv.substr(0, eq));
    const std::string v = trim(kv.substr(eq + 1));

    if (k == "performances") performances_path = v;
    else if (k == "releases") releases_path = v;
    else if (k == "output_dir") output_dir = v;
    else if (k == "panel_file") panel_file = v;
    else if (k == "observation_start") observation_start = parse_int_or_throw(v, k);
    else if (k == "observation_end") observation_end = parse_int_or_throw(v, k);
    else if (k == "anchor_years") anchor_years = parse_years(v, k);
    else if (k == "iv_width") iv_width = parse_int_or_throw(v, k);
    else if (k == "dv_width") dv_width = parse_int_or_throw(v, k);
    else if (k == "networks") networks = parse_networks(v);
    else if (k == "closeness_component_scaled")
        closeness_component_scaled = parse_bool(v, k);
    else if (k == "strict_parse") strict_parse = parse_bool(v, k);
    else if (k == "min_career_age") min_career_age = parse_int_or_throw(v, k);
    else if (k == "min_observations") min_observations = parse_int_or_throw(v, k);
    else if (k == "fit_preset") fit_preset = v;
    else if (k == "write_graphml") write_graphml = parse_bool(v, k);
    else if (k == "seed") seed = static_cast<std::uint64_t>(parse_int_or_throw(v, k));
    else if (k == "synth_musicians") synth.n_musicians = parse_int_or_throw(v, k);
    else if (k == "synth_first_year") synth.first_year = parse_int_or_throw(v, k);
    else if (k == "synth_years") synth.n_years = parse_int_or_throw(v, k);
    else if (k == "synth_communities") synth.n_communities = parse_int_or_throw(v, k);
    else if (k == "synth_mixing") synth.mixing = parse_double_or_throw(v, k);
    else if (k == "synth_gigs_per_community_year")
        synth.gigs_per_community_year = parse_int_or_throw(v, k);
    else if (k == "synth_attend_prob") synth.attend_prob = parse_double_or_throw(v, k);
    else if (k == "synth_releases_per_year")
        synth.releases_per_year = parse_int_or_throw(v, k);
    else if (k == "synth_tour_stops") synth.tour_stops_per_year = parse_int_or_throw(v, k);
    else if (k == "synth_start_span") synth.start_year_span = parse_int_or_throw(v, k);
    else if (k == "synth_pre_period") synth.n_pre_period = parse_int_or_throw(v, k);
    else throw ValidationError("config: unknown key \"" + k + "\"");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open \"" + path + "\"");
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        try {
            cfg.apply_override(text);
        } catch (const ValidationError& err) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                                  err.what());
        }
    }
    return cfg;
}

void RunConfig::validate() const {
    if (observation_start > observation_end)
        throw ValidationError("config: observation period reversed");
    if (iv_width < 1 || dv_width < 1)
        throw ValidationError("config: window widths must be >= 1");
    if (fit_preset != "full" && fit_preset != "no_performance" &&
        fit_preset != "no_release")
        throw ValidationError("config: unknown fit_preset \"" + fit_preset + "\"");
    if (networks.empty()) throw ValidationError("config: networks must be non-empty");
    if (min_observations < 1 || min_career_age < 0)
        throw ValidationError("config: panel filters out of range");
}

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["performances"] = performances_path;
    kv["releases"] = releases_path;
    kv["output_dir"] = output_dir;
    kv["panel_file"] = panel_file;
    kv["observation_start"] = std::to_string(observation_start);
    kv["observation_end"] = std::to_string(observation_end);
    std::vector<int> anchors = anchor_years;
    if (anchors.empty())
        for (int y = 2003; y <= 2015; ++y) anchors.push_back(y);
    kv["anchor_years"] = years_to_string(anchors);
    kv["iv_width"] = std::to_string(iv_width);
    kv["dv_width"] = std::to_string(dv_width);
    std::string nets;
    for (const auto n : networks) {
        if (!nets.empty()) nets += ',';
        nets += to_string(n);
    }
    kv["networks"] = nets;
    kv["closeness_component_scaled"] = closeness_component_scaled ? "true" : "false";
    kv["strict_parse"] = strict_parse ? "true" : "false";
    kv["min_career_age"] = std::to_string(min_career_age);
    kv["min_observations"] = std::to_string(min_observations);
    kv["fit_preset"] = fit_preset;
    kv["write_graphml"] = write_graphml ? "true" : "false";
    kv["seed"] = std::to_string(seed);
    kv["synth_musicians"] = std::to_string(synth.n_musicians);
    kv["synth_first_year"] = std::to_string(synth.first_year);
    kv["synth_years"] = std::to_string(synth.n_years);
    kv["synth_communities"] = std::to_string(synth.n_communities);
    kv["synth_mixing"] = csv::format_double(synth.mixing);
    kv["synth_gigs_per_community_year"] =
        std::to_string(synth.gigs_per_community_year);
    kv["synth_attend_prob"] = csv::format_double(synth.attend_prob);
    kv["synth_releases_per_year"] = std::to_string(synth.releases_per_year);
    kv["synth_tour_stops"] = std::to_string(synth.tour_stops_per_year);
    kv["synth_start_span"] = std::to_string(synth.start_year_span);
    kv["synth_pre_period"] = std::to_string(synth.n_pre_period);

    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    return out.str();
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

}  // namespace fieldnet
