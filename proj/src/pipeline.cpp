#include "fieldnet/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fieldnet/csv.hpp"
#include "fieldnet/errors.hpp"
#include "fieldnet/graph.hpp"
#include "fieldnet/graph_io.hpp"
#include "fieldnet/lmm.hpp"
#include "fieldnet/metrics.hpp"
#include "fieldnet/panel.hpp"
#include "fieldnet/records.hpp"
#include "fieldnet/report.hpp"
#include "fieldnet/success.hpp"
#include "fieldnet/synthgen.hpp"
#include "fieldnet/windowing.hpp"

namespace fieldnet {

namespace fs = std::filesystem;

namespace {

enum class LogLevel { Debug = 0, Info, Warn, Error };

LogLevel log_level() {
    const char* env = std::getenv("FIELDNET_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "warn") return LogLevel::Warn;
    if (v == "error") return LogLevel::Error;
    return LogLevel::Info;
}

void log_info(const std::string& message) {
    if (log_level() <= LogLevel::Info) std::cerr << "[info] " << message << '\n';
}

template <class F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const ValidationError& err) {
        throw StageError(name, err.what(), 2);
    } catch (const NumericalError& err) {
        throw StageError(name, err.what(), 3);
    } catch (const std::exception& err) {
        throw StageError(name, err.what(), 2);
    }
}

struct LoadedData {
    std::vector<PerformanceRecord> performances;
    std::vector<ReleaseRecord> releases;
};

bool needs_releases(const RunConfig& cfg) {
    for (const auto kind : cfg.networks)
        if (kind == NetworkKind::CoLabel || kind == NetworkKind::CoStyle) return true;
    return false;
}

LoadedData load(const RunConfig& cfg) {
    LoadedData data;
    // The ingest period stays open so activity before observation_start can
    // drive the censoring filter downstream.
    ParseOptions opts;
    opts.strict = cfg.strict_parse;
    opts.period.reset();

    if (cfg.performances_path.empty())
        throw ValidationError("no performances file configured");
    std::ifstream perf(cfg.performances_path);
    if (!perf)
        throw ValidationError("cannot open performances file \"" +
                              cfg.performances_path + "\"");
    auto perf_result = parse_performances(perf, opts);
    if (!perf_result.errors.empty())
        log_info(std::to_string(perf_result.errors.size()) +
                 " performance rows skipped");
    data.performances = std::move(perf_result.records);

    if (needs_releases(cfg)) {
        if (cfg.releases_path.empty())
            throw ValidationError("label/style networks require a releases file");
        std::ifstream rel(cfg.releases_path);
        if (!rel)
            throw ValidationError("cannot open releases file \"" + cfg.releases_path +
                                  "\"");
        auto rel_result = parse_releases(rel, opts);
        if (!rel_result.errors.empty())
            log_info(std::to_string(rel_result.errors.size()) +
                     " release rows skipped");
        data.releases = std::move(rel_result.records);
    }
    return data;
}

std::vector<int> anchors_of(const RunConfig& cfg) {
    if (!cfg.anchor_years.empty()) return cfg.anchor_years;
    std::vector<int> years;
    for (int y = 2003; y <= 2015; ++y) years.push_back(y);
    return years;
}

fs::path ensure_output_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

struct SnapshotResult {
    std::map<std::pair<int, int>, WindowNetwork> networks;  // (kind, year)
    std::vector<PositionVector> metrics;
};

SnapshotResult build_networks(const RunConfig& cfg, const LoadedData& data,
                              bool with_metrics) {
    SnapshotResult result;
    const metrics::Options metric_opts{cfg.closeness_component_scaled};
    for (const int t : anchors_of(cfg)) {
        const WindowSpec window{t, cfg.iv_width, cfg.dv_width};
        for (const NetworkKind kind : cfg.networks) {
            WindowNetwork net = build_window_network(
                data.performances, data.releases, fact_kind_of(kind), window.iv());
            std::ostringstream summary;
            summary << to_string(kind) << " " << t << ": "
                    << net.bipartite.musicians.size() << " musicians, "
                    << net.bipartite.facts.size() << " facts, "
                    << net.projected.edge_count() << " projected edges";
            log_info(summary.str());
            if (with_metrics) {
                auto positions = position_vectors(net.projected, kind, t, metric_opts);
                result.metrics.insert(result.metrics.end(), positions.begin(),
                                      positions.end());
            }
            result.networks.emplace(
                std::pair<int, int>(static_cast<int>(kind), t), std::move(net));
        }
    }
    return result;
}

void write_snapshot_files(const RunConfig& cfg, const SnapshotResult& snap,
                          nlohmann::ordered_json& manifest) {
    const fs::path dir = ensure_output_dir(cfg) / "networks";
    fs::create_directories(dir);
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& [key, net] : snap.networks) {
        const auto kind = static_cast<NetworkKind>(key.first);
        const int year = key.second;
        const std::string base = std::string(to_string(kind)) + "_" +
                                 std::to_string(year);

        const fs::path bipartite_csv = dir / (base + "_bipartite.csv");
        {
            std::ofstream out(bipartite_csv);
            write_edge_list_csv(out, net.bipartite);
        }
        const fs::path projected_csv = dir / (base + ".csv");
        {
            std::ofstream out(projected_csv);
            write_edge_list_csv(out, net.projected);
        }
        std::vector<std::string> files = {bipartite_csv.filename().string(),
                                          projected_csv.filename().string()};
        if (cfg.write_graphml) {
            const fs::path graphml = dir / (base + ".graphml");
            {
                std::ofstream out(graphml);
                write_graphml(out, net.projected);
            }
            const fs::path bipartite_graphml = dir / (base + "_bipartite.graphml");
            {
                std::ofstream out(bipartite_graphml);
                write_graphml(out, net.bipartite);
            }
            files.push_back(graphml.filename().string());
            files.push_back(bipartite_graphml.filename().string());
        }

        nlohmann::ordered_json entry;
        entry["network"] = to_string(kind);
        entry["year"] = year;
        entry["musicians"] = net.bipartite.musicians.size();
        entry["facts"] = net.bipartite.facts.size();
        entry["bipartite_edges"] = net.bipartite.edge_count();
        entry["projected_nodes"] = net.projected.node_count();
        entry["projected_edges"] = net.projected.edge_count();
        entry["max_fact_sum_error"] = max_fact_sum_error(net.bipartite);
        entry["files"] = files;
        entries.push_back(std::move(entry));
    }
    manifest["networks"] = std::move(entries);
}

void write_metrics_csv(const RunConfig& cfg, const std::vector<PositionVector>& rows) {
    std::ofstream out(ensure_output_dir(cfg) / "metrics.csv");
    out << "musician_id,network,year,closeness,coreness,betweenness,clustering\n";
    for (const auto& p : rows)
        out << p.musician_id << ',' << to_string(p.network) << ',' << p.year << ','
            << csv::format_double(p.closeness) << ',' << p.coreness << ','
            << csv::format_double(p.betweenness) << ','
            << csv::format_double(p.clustering) << '\n';
}

void write_career_files(const RunConfig& cfg, const LoadedData& data) {
    const auto summaries = career_summaries(data.performances);
    {
        std::ofstream out(ensure_output_dir(cfg) / "careers.csv");
        out << "musician_id,career_type,mean_rank,delta\n";
        for (const auto& s : summaries)
            out << s.musician_id << ',' << to_string(s.type) << ','
                << csv::format_double(s.mean_rank) << ',' << s.delta << '\n';
    }
    {
        std::ofstream out(ensure_output_dir(cfg) / "career_curves.csv");
        out << "career_type,career_age,mean_km,sd_km,n\n";
        for (const auto& p : career_curves(data.performances))
            out << to_string(p.type) << ',' << p.career_age << ','
                << csv::format_double(p.mean_km) << ',' << csv::format_double(p.sd_km)
                << ',' << p.n << '\n';
    }
}

PanelTable make_panel(const RunConfig& cfg, const LoadedData& data,
                      const std::vector<PositionVector>& metrics) {
    PanelConfig pc;
    pc.anchor_years = anchors_of(cfg);
    pc.iv_width = cfg.iv_width;
    pc.dv_width = cfg.dv_width;
    pc.observation_start = cfg.observation_start;
    pc.min_career_age = cfg.min_career_age;
    pc.min_observations = cfg.min_observations;
    return assemble_panel(data.performances, data.releases, metrics, pc);
}

bool keep_for_preset(const std::string& name, const std::string& preset) {
    const bool performance_based = name.rfind("n_gigs", 0) == 0 ||
                                   name.rfind("cogig_", 0) == 0 ||
                                   name.rfind("covenue_", 0) == 0;
    const bool release_based = name.rfind("n_releases", 0) == 0 ||
                               name.rfind("colabel_", 0) == 0 ||
                               name.rfind("costyle_", 0) == 0;
    if (preset == "no_performance") return !performance_based;
    if (preset == "no_release") return !release_based;
    return true;
}

LmmSpec model_spec(const PanelTable& panel, const std::string& preset,
                   bool interactions) {
    LmmSpec spec;
    spec.fixed_effects = {"mid_career", "late_career"};
    for (const auto& name : panel_feature_columns()) {
        if (!keep_for_preset(name, preset)) continue;
        spec.fixed_effects.push_back(name);
        if (interactions) {
            spec.fixed_effects.push_back(name + "_x_mid");
            spec.fixed_effects.push_back(name + "_x_late");
        }
    }
    (void)panel;
    return spec;
}

void write_fit_files(const RunConfig& cfg, const PanelTable& panel) {
    const LmmFit model1 = fit_lmm(panel, model_spec(panel, cfg.fit_preset, false));
    const LmmFit model2 = fit_lmm(panel, model_spec(panel, cfg.fit_preset, true));

    const fs::path dir = ensure_output_dir(cfg);
    {
        std::ofstream out(dir / "fit_model1.json");
        write_fit_json(out, model1, cfg.hash(), cfg.seed);
    }
    {
        std::ofstream out(dir / "fit_model2.json");
        write_fit_json(out, model2, cfg.hash(), cfg.seed);
    }
    {
        std::ofstream out(dir / "fit_table.txt");
        write_fit_table(out, model1, model2);
    }
}

void write_stage_manifest(const RunConfig& cfg,
                          const std::vector<std::string>& outputs) {
    nlohmann::ordered_json manifest;
    manifest["config_hash"] = cfg.hash();
    manifest["seed"] = cfg.seed;
    manifest["outputs"] = outputs;
    std::ofstream out(ensure_output_dir(cfg) / "manifest.json");
    out << manifest.dump(2) << '\n';
}

nlohmann::ordered_json manifest_skeleton(const RunConfig& cfg) {
    nlohmann::ordered_json manifest;
    manifest["config_hash"] = cfg.hash();
    manifest["seed"] = cfg.seed;
    return manifest;
}

void write_manifest(const RunConfig& cfg, const nlohmann::ordered_json& manifest) {
    std::ofstream out(ensure_output_dir(cfg) / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace

void run_ingest_validate(const RunConfig& cfg) {
    stage("ingest", [&] {
        cfg.validate();
        ParseOptions opts;
        opts.strict = cfg.strict_parse;
        opts.period = YearRange{cfg.observation_start, cfg.observation_end};

        std::ifstream perf(cfg.performances_path);
        if (!perf)
            throw ValidationError("cannot open performances file \"" +
                                  cfg.performances_path + "\"");
        const auto perf_result = parse_performances(perf, opts);
        std::cout << "performances: " << perf_result.rows_parsed << " rows ok, "
                  << perf_result.errors.size() << " rejected\n";
        for (const auto& err : perf_result.errors)
            std::cout << "  line " << err.line << ": " << err.message << '\n';

        std::size_t release_errors = 0;
        if (!cfg.releases_path.empty()) {
            std::ifstream rel(cfg.releases_path);
            if (!rel)
                throw ValidationError("cannot open releases file \"" +
                                      cfg.releases_path + "\"");
            const auto rel_result = parse_releases(rel, opts);
            std::cout << "releases: " << rel_result.rows_parsed << " rows ok, "
                      << rel_result.errors.size() << " rejected\n";
            for (const auto& err : rel_result.errors)
                std::cout << "  line " << err.line << ": " << err.message << '\n';
            release_errors = rel_result.errors.size();
        }
        if (!perf_result.errors.empty() || release_errors > 0)
            throw ValidationError("input contains invalid rows");
    });
}

void run_snapshot(const RunConfig& cfg) {
    stage("snapshot", [&] {
        cfg.validate();
        const LoadedData data = load(cfg);
        const SnapshotResult snap = build_networks(cfg, data, false);
        auto manifest = manifest_skeleton(cfg);
        write_snapshot_files(cfg, snap, manifest);
        write_manifest(cfg, manifest);
    });
}

void run_metrics(const RunConfig& cfg) {
    stage("metrics", [&] {
        cfg.validate();
        const LoadedData data = load(cfg);
        const SnapshotResult snap = build_networks(cfg, data, true);
        write_metrics_csv(cfg, snap.metrics);
        write_stage_manifest(cfg, {"metrics.csv"});
    });
}

void run_careers(const RunConfig& cfg) {
    stage("careers", [&] {
        cfg.validate();
        const LoadedData data = load(cfg);
        write_career_files(cfg, data);
        write_stage_manifest(cfg, {"careers.csv", "career_curves.csv"});
    });
}

void run_panel(const RunConfig& cfg) {
    cfg.validate();
    const LoadedData data = stage("ingest", [&] { return load(cfg); });
    const SnapshotResult snap =
        stage("metrics", [&] { return build_networks(cfg, data, true); });
    stage("panel", [&] {
        const PanelTable panel = make_panel(cfg, data, snap.metrics);
        std::ofstream out(ensure_output_dir(cfg) / "panel.csv");
        write_panel_csv(out, panel);
        write_stage_manifest(cfg, {"panel.csv"});
    });
}

void run_fit(const RunConfig& cfg) {
    stage("fit", [&] {
        cfg.validate();
        const fs::path panel_path = cfg.panel_file.empty()
                                        ? fs::path(cfg.output_dir) / "panel.csv"
                                        : fs::path(cfg.panel_file);
        std::ifstream in(panel_path);
        if (!in)
            throw ValidationError("cannot open panel file \"" + panel_path.string() +
                                  "\"");
        const PanelTable panel = read_panel_csv(in);
        write_fit_files(cfg, panel);
        write_stage_manifest(cfg,
                             {"fit_model1.json", "fit_model2.json", "fit_table.txt"});
    });
}

void run_pipeline(const RunConfig& cfg, bool dry_run) {
    stage("config", [&] {
        cfg.validate();
        if (cfg.performances_path.empty())
            throw ValidationError("no performances file configured");
        if (!fs::exists(cfg.performances_path))
            throw ValidationError("performances file \"" + cfg.performances_path +
                                  "\" does not exist");
        if (needs_releases(cfg) && !fs::exists(cfg.releases_path))
            throw ValidationError("releases file \"" + cfg.releases_path +
                                  "\" does not exist");
    });
    if (dry_run) {
        log_info("dry run: configuration ok, nothing written");
        return;
    }

    const LoadedData data = stage("ingest", [&] { return load(cfg); });
    const SnapshotResult snap =
        stage("snapshot", [&] { return build_networks(cfg, data, true); });

    auto manifest = manifest_skeleton(cfg);
    stage("snapshot", [&] { write_snapshot_files(cfg, snap, manifest); });
    stage("metrics", [&] { write_metrics_csv(cfg, snap.metrics); });
    stage("careers", [&] { write_career_files(cfg, data); });

    const PanelTable panel =
        stage("panel", [&] { return make_panel(cfg, data, snap.metrics); });
    stage("panel", [&] {
        std::ofstream out(ensure_output_dir(cfg) / "panel.csv");
        write_panel_csv(out, panel);
        log_info("panel: " + std::to_string(panel.rows()) + " rows");
    });

    stage("fit", [&] { write_fit_files(cfg, panel); });

    manifest["panel_rows"] = panel.rows();
    manifest["outputs"] = {"metrics.csv",     "careers.csv",
                           "career_curves.csv", "panel.csv",
                           "fit_model1.json", "fit_model2.json",
                           "fit_table.txt"};
    stage("manifest", [&] { write_manifest(cfg, manifest); });
}

void run_synth(const RunConfig& cfg) {
    stage("synth", [&] {
        SynthConfig sc = cfg.synth;
        sc.seed = cfg.seed;
        const SynthField field = generate_field(sc);
        const fs::path dir = ensure_output_dir(cfg);

        {
            std::ofstream out(dir / "performances.csv");
            out << serialize_performances(field.performances);
        }
        {
            std::ofstream out(dir / "releases.csv");
            out << serialize_releases(field.releases);
        }
        {
            std::ofstream out(dir / "truth.json");
            write_truth_json(out, sc, field.truth);
        }

        // Ready-to-run configuration pointing at the generated fixture.
        RunConfig run = cfg;
        run.performances_path = (dir / "performances.csv").string();
        run.releases_path = (dir / "releases.csv").string();
        run.observation_start = sc.first_year;
        run.observation_end = sc.last_year();
        {
            std::ofstream out(dir / "fieldnet.conf");
            out << "# generated fixture configuration\n";
            out << "performances = " << run.performances_path << '\n';
            out << "releases = " << run.releases_path << '\n';
            out << "output_dir = " << (dir / "run").string() << '\n';
            out << "observation_start = " << run.observation_start << '\n';
            out << "observation_end = " << run.observation_end << '\n';
            const int first_anchor = sc.first_year + cfg.iv_width - 1;
            const int last_anchor = sc.last_year() - cfg.dv_width;
            out << "anchor_years = " << first_anchor << ".." << last_anchor << '\n';
            out << "seed = " << cfg.seed << '\n';
        }
        log_info("fixture: " + std::to_string(field.performances.size()) +
                 " performances, " + std::to_string(field.releases.size()) +
                 " releases");
    });
}

}  // namespace fieldnet
