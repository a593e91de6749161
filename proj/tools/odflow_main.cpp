// odflow: command line driver for the OD-flow pipeline:
// simulate → ingest → aggregate → graph → train → evaluate → ablate → report.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odflow/chains.hpp"
#include "odflow/common.hpp"
#include "odflow/csv.hpp"
#include "odflow/eval.hpp"
#include "odflow/graph.hpp"
#include "odflow/ingest.hpp"
#include "odflow/models.hpp"
#include "odflow/svg.hpp"
#include "odflow/synth.hpp"

namespace fs = std::filesystem;
using namespace odflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
    std::string out_dir;
};

struct SynthArgs {
    int buildings = 22;
    int agents = 2000;
    int weeks = 4;
    double ping_rate = 1.5;
    double enrolment_coupling = 1.0;
};

struct GraphArgs {
    std::string edge_weight = "raw";
    std::string self_loops = "on";
};

struct TrainArgs {
    int interval = 15;
    int epochs = 300;
    double lr = 1e-3;
    std::size_t hidden_dim = 32;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool with_enrolment = false;
    int max_gap_min = 60;
};

void add_synth_options(CLI::App* cmd, SynthArgs& args) {
    cmd->add_option("--buildings", args.buildings, "Number of campus buildings")->capture_default_str();
    cmd->add_option("--agents", args.agents, "Number of simulated devices")->capture_default_str();
    cmd->add_option("--weeks", args.weeks, "Simulated duration in weeks")->capture_default_str();
    cmd->add_option("--ping-rate", args.ping_rate, "Mean pings per agent per 15 min while present")
        ->capture_default_str();
    cmd->add_option("--enrolment-coupling", args.enrolment_coupling,
                    "Multiplier linking class size to attendance")
        ->capture_default_str();
}

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
    cmd->add_option("--edge-weight", args.edge_weight, "Edge weight transform: raw|inverse|unit")
        ->check(CLI::IsMember({"raw", "inverse", "unit"}))
        ->capture_default_str();
    cmd->add_option("--self-loops", args.self_loops, "Add self loops before normalization: on|off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
}

graph::GraphOptions graph_options_of(const GraphArgs& args) {
    graph::GraphOptions options;
    options.weight_mode = graph::edge_weight_mode_from_string(args.edge_weight);
    options.self_loops = args.self_loops == "on";
    return options;
}

fs::path require_file(const fs::path& path) {
    if (!fs::exists(path)) throw ValidationError("missing input file: " + path.string());
    return path;
}

std::vector<graph::Building> buildings_from_mapping(const std::vector<ingest::ApMapping>& mapping) {
    // Building position = centroid of its access points.
    std::map<std::string, std::pair<std::size_t, graph::Building>> acc;
    for (const auto& m : mapping) {
        auto& slot = acc[m.building_id];
        slot.second.id = m.building_id;
        slot.second.lat += m.lat;
        slot.second.lon += m.lon;
        slot.first += 1;
    }
    std::vector<graph::Building> buildings;
    buildings.reserve(acc.size());
    for (auto& [id, slot] : acc) {
        slot.second.lat /= static_cast<double>(slot.first);
        slot.second.lon /= static_cast<double>(slot.first);
        buildings.push_back(slot.second);
    }
    return buildings;
}

std::vector<ingest::ApMapping> load_mapping_file(const fs::path& path) {
    std::ifstream in(require_file(path));
    return ingest::load_ap_mapping(in);
}

// Every command records the exact configuration it ran with; the file is
// loadable back through --config.
void write_provenance(const fs::path& out_dir, const std::string& command,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string text = "# odflow " + command + " configuration\n";
    for (const auto& [key, value] : entries) text += key + " = " + value + "\n";
    write_text_file(out_dir / ("run_config_" + command + ".ini"), text);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
}

int cmd_simulate(const CommonArgs& common, const SynthArgs& synth_args, std::uint64_t seed) {
    fs::create_directories(common.out_dir);
    synth::SynthConfig config;
    config.n_buildings = synth_args.buildings;
    config.n_agents = synth_args.agents;
    config.weeks = synth_args.weeks;
    config.seed = seed;
    config.ping_rate = synth_args.ping_rate;
    config.enrolment_coupling = synth_args.enrolment_coupling;

    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);

    const fs::path out(common.out_dir);
    synth::write_logs_csv(sim, campus, out / "wifi_logs.csv");
    synth::write_mapping_csv(campus, out / "ap_mapping.csv");
    synth::write_schedule_csv(campus, out / "schedule.csv");
    synth::write_truth_csvs(sim, campus, out / "truth_occupancy.csv", out / "truth_flows.csv");
    write_provenance(out, "simulate",
                     {{"seed", std::to_string(seed)},
                      {"buildings", std::to_string(config.n_buildings)},
                      {"agents", std::to_string(config.n_agents)},
                      {"weeks", std::to_string(config.weeks)},
                      {"ping-rate", fmt(config.ping_rate)},
                      {"enrolment-coupling", fmt(config.enrolment_coupling)}});
    std::cout << "simulate: " << sim.pings.size() << " log rows, " << sim.truth.transitions.size()
              << " transitions -> " << common.out_dir << "\n";
    return kExitOk;
}

int cmd_ingest(const CommonArgs& common, const std::string& logs, const std::string& mapping,
               const std::string& salt) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    const fs::path log_path = logs.empty() ? out / "wifi_logs.csv" : fs::path(logs);
    const fs::path map_path = mapping.empty() ? out / "ap_mapping.csv" : fs::path(mapping);
    auto ap_mapping = load_mapping_file(map_path);

    std::ifstream raw(require_file(log_path));
    std::ofstream anon(out / "anon_logs.csv");
    ingest::IngestReport report = ingest::anonymize_logs(raw, ap_mapping, salt, anon);
    anon.close();
    write_text_file(out / "ingest_report.json", report.to_json());
    write_provenance(out, "ingest",
                     {{"logs", log_path.string()}, {"mapping", map_path.string()}, {"salt", salt}});
    std::cout << "ingest: " << report.records_out << " records, " << report.rows_skipped << " skipped, "
              << report.unmapped_ssid << " unmapped\n";
    return kExitOk;
}

int cmd_aggregate(const CommonArgs& common, int interval, int max_gap_min, bool with_enrolment,
                  const GraphArgs& graph_args) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    auto mapping = load_mapping_file(out / "ap_mapping.csv");
    std::ifstream anon_in(require_file(out / "anon_logs.csv"));
    auto logs = ingest::load_anon_logs(anon_in);

    std::vector<ingest::ScheduleRecord> schedule;
    const fs::path schedule_path = out / "schedule.csv";
    if (fs::exists(schedule_path)) {
        std::ifstream sched_in(schedule_path);
        schedule = ingest::load_schedule(sched_in);
    } else if (with_enrolment) {
        throw ValidationError("missing input file: " + schedule_path.string());
    }

    std::vector<std::string> building_ids;
    for (const auto& b : buildings_from_mapping(mapping)) building_ids.push_back(b.id);
    chains::AggregateOptions options;
    options.width_minutes = interval;
    options.max_gap_seconds = static_cast<std::int64_t>(max_gap_min) * 60;
    chains::Aggregates aggregates =
        chains::aggregate_logs(logs, building_ids, schedule.empty() ? nullptr : &schedule, options);

    graph::OdGraph od_graph = graph::build_od_graph(buildings_from_mapping(mapping), graph_options_of(graph_args));
    chains::FeatureTable table =
        chains::build_feature_table(aggregates.snapshots, aggregates.flows, od_graph, with_enrolment);

    const std::string w = std::to_string(interval);
    chains::write_snapshots_csv(aggregates.snapshots, out / ("snapshots_" + w + ".csv"));
    chains::write_flows_csv(aggregates.flows, aggregates.snapshots.buildings, out / ("flows_" + w + ".csv"));
    chains::write_features_csv(table, od_graph, out / ("features_" + w + ".csv"));
    write_provenance(out, "aggregate",
                     {{"interval", w},
                      {"max-gap-min", std::to_string(max_gap_min)},
                      {"with-enrolment", with_enrolment ? "true" : "false"},
                      {"edge-weight", graph_args.edge_weight},
                      {"self-loops", graph_args.self_loops}});
    std::cout << "aggregate: " << aggregates.n_legs << " trip legs over " << aggregates.snapshots.grid.count
              << " intervals of " << interval << " min\n";
    return kExitOk;
}

int cmd_graph(const CommonArgs& common, const GraphArgs& graph_args) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    auto mapping = load_mapping_file(out / "ap_mapping.csv");
    graph::OdGraph od_graph = graph::build_od_graph(buildings_from_mapping(mapping), graph_options_of(graph_args));
    graph::write_nodes_csv(od_graph, out / "nodes.csv");
    graph::write_edges_csv(od_graph, out / "edges.csv");
    graph::write_matrix_csv(od_graph.norm_adjacency, out / "norm_adjacency.csv");
    write_provenance(out, "graph", {{"edge-weight", graph_args.edge_weight}, {"self-loops", graph_args.self_loops}});
    std::cout << "graph: " << od_graph.nodes.size() << " nodes, " << od_graph.edges.size() << " edges\n";
    return kExitOk;
}

int cmd_train(const CommonArgs& common, const std::string& model_name, const TrainArgs& train_args,
              const GraphArgs& graph_args) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    auto mapping = load_mapping_file(out / "ap_mapping.csv");
    graph::OdGraph od_graph = graph::build_od_graph(buildings_from_mapping(mapping), graph_options_of(graph_args));

    const std::string w = std::to_string(train_args.interval);
    std::ifstream features_in(require_file(out / ("features_" + w + ".csv")));
    chains::FeatureTable table = chains::load_features_csv(features_in, od_graph);
    if (table.with_enrolment != train_args.with_enrolment)
        throw ValidationError("features_" + w + ".csv was aggregated with a different enrolment setting; rerun aggregate");

    eval::TrainOptions options;
    options.epochs = train_args.epochs;
    options.lr = train_args.lr;
    options.hidden_dim = train_args.hidden_dim;
    options.seed = train_args.seed;
    options.train_fraction = train_args.train_fraction;

    const models::ModelKind kind = models::model_kind_from_string(model_name);
    eval::TrainHistory history;
    eval::TrainedModel model = eval::train_model(kind, od_graph, table, options, &history);
    eval::Predictions pred = eval::predict_test(model, od_graph, table);
    eval::MetricsReport report = eval::compute_metrics(pred.predicted, pred.observed, model.target_scaler);
    report.interval_minutes = train_args.interval;
    report.model = model_name;
    report.seed = train_args.seed;
    report.with_enrolment = train_args.with_enrolment;

    const std::string stem = model_name + "_" + w + "min";
    write_text_file(out / ("history_" + stem + ".csv"), eval::history_csv(history));
    write_text_file(out / ("checkpoint_" + stem + ".json"), eval::checkpoint_to_json(model, options));
    {
        std::ofstream pred_out(out / ("predictions_" + stem + ".csv"));
        pred_out << "observed,predicted\n";
        for (std::size_t i = 0; i < pred.observed.size(); ++i) {
            pred_out << fmt(model.target_scaler.inverse_value(0, pred.observed[i])) << ','
                     << fmt(model.target_scaler.inverse_value(0, pred.predicted[i])) << '\n';
        }
    }
    nlohmann::json manifest;
    manifest["model"] = model_name;
    manifest["interval_minutes"] = train_args.interval;
    manifest["seed"] = train_args.seed;
    manifest["hidden_dim"] = options.hidden_dim;
    manifest["epochs"] = options.epochs;
    manifest["lr"] = options.lr;
    auto columns = chains::FeatureTable::numeric_column_names(train_args.with_enrolment);
    columns.push_back("tod");
    columns.push_back("dow");
    manifest["feature_columns"] = columns;
    manifest["metrics"] = {{"rmse_scaled", report.rmse_scaled ? nlohmann::json(*report.rmse_scaled) : nlohmann::json()},
                           {"srmse", report.srmse ? nlohmann::json(*report.srmse) : nlohmann::json()},
                           {"corr", report.pearson ? nlohmann::json(*report.pearson) : nlohmann::json()},
                           {"r2", report.r2 ? nlohmann::json(*report.r2) : nlohmann::json()}};
    write_text_file(out / ("manifest_" + stem + ".json"), manifest.dump(2) + "\n");
    write_provenance(out, "train",
                     {{"model", model_name},
                      {"interval", w},
                      {"epochs", std::to_string(options.epochs)},
                      {"lr", fmt(options.lr)},
                      {"hidden-dim", std::to_string(options.hidden_dim)},
                      {"train-fraction", fmt(options.train_fraction)},
                      {"seed", std::to_string(options.seed)},
                      {"with-enrolment", train_args.with_enrolment ? "true" : "false"},
                      {"edge-weight", graph_args.edge_weight},
                      {"self-loops", graph_args.self_loops}});
    std::cout << "train: " << model_name << " @" << w << "min rmse_scaled="
              << (report.rmse_scaled ? fmt(*report.rmse_scaled) : "na") << " srmse="
              << (report.srmse ? fmt(*report.srmse) : "na") << "\n";
    return kExitOk;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& seeds) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(seeds);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw ValidationError("empty seed list");
    return out;
}

int cmd_evaluate(const CommonArgs& common, const SynthArgs& synth_args, const TrainArgs& train_args,
                 const GraphArgs& graph_args, const std::string& seeds, int threads, const std::string& salt) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    eval::BenchmarkConfig config;
    config.base.n_buildings = synth_args.buildings;
    config.base.n_agents = synth_args.agents;
    config.base.weeks = synth_args.weeks;
    config.base.ping_rate = synth_args.ping_rate;
    config.base.enrolment_coupling = synth_args.enrolment_coupling;
    config.seeds = parse_seed_list(seeds);
    config.train.epochs = train_args.epochs;
    config.train.lr = train_args.lr;
    config.train.hidden_dim = train_args.hidden_dim;
    config.train.train_fraction = train_args.train_fraction;
    config.with_enrolment = train_args.with_enrolment;
    config.dataset.max_gap_seconds = static_cast<std::int64_t>(train_args.max_gap_min) * 60;
    config.dataset.graph_options = graph_options_of(graph_args);
    config.dataset.salt = salt;
    config.threads = threads;
    config.out_dir = out / "bench";

    const auto t0 = std::chrono::steady_clock::now();
    eval::BenchmarkResult result = eval::run_benchmark(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json summary;
    summary["wall_seconds"] = wall;
    summary["cells"] = nlohmann::json::array();
    for (const auto& cell : result.cells) {
        summary["cells"].push_back({{"interval", cell.report.interval_minutes},
                                    {"model", cell.report.model},
                                    {"seed", cell.report.seed},
                                    {"rmse_scaled", cell.report.rmse_scaled ? nlohmann::json(*cell.report.rmse_scaled)
                                                                            : nlohmann::json()},
                                    {"wall_seconds", cell.wall_seconds}});
    }
    write_text_file(out / "bench" / "summary.json", summary.dump(2) + "\n");
    write_provenance(out, "evaluate",
                     {{"seeds", seeds},
                      {"epochs", std::to_string(train_args.epochs)},
                      {"lr", fmt(train_args.lr)},
                      {"hidden-dim", std::to_string(train_args.hidden_dim)},
                      {"train-fraction", fmt(train_args.train_fraction)},
                      {"with-enrolment", train_args.with_enrolment ? "true" : "false"},
                      {"max-gap-min", std::to_string(train_args.max_gap_min)},
                      {"edge-weight", graph_args.edge_weight},
                      {"self-loops", graph_args.self_loops},
                      {"buildings", std::to_string(synth_args.buildings)},
                      {"agents", std::to_string(synth_args.agents)},
                      {"weeks", std::to_string(synth_args.weeks)},
                      {"ping-rate", fmt(synth_args.ping_rate)},
                      {"enrolment-coupling", fmt(synth_args.enrolment_coupling)},
                      {"threads", std::to_string(threads)},
                      {"salt", salt}});
    std::cout << "evaluate: " << result.cells.size() << " cells in " << fmt(wall) << " s -> "
              << (out / "bench" / "metrics.csv").string() << "\n";
    return kExitOk;
}

int cmd_ablate(const CommonArgs& common, const SynthArgs& synth_args, const TrainArgs& train_args,
               const GraphArgs& graph_args, const std::string& seeds, int threads, const std::string& salt) {
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    eval::AblationConfig config;
    config.base.n_buildings = synth_args.buildings;
    config.base.n_agents = synth_args.agents;
    config.base.weeks = synth_args.weeks;
    config.base.ping_rate = synth_args.ping_rate;
    config.base.enrolment_coupling = synth_args.enrolment_coupling;
    config.interval_minutes = train_args.interval;
    config.seeds = parse_seed_list(seeds);
    config.train.epochs = train_args.epochs;
    config.train.lr = train_args.lr;
    config.train.hidden_dim = train_args.hidden_dim;
    config.train.train_fraction = train_args.train_fraction;
    config.dataset.max_gap_seconds = static_cast<std::int64_t>(train_args.max_gap_min) * 60;
    config.dataset.graph_options = graph_options_of(graph_args);
    config.dataset.salt = salt;
    config.threads = threads;
    config.out_dir = out / "ablation";

    eval::AblationResult result = eval::run_ablation(config);
    write_provenance(out, "ablate",
                     {{"seeds", seeds},
                      {"interval", std::to_string(train_args.interval)},
                      {"epochs", std::to_string(train_args.epochs)},
                      {"lr", fmt(train_args.lr)},
                      {"hidden-dim", std::to_string(train_args.hidden_dim)},
                      {"enrolment-coupling", fmt(synth_args.enrolment_coupling)}});
    double with_sum = 0.0, without_sum = 0.0;
    int n = 0;
    for (const auto& arm : result.arms) {
        (arm.with_enrolment ? with_sum : without_sum) += arm.final_test_loss;
        n += arm.with_enrolment ? 1 : 0;
    }
    std::cout << "ablate: mean final test loss with=" << fmt(with_sum / std::max(1, n)) << " without="
              << fmt(without_sum / std::max(1, n)) << "\n";
    return kExitOk;
}

std::vector<std::pair<double, double>> read_predictions(const fs::path& path) {
    std::ifstream in(path);
    csv::Reader reader(in);
    std::vector<std::pair<double, double>> points;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() < 2) continue;
        points.emplace_back(std::stod(std::string(fields[0])), std::stod(std::string(fields[1])));
    }
    return points;
}

eval::TrainHistory read_history(const fs::path& path) {
    std::ifstream in(path);
    csv::Reader reader(in);
    eval::TrainHistory history;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() < 3) continue;
        history.train_loss.push_back(std::stod(std::string(fields[1])));
        history.test_loss.push_back(std::stod(std::string(fields[2])));
    }
    return history;
}

int cmd_report(const CommonArgs& common) {
    const fs::path out(common.out_dir);
    if (!fs::exists(out)) throw ValidationError("missing run directory: " + out.string());
    bool produced = false;

    // Observed-vs-predicted scatter data per interval, from the headline model
    // predictions of either a train run or the benchmark.
    for (int width : {15, 30, 60}) {
        const std::string w = std::to_string(width);
        fs::path source = out / ("predictions_gcn_" + w + "min.csv");
        if (!fs::exists(source)) source = out / "bench" / ("predictions_gcn_" + w + "min.csv");
        if (!fs::exists(source)) continue;
        auto points = read_predictions(source);
        if (points.empty()) continue;
        std::vector<double> obs, pred;
        obs.reserve(points.size());
        pred.reserve(points.size());
        std::string csv_text = "observed,predicted\n";
        for (const auto& [o, p] : points) {
            obs.push_back(o);
            pred.push_back(p);
            csv_text += fmt(o) + ',' + fmt(p) + '\n';
        }
        write_text_file(out / ("scatter_" + w + "min.csv"), csv_text);
        write_text_file(out / ("scatter_" + w + "min.svg"),
                        svg::scatter_chart(obs, pred, "Observed vs predicted flow (" + w + " min)",
                                           "observed flow", "predicted flow"));
        produced = true;
    }

    // Loss curves for every history file present.
    std::vector<fs::path> history_files;
    for (const fs::path dir : {out, out / "bench", out / "ablation"}) {
        if (!fs::exists(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("history_", 0) == 0 && entry.path().extension() == ".csv")
                history_files.push_back(entry.path());
        }
    }
    std::sort(history_files.begin(), history_files.end());
    for (const auto& path : history_files) {
        eval::TrainHistory history = read_history(path);
        if (history.train_loss.empty()) continue;
        std::vector<double> epochs(history.train_loss.size());
        for (std::size_t i = 0; i < epochs.size(); ++i) epochs[i] = static_cast<double>(i);
        std::vector<svg::Series> series{{"train loss", epochs, history.train_loss},
                                        {"test loss", epochs, history.test_loss}};
        fs::path target = path;
        target.replace_extension(".svg");
        const std::string stem = path.stem().string();
        write_text_file(target, svg::line_chart(series, stem, "epoch", "mse (scaled)"));
        produced = true;
    }

    // Ablation overlay: the with/without test-loss pair of the first seed.
    const fs::path ablation_dir = out / "ablation";
    if (fs::exists(ablation_dir)) {
        std::vector<fs::path> with_files, without_files;
        for (const auto& entry : fs::directory_iterator(ablation_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("ablation_history_with_", 0) == 0) with_files.push_back(entry.path());
            if (name.rfind("ablation_history_without_", 0) == 0) without_files.push_back(entry.path());
        }
        std::sort(with_files.begin(), with_files.end());
        std::sort(without_files.begin(), without_files.end());
        if (!with_files.empty() && !without_files.empty()) {
            eval::TrainHistory with = read_history(with_files.front());
            eval::TrainHistory without = read_history(without_files.front());
            std::vector<double> epochs(with.test_loss.size());
            for (std::size_t i = 0; i < epochs.size(); ++i) epochs[i] = static_cast<double>(i);
            std::vector<double> epochs2(without.test_loss.size());
            for (std::size_t i = 0; i < epochs2.size(); ++i) epochs2[i] = static_cast<double>(i);
            std::vector<svg::Series> series{{"with enrolment", epochs, with.test_loss},
                                            {"without enrolment", epochs2, without.test_loss}};
            write_text_file(out / "ablation_loss.svg",
                            svg::line_chart(series, "Enrolment ablation, test loss", "epoch", "mse (scaled)"));
            produced = true;
        }
    }

    if (!produced) throw ValidationError("no reportable artifacts under " + out.string());
    std::cout << "report: charts written to " << out.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OD-flow toolkit: occupancy and origin-destination flow forecasting from WiFi logs"};
    app.require_subcommand(1);

    CommonArgs common;
    SynthArgs synth_args;
    GraphArgs graph_args;
    TrainArgs train_args;
    std::uint64_t sim_seed = 1;
    std::string logs_file, mapping_file;
    std::string salt = "odflow-v1";
    std::string model_name = "gcn";
    std::string seeds = "1,2,3,4,5";
    std::string ablate_seeds = "1,2,3";
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", common.out_dir, "Run directory for artifacts")->required();
        cmd->set_config("--config", "", "Read options from a key = value file");
        cmd->allow_config_extras(false);
        return cmd;
    };

    CLI::App* simulate = add_common(app.add_subcommand("simulate", "Generate a synthetic campus dataset"));
    simulate->add_option("--seed", sim_seed, "Simulation seed")->capture_default_str();
    add_synth_options(simulate, synth_args);

    CLI::App* ingest_cmd = add_common(app.add_subcommand("ingest", "Anonymize raw WiFi logs"));
    ingest_cmd->add_option("--logs", logs_file, "Raw log CSV (default <out-dir>/wifi_logs.csv)");
    ingest_cmd->add_option("--mapping", mapping_file, "AP mapping CSV (default <out-dir>/ap_mapping.csv)");
    ingest_cmd->add_option("--salt", salt, "Dataset hashing salt")->capture_default_str();

    CLI::App* aggregate = add_common(app.add_subcommand("aggregate", "Aggregate mobility features and flows"));
    aggregate->add_option("--interval", train_args.interval, "Interval width in minutes")
        ->check(CLI::IsMember({15, 30, 60}))
        ->capture_default_str();
    aggregate->add_option("--max-gap-min", train_args.max_gap_min, "Max gap between logs in one trip leg")
        ->capture_default_str();
    aggregate->add_flag("--with-enrolment", train_args.with_enrolment, "Join schedule enrolment features");
    add_graph_options(aggregate, graph_args);

    CLI::App* graph_cmd = add_common(app.add_subcommand("graph", "Build and export the OD graph"));
    add_graph_options(graph_cmd, graph_args);

    CLI::App* train = add_common(app.add_subcommand("train", "Train one model on aggregated features"));
    train->add_option("--model", model_name, "Model: gcn|mlp|lr")
        ->check(CLI::IsMember({"gcn", "mlp", "lr"}))
        ->capture_default_str();
    train->add_option("--interval", train_args.interval, "Interval width in minutes")
        ->check(CLI::IsMember({15, 30, 60}))
        ->capture_default_str();
    train->add_option("--epochs", train_args.epochs, "Training epochs")->capture_default_str();
    train->add_option("--lr", train_args.lr, "Adam learning rate")->capture_default_str();
    train->add_option("--hidden-dim", train_args.hidden_dim, "Hidden layer width")->capture_default_str();
    train->add_option("--train-fraction", train_args.train_fraction, "Chronological train share")
        ->capture_default_str();
    train->add_option("--seed", train_args.seed, "Initialization seed")->capture_default_str();
    train->add_flag("--with-enrolment", train_args.with_enrolment, "Use enrolment feature columns");
    add_graph_options(train, graph_args);

    CLI::App* evaluate = add_common(app.add_subcommand("evaluate", "Run the full benchmark grid"));
    evaluate->add_option("--seeds", seeds, "Comma-separated seed grid")->capture_default_str();
    evaluate->add_option("--epochs", train_args.epochs, "Training epochs")->capture_default_str();
    evaluate->add_option("--lr", train_args.lr, "Adam learning rate")->capture_default_str();
    evaluate->add_option("--hidden-dim", train_args.hidden_dim, "Hidden layer width")->capture_default_str();
    evaluate->add_option("--train-fraction", train_args.train_fraction, "Chronological train share")
        ->capture_default_str();
    evaluate->add_option("--max-gap-min", train_args.max_gap_min, "Max gap between logs in one trip leg")
        ->capture_default_str();
    evaluate->add_flag("--with-enrolment", train_args.with_enrolment, "Use enrolment feature columns");
    evaluate->add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();
    evaluate->add_option("--salt", salt, "Dataset hashing salt")->capture_default_str();
    add_synth_options(evaluate, synth_args);
    add_graph_options(evaluate, graph_args);

    CLI::App* ablate = add_common(app.add_subcommand("ablate", "Paired enrolment ablation runs"));
    ablate->add_option("--seeds", ablate_seeds, "Comma-separated seeds")->capture_default_str();
    ablate->add_option("--interval", train_args.interval, "Interval width in minutes")
        ->check(CLI::IsMember({15, 30, 60}))
        ->capture_default_str();
    ablate->add_option("--epochs", train_args.epochs, "Training epochs")->capture_default_str();
    ablate->add_option("--lr", train_args.lr, "Adam learning rate")->capture_default_str();
    ablate->add_option("--hidden-dim", train_args.hidden_dim, "Hidden layer width")->capture_default_str();
    ablate->add_option("--max-gap-min", train_args.max_gap_min, "Max gap between logs in one trip leg")
        ->capture_default_str();
    ablate->add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();
    ablate->add_option("--salt", salt, "Dataset hashing salt")->capture_default_str();
    add_synth_options(ablate, synth_args);
    add_graph_options(ablate, graph_args);

    CLI::App* report = add_common(app.add_subcommand("report", "Emit plot data and SVG charts"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(common, synth_args, sim_seed);
        if (ingest_cmd->parsed()) return cmd_ingest(common, logs_file, mapping_file, salt);
        if (aggregate->parsed())
            return cmd_aggregate(common, train_args.interval, train_args.max_gap_min, train_args.with_enrolment,
                                 graph_args);
        if (graph_cmd->parsed()) return cmd_graph(common, graph_args);
        if (train->parsed()) return cmd_train(common, model_name, train_args, graph_args);
        if (evaluate->parsed())
            return cmd_evaluate(common, synth_args, train_args, graph_args, seeds, threads, salt);
        if (ablate->parsed())
            return cmd_ablate(common, synth_args, train_args, graph_args, ablate_seeds, threads, salt);
        if (report->parsed()) return cmd_report(common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
