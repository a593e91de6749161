#include "odflow/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "odflow/common.hpp"
#include "odflow/optim.hpp"

#include <nlohmann/json.hpp>

namespace odflow::eval {

namespace {

std::string fmt_double(double v, const char* spec = "%.10g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return std::string(buf);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string("na"); }

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::size_t chrono_boundary(const std::vector<std::size_t>& samples_per_interval, double train_fraction) {
    std::size_t total = 0;
    std::size_t non_empty = 0;
    for (std::size_t c : samples_per_interval) {
        total += c;
        non_empty += c > 0 ? 1 : 0;
    }
    if (non_empty < 2) throw ValidationError("chronological split needs at least 2 distinct intervals");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ValidationError("train fraction must lie strictly between 0 and 1");
    std::size_t cumulative = 0;
    const double target = train_fraction * static_cast<double>(total);
    for (std::size_t p = 0; p < samples_per_interval.size(); ++p) {
        cumulative += samples_per_interval[p];
        if (static_cast<double>(cumulative) >= target) {
            std::size_t boundary = p + 1;  // first test interval
            if (cumulative == total) throw ValidationError("chronological split leaves no test intervals");
            return boundary;
        }
    }
    throw ValidationError("chronological split leaves no test intervals");
}

Split chrono_split(const chains::FeatureTable& table, const SplitConfig& config) {
    const std::size_t s_count = table.sample_intervals();
    std::vector<std::size_t> counts(s_count, table.n_nodes);
    Split split;
    split.total_intervals = s_count;
    split.train_intervals = chrono_boundary(counts, config.train_fraction);
    return split;
}

ScaledData prepare_scaled(const chains::FeatureTable& table, const SplitConfig& config) {
    ScaledData out;
    out.split = chrono_split(table, config);
    out.dataset.n_nodes = table.n_nodes;
    out.dataset.numeric_dim = table.numeric_dim;
    out.dataset.intervals = table.sample_intervals();
    out.dataset.x = table.x;
    out.dataset.y = table.y;
    out.dataset.tod = table.tod;
    out.dataset.dow = table.dow;

    const std::size_t train_rows = out.split.train_intervals * table.n_nodes;
    out.feature_scaler.fit(out.dataset.x.data(), train_rows, table.numeric_dim);
    out.feature_scaler.transform(out.dataset.x.data(), out.dataset.intervals * table.n_nodes, table.numeric_dim);
    out.target_scaler.fit(out.dataset.y.data(), train_rows, 1);
    out.target_scaler.transform(out.dataset.y.data(), out.dataset.intervals * table.n_nodes, 1);
    return out;
}

namespace {

models::ModelConfig make_model_config(const chains::FeatureTable& table, const TrainOptions& options) {
    models::ModelConfig config;
    config.numeric_dim = table.numeric_dim;
    config.hidden_dim = options.hidden_dim;
    config.embed_dim_time = options.embed_dim_time;
    config.embed_dim_dow = options.embed_dim_dow;
    config.time_slots = static_cast<std::size_t>(table.grid.slots_per_day());
    config.seed = options.seed;
    return config;
}

// Design matrix for the linear baseline: scaled numerics plus the discrete
// time features as two extra scaled columns (embeddings are gradient-trained
// and have no closed-form counterpart).
num::Matrix lr_design(const models::NodeDataset& data, std::size_t begin_interval, std::size_t end_interval,
                      const num::MinMaxScaler& time_scaler) {
    const std::size_t v = data.n_nodes, f = data.numeric_dim;
    num::Matrix x((end_interval - begin_interval) * v, f + 2);
    std::size_t r = 0;
    for (std::size_t s = begin_interval; s < end_interval; ++s) {
        const double* src = data.x_at(s);
        const double tod_scaled = time_scaler.transform_value(0, static_cast<double>(data.tod[s]));
        const double dow_scaled = time_scaler.transform_value(1, static_cast<double>(data.dow[s]));
        for (std::size_t i = 0; i < v; ++i, ++r) {
            double* row = x.row(r);
            std::copy(src + i * f, src + (i + 1) * f, row);
            row[f] = tod_scaled;
            row[f + 1] = dow_scaled;
        }
    }
    return x;
}

num::MinMaxScaler fit_time_scaler(const models::NodeDataset& data, std::size_t train_intervals) {
    std::vector<double> cols(train_intervals * 2);
    for (std::size_t s = 0; s < train_intervals; ++s) {
        cols[s * 2] = static_cast<double>(data.tod[s]);
        cols[s * 2 + 1] = static_cast<double>(data.dow[s]);
    }
    num::MinMaxScaler scaler(-1.0, 1.0);
    scaler.fit(cols.data(), train_intervals, 2);
    return scaler;
}

double mean_squared_error(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return a.empty() ? 0.0 : acc / static_cast<double>(a.size());
}

}  // namespace

TrainedModel train_model(models::ModelKind kind, const graph::OdGraph& graph, const chains::FeatureTable& table,
                         const TrainOptions& options, TrainHistory* history) {
    ScaledData scaled = prepare_scaled(table, SplitConfig{options.train_fraction});
    const models::NodeDataset& data = scaled.dataset;
    const std::size_t train_n = scaled.split.train_intervals * data.n_nodes;

    TrainedModel out;
    out.kind = kind;
    out.config = make_model_config(table, options);
    out.feature_scaler = scaled.feature_scaler;
    out.target_scaler = scaled.target_scaler;
    out.split = scaled.split;
    out.interval_minutes = table.grid.width_minutes;
    out.with_enrolment = table.with_enrolment;

    TrainHistory local;
    TrainHistory& hist = history ? *history : local;

    if (kind == models::ModelKind::kLinear) {
        num::MinMaxScaler time_scaler = fit_time_scaler(data, scaled.split.train_intervals);
        num::Matrix x_train = lr_design(data, 0, scaled.split.train_intervals, time_scaler);
        std::vector<double> y_train(data.y.begin(), data.y.begin() + static_cast<std::ptrdiff_t>(train_n));
        if (x_train.rows() < 1) throw ValidationError("linear regression needs at least one training row");
        models::LinearModel lm = models::lr_fit(x_train, y_train);
        num::Matrix x_test = lr_design(data, scaled.split.train_intervals, data.intervals, time_scaler);
        std::vector<double> y_test(data.y.begin() + static_cast<std::ptrdiff_t>(train_n), data.y.end());
        auto train_pred = models::lr_predict(lm, x_train);
        auto test_pred = models::lr_predict(lm, x_test);
        hist.train_loss.push_back(mean_squared_error(train_pred, y_train));
        hist.test_loss.push_back(mean_squared_error(test_pred, y_test));
        hist.epoch_seconds.push_back(0.0);
        out.linear = std::move(lm);
        return out;
    }

    const double inv_n = train_n > 0 ? 1.0 / static_cast<double>(train_n) : 0.0;
    auto run_epochs = [&](auto& trainer) {
        num::AdamOptimizer adam(trainer.params().all(), num::AdamConfig{options.lr, 0.9, 0.999, 1e-8});
        for (int epoch = 0; epoch < options.epochs; ++epoch) {
            const auto t0 = std::chrono::steady_clock::now();
            adam.zero_grad();
            const double sse = trainer.accumulate(0, scaled.split.train_intervals, inv_n);
            const double train_loss = sse * inv_n;
            if (!std::isfinite(train_loss))
                throw std::runtime_error("training aborted: non-finite loss at epoch " + std::to_string(epoch));
            const double test_loss = trainer.loss(scaled.split.train_intervals, data.intervals);
            adam.step();
            hist.train_loss.push_back(train_loss);
            hist.test_loss.push_back(test_loss);
            hist.epoch_seconds.push_back(elapsed_s(t0));
        }
    };

    if (kind == models::ModelKind::kGcn) {
        models::GcnTrainer trainer(graph.norm_adjacency, out.config);
        trainer.attach(&data);
        run_epochs(trainer);
        out.gcn = trainer.params();
    } else {
        models::MlpTrainer trainer(out.config);
        trainer.attach(&data);
        run_epochs(trainer);
        out.mlp = trainer.params();
    }
    return out;
}

Predictions predict_test(const TrainedModel& model, const graph::OdGraph& graph,
                         const chains::FeatureTable& table) {
    // Scale with the scalers the model was trained with; never refit here.
    models::NodeDataset data;
    data.n_nodes = table.n_nodes;
    data.numeric_dim = table.numeric_dim;
    data.intervals = table.sample_intervals();
    data.x = table.x;
    data.y = table.y;
    data.tod = table.tod;
    data.dow = table.dow;
    model.feature_scaler.transform(data.x.data(), data.intervals * data.n_nodes, data.numeric_dim);
    model.target_scaler.transform(data.y.data(), data.intervals * data.n_nodes, 1);

    const std::size_t v = data.n_nodes;
    Predictions out;
    out.observed.assign(data.y.begin() + static_cast<std::ptrdiff_t>(model.split.train_intervals * v),
                        data.y.end());
    out.predicted.reserve(out.observed.size());

    if (model.kind == models::ModelKind::kLinear) {
        num::MinMaxScaler time_scaler = fit_time_scaler(data, model.split.train_intervals);
        num::Matrix x_test = lr_design(data, model.split.train_intervals, data.intervals, time_scaler);
        out.predicted = models::lr_predict(*model.linear, x_test);
        return out;
    }

    num::Matrix yhat;
    if (model.kind == models::ModelKind::kGcn) {
        models::GcnTrainer trainer(graph.norm_adjacency, model.config);
        trainer.params() = *model.gcn;
        trainer.attach(&data);
        for (std::size_t s = model.split.train_intervals; s < data.intervals; ++s) {
            trainer.predict(s, yhat);
            for (std::size_t i = 0; i < v; ++i) out.predicted.push_back(yhat(i, 0));
        }
    } else {
        models::MlpTrainer trainer(model.config);
        trainer.params() = *model.mlp;
        trainer.attach(&data);
        for (std::size_t s = model.split.train_intervals; s < data.intervals; ++s) {
            trainer.predict(s, yhat);
            for (std::size_t i = 0; i < v; ++i) out.predicted.push_back(yhat(i, 0));
        }
    }
    return out;
}

double srmse_raw(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size() || predicted.empty())
        throw std::invalid_argument("srmse: size mismatch or empty");
    double sse = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = predicted[i] - observed[i];
        sse += d * d;
        sum += observed[i];
    }
    const double n = static_cast<double>(observed.size());
    const double mean = sum / n;
    if (mean == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(sse / n) / mean;
}

MetricsReport compute_metrics(const std::vector<double>& pred_scaled, const std::vector<double>& target_scaled,
                              const num::MinMaxScaler& target_scaler) {
    if (pred_scaled.size() != target_scaled.size())
        throw std::invalid_argument("compute_metrics: size mismatch");
    MetricsReport report;
    report.n_samples = pred_scaled.size();
    if (pred_scaled.empty()) return report;
    const double n = static_cast<double>(pred_scaled.size());

    double sse = 0.0, sum_t = 0.0, sum_p = 0.0;
    for (std::size_t i = 0; i < pred_scaled.size(); ++i) {
        const double d = pred_scaled[i] - target_scaled[i];
        sse += d * d;
        sum_t += target_scaled[i];
        sum_p += pred_scaled[i];
    }
    report.rmse_scaled = std::sqrt(sse / n);

    const double mean_t = sum_t / n, mean_p = sum_p / n;
    double sst = 0.0, ssp = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < pred_scaled.size(); ++i) {
        const double dt = target_scaled[i] - mean_t;
        const double dp = pred_scaled[i] - mean_p;
        sst += dt * dt;
        ssp += dp * dp;
        cov += dt * dp;
    }
    if (sst > 0.0) {
        report.r2 = 1.0 - sse / sst;
        if (ssp > 0.0) report.pearson = cov / std::sqrt(sst * ssp);
    }

    std::vector<double> pred_raw = pred_scaled, target_raw = target_scaled;
    target_scaler.inverse_transform(pred_raw.data(), pred_raw.size(), 1);
    target_scaler.inverse_transform(target_raw.data(), target_raw.size(), 1);
    const double s = srmse_raw(pred_raw, target_raw);
    if (std::isfinite(s)) report.srmse = s;
    return report;
}

std::string metrics_csv_header() {
    return "interval,model,seed,with_enrolment,rmse_scaled,srmse,corr,r2,n_samples\n";
}

std::string metrics_csv_row(const MetricsReport& r) {
    std::string row = std::to_string(r.interval_minutes) + ',' + r.model + ',' + std::to_string(r.seed) + ',' +
                      (r.with_enrolment ? "1" : "0") + ',' + fmt_optional(r.rmse_scaled) + ',' +
                      fmt_optional(r.srmse) + ',' + fmt_optional(r.pearson) + ',' + fmt_optional(r.r2) + ',' +
                      std::to_string(r.n_samples) + '\n';
    return row;
}

std::string history_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,test_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        out += std::to_string(e) + ',' + fmt_double(history.train_loss[e], "%.12g") + ',' +
               fmt_double(history.test_loss[e], "%.12g") + '\n';
    }
    return out;
}

namespace {

nlohmann::json scaler_to_json(const num::MinMaxScaler& scaler) {
    nlohmann::json j;
    j["lo"] = scaler.lo();
    j["hi"] = scaler.hi();
    j["min"] = scaler.mins();
    j["max"] = scaler.maxs();
    return j;
}

num::MinMaxScaler scaler_from_json(const nlohmann::json& j) {
    num::MinMaxScaler scaler;
    scaler.restore(j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("min").get<std::vector<double>>(),
                   j.at("max").get<std::vector<double>>());
    return scaler;
}

nlohmann::json param_to_json(const num::Param& p) {
    nlohmann::json j;
    j["name"] = p.name;
    j["rows"] = p.value.rows();
    j["cols"] = p.value.cols();
    j["data"] = std::vector<double>(p.value.values().begin(), p.value.values().end());
    return j;
}

void param_from_json(const nlohmann::json& j, num::Param& p) {
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) throw ValidationError("checkpoint: parameter size mismatch for " + p.name);
    num::Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    p = num::Param(j.at("name").get<std::string>(), std::move(m));
}

}  // namespace

std::string checkpoint_to_json(const TrainedModel& model, const TrainOptions& options) {
    nlohmann::json j;
    j["model"] = models::to_string(model.kind);
    j["interval_minutes"] = model.interval_minutes;
    j["with_enrolment"] = model.with_enrolment;
    j["config"] = {{"numeric_dim", model.config.numeric_dim},
                   {"hidden_dim", model.config.hidden_dim},
                   {"embed_dim_time", model.config.embed_dim_time},
                   {"embed_dim_dow", model.config.embed_dim_dow},
                   {"time_slots", model.config.time_slots},
                   {"seed", model.config.seed}};
    j["train"] = {{"epochs", options.epochs},
                  {"lr", options.lr},
                  {"train_fraction", options.train_fraction},
                  {"train_intervals", model.split.train_intervals},
                  {"total_intervals", model.split.total_intervals}};
    auto columns = chains::FeatureTable::numeric_column_names(model.with_enrolment);
    columns.push_back("tod");
    columns.push_back("dow");
    j["feature_columns"] = columns;
    j["scalers"] = {{"features", scaler_to_json(model.feature_scaler)},
                    {"target", scaler_to_json(model.target_scaler)}};
    if (model.kind == models::ModelKind::kLinear) {
        j["linear"] = {{"weights", model.linear->weights}, {"bias", model.linear->bias}};
    } else {
        nlohmann::json params = nlohmann::json::array();
        auto append = [&params](const std::vector<const num::Param*>& list) {
            for (const num::Param* p : list) params.push_back(param_to_json(*p));
        };
        if (model.kind == models::ModelKind::kGcn)
            append(model.gcn->all());
        else
            append(model.mlp->all());
        j["params"] = params;
    }
    return j.dump(2) + "\n";
}

TrainedModel checkpoint_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    TrainedModel model;
    model.kind = models::model_kind_from_string(j.at("model").get<std::string>());
    model.interval_minutes = j.at("interval_minutes").get<int>();
    model.with_enrolment = j.at("with_enrolment").get<bool>();
    const auto& c = j.at("config");
    model.config.numeric_dim = c.at("numeric_dim").get<std::size_t>();
    model.config.hidden_dim = c.at("hidden_dim").get<std::size_t>();
    model.config.embed_dim_time = c.at("embed_dim_time").get<std::size_t>();
    model.config.embed_dim_dow = c.at("embed_dim_dow").get<std::size_t>();
    model.config.time_slots = c.at("time_slots").get<std::size_t>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.split.train_intervals = j.at("train").at("train_intervals").get<std::size_t>();
    model.split.total_intervals = j.at("train").at("total_intervals").get<std::size_t>();
    model.feature_scaler = scaler_from_json(j.at("scalers").at("features"));
    model.target_scaler = scaler_from_json(j.at("scalers").at("target"));
    if (model.kind == models::ModelKind::kLinear) {
        models::LinearModel lm;
        lm.weights = j.at("linear").at("weights").get<std::vector<double>>();
        lm.bias = j.at("linear").at("bias").get<double>();
        model.linear = std::move(lm);
    } else if (model.kind == models::ModelKind::kGcn) {
        models::GcnParams params = models::GcnParams::init(model.config);
        auto list = params.all();
        const auto& arr = j.at("params");
        if (arr.size() != list.size()) throw ValidationError("checkpoint: parameter count mismatch");
        for (std::size_t i = 0; i < list.size(); ++i) param_from_json(arr[i], *list[i]);
        model.gcn = std::move(params);
    } else {
        models::MlpParams params = models::MlpParams::init(model.config);
        auto list = params.all();
        const auto& arr = j.at("params");
        if (arr.size() != list.size()) throw ValidationError("checkpoint: parameter count mismatch");
        for (std::size_t i = 0; i < list.size(); ++i) param_from_json(arr[i], *list[i]);
        model.mlp = std::move(params);
    }
    return model;
}

const chains::FeatureTable& SeedDataset::table(int width, bool with_enrolment) const {
    auto it = tables.find({width, with_enrolment});
    if (it == tables.end())
        throw ValidationError("no aggregated data for interval width " + std::to_string(width) + " minutes");
    return it->second;
}

SeedDataset build_synthetic_dataset(const synth::SynthConfig& config, const DatasetRequest& request) {
    namespace fs = std::filesystem;
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);

    // Run the real ingest path: emit the raw log CSV, anonymize it, reload.
    const bool to_disk = !request.artifact_dir.empty();
    std::vector<ingest::AnonLogRecord> anon;
    ingest::IngestReport report;
    if (to_disk) {
        fs::create_directories(request.artifact_dir);
        synth::write_logs_csv(sim, campus, request.artifact_dir / "wifi_logs.csv");
        synth::write_mapping_csv(campus, request.artifact_dir / "ap_mapping.csv");
        synth::write_schedule_csv(campus, request.artifact_dir / "schedule.csv");
        synth::write_truth_csvs(sim, campus, request.artifact_dir / "truth_occupancy.csv",
                                request.artifact_dir / "truth_flows.csv");
        std::ifstream raw(request.artifact_dir / "wifi_logs.csv");
        std::ofstream anon_out(request.artifact_dir / "anon_logs.csv");
        std::vector<ingest::ApMapping> mapping;
        {
            std::ifstream map_in(request.artifact_dir / "ap_mapping.csv");
            mapping = ingest::load_ap_mapping(map_in);
        }
        report = ingest::anonymize_logs(raw, mapping, request.salt, anon_out);
        anon_out.close();
        write_text_file(request.artifact_dir / "ingest_report.json", report.to_json());
        std::ifstream anon_in(request.artifact_dir / "anon_logs.csv");
        anon = ingest::load_anon_logs(anon_in);
    } else {
        std::stringstream raw, anon_stream;
        synth::write_logs_csv(sim, campus, raw);
        std::vector<ingest::ApMapping> mapping;
        mapping.reserve(campus.buildings.size());
        for (const auto& b : campus.buildings)
            mapping.push_back(ingest::ApMapping{"AP-" + b.id, b.id, b.lat, b.lon});
        report = ingest::anonymize_logs(raw, mapping, request.salt, anon_stream);
        anon = ingest::load_anon_logs(anon_stream);
    }
    sim.pings.clear();
    sim.pings.shrink_to_fit();

    SeedDataset out;
    out.graph = graph::build_od_graph(campus.buildings, request.graph_options);
    std::vector<std::string> building_ids;
    building_ids.reserve(campus.buildings.size());
    for (const auto& b : campus.buildings) building_ids.push_back(b.id);

    bool any_enrolment = false;
    for (bool arm : request.enrolment_arms) any_enrolment |= arm;
    for (int width : request.widths) {
        chains::AggregateOptions agg_options;
        agg_options.width_minutes = width;
        agg_options.max_gap_seconds = request.max_gap_seconds;
        chains::Aggregates aggregates =
            chains::aggregate_logs(anon, building_ids, any_enrolment ? &campus.schedule : nullptr, agg_options);
        for (bool arm : request.enrolment_arms) {
            out.tables.emplace(std::make_pair(width, arm),
                               chains::build_feature_table(aggregates.snapshots, aggregates.flows, out.graph, arm));
        }
        if (to_disk) {
            chains::write_snapshots_csv(aggregates.snapshots,
                                        request.artifact_dir / ("snapshots_" + std::to_string(width) + ".csv"));
            chains::write_flows_csv(aggregates.flows, aggregates.snapshots.buildings,
                                    request.artifact_dir / ("flows_" + std::to_string(width) + ".csv"));
        }
    }
    return out;
}

namespace {

struct CellSpec {
    int interval;
    models::ModelKind kind;
    std::uint64_t seed;
    std::size_t seed_slot;
};

// Lazily built per-seed datasets shared by the grid workers, freed once the
// seed's last cell completes.
struct SeedSlot {
    std::once_flag once;
    std::shared_ptr<SeedDataset> data;
    std::atomic<int> remaining{0};
};

void write_predictions_csv(const Predictions& pred, const num::MinMaxScaler& target_scaler,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "observed,predicted\n";
    char buf[64];
    for (std::size_t i = 0; i < pred.observed.size(); ++i) {
        const double obs = target_scaler.inverse_value(0, pred.observed[i]);
        const double est = target_scaler.inverse_value(0, pred.predicted[i]);
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", obs, est);
        out << buf;
    }
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    namespace fs = std::filesystem;
    const bool to_disk = !config.out_dir.empty();
    if (to_disk) fs::create_directories(config.out_dir);

    std::vector<CellSpec> cells;
    for (std::size_t si = 0; si < config.seeds.size(); ++si)
        for (int interval : config.intervals)
            for (models::ModelKind kind : config.kinds)
                cells.push_back(CellSpec{interval, kind, config.seeds[si], si});
    // Seed-major execution order so a dataset is built once and retired early.
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<SeedSlot> slots(config.seeds.size());
    const int cells_per_seed = static_cast<int>(config.intervals.size() * config.kinds.size());
    for (auto& slot : slots) slot.remaining = cells_per_seed;

    BenchmarkResult result;
    result.cells.resize(cells.size());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto dataset_request = [&](std::uint64_t seed) {
        DatasetRequest request = config.dataset;
        request.widths = config.intervals;
        request.enrolment_arms = {config.with_enrolment};
        if (to_disk) request.artifact_dir = config.out_dir / ("seed" + std::to_string(seed));
        return request;
    };

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const CellSpec& cell = cells[i];
            try {
                SeedSlot& slot = slots[cell.seed_slot];
                std::call_once(slot.once, [&]() {
                    synth::SynthConfig synth_config = config.base;
                    synth_config.seed = cell.seed;
                    slot.data = std::make_shared<SeedDataset>(
                        build_synthetic_dataset(synth_config, dataset_request(cell.seed)));
                });
                std::shared_ptr<SeedDataset> data = slot.data;
                const auto t0 = std::chrono::steady_clock::now();

                const chains::FeatureTable& table = data->table(cell.interval, config.with_enrolment);
                TrainOptions options = config.train;
                options.seed = cell.seed;
                TrainHistory history;
                TrainedModel model = train_model(cell.kind, data->graph, table, options, &history);
                Predictions pred = predict_test(model, data->graph, table);
                MetricsReport report = compute_metrics(pred.predicted, pred.observed, model.target_scaler);
                report.interval_minutes = cell.interval;
                report.model = models::to_string(cell.kind);
                report.seed = cell.seed;
                report.with_enrolment = config.with_enrolment;

                BenchmarkCell& out = result.cells[i];
                out.report = report;
                out.history = history;
                out.wall_seconds = elapsed_s(t0);

                if (to_disk) {
                    const std::string stem = models::to_string(cell.kind) + "_" + std::to_string(cell.interval) +
                                             "min_seed" + std::to_string(cell.seed);
                    write_text_file(config.out_dir / ("history_" + stem + ".csv"), history_csv(history));
                    write_text_file(config.out_dir / ("checkpoint_" + stem + ".json"),
                                    checkpoint_to_json(model, options));
                    if (cell.seed == config.seeds.front()) {
                        write_predictions_csv(pred, model.target_scaler,
                                              config.out_dir /
                                                  ("predictions_" + models::to_string(cell.kind) + "_" +
                                                   std::to_string(cell.interval) + "min.csv"));
                    }
                }
                if (--slot.remaining == 0) slot.data.reset();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int n_threads = config.threads > 0 ? config.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    if (to_disk) {
        std::string csv = metrics_csv_header();
        for (const auto& cell : result.cells) csv += metrics_csv_row(cell.report);
        write_text_file(config.out_dir / "metrics.csv", csv);
    }
    return result;
}

AblationResult run_ablation(const AblationConfig& config) {
    namespace fs = std::filesystem;
    const bool to_disk = !config.out_dir.empty();
    if (to_disk) fs::create_directories(config.out_dir);

    AblationResult result;
    for (std::uint64_t seed : config.seeds) {
        synth::SynthConfig synth_config = config.base;
        synth_config.seed = seed;
        DatasetRequest request = config.dataset;
        request.widths = {config.interval_minutes};
        request.enrolment_arms = {false, true};
        if (to_disk) request.artifact_dir = config.out_dir / ("seed" + std::to_string(seed));
        SeedDataset data = build_synthetic_dataset(synth_config, request);

        for (bool arm : {false, true}) {
            const chains::FeatureTable& table = data.table(config.interval_minutes, arm);
            TrainOptions options = config.train;
            options.seed = seed;
            TrainHistory history;
            TrainedModel model = train_model(models::ModelKind::kGcn, data.graph, table, options, &history);
            Predictions pred = predict_test(model, data.graph, table);
            MetricsReport report = compute_metrics(pred.predicted, pred.observed, model.target_scaler);
            report.interval_minutes = config.interval_minutes;
            report.model = "gcn";
            report.seed = seed;
            report.with_enrolment = arm;

            AblationArm out;
            out.seed = seed;
            out.with_enrolment = arm;
            out.history = history;
            out.report = report;
            out.final_test_loss = history.test_loss.empty() ? 0.0 : history.test_loss.back();
            result.arms.push_back(std::move(out));

            if (to_disk) {
                const std::string stem = std::string(arm ? "with" : "without") + "_enrolment_seed" +
                                         std::to_string(seed);
                write_text_file(config.out_dir / ("ablation_history_" + stem + ".csv"), history_csv(history));
            }
        }
    }
    if (to_disk) {
        std::string csv = metrics_csv_header();
        for (const auto& arm : result.arms) csv += metrics_csv_row(arm.report);
        write_text_file(config.out_dir / "ablation_metrics.csv", csv);
    }
    return result;
}

}  // namespace odflow::eval
