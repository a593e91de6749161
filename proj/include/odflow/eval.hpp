#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odflow/chains.hpp"
#include "odflow/graph.hpp"
#include "odflow/models.hpp"
#include "odflow/scaler.hpp"
#include "odflow/synth.hpp"

namespace odflow::eval {

struct SplitConfig {
    double train_fraction = 0.8;
};

// Chronological split over sample intervals; everything strictly before
// `train_intervals` trains, the rest tests.
struct Split {
    std::size_t train_intervals = 0;
    std::size_t total_intervals = 0;

    std::size_t test_intervals() const { return total_intervals - train_intervals; }
};

// Boundary at the interval whose cumulative sample share first reaches the
// fraction. `samples_per_interval` holds the per-interval sample counts in
// chronological order. Throws on fewer than 2 non-empty intervals or an
// empty side.
std::size_t chrono_boundary(const std::vector<std::size_t>& samples_per_interval, double train_fraction);

Split chrono_split(const chains::FeatureTable& table, const SplitConfig& config);

// Feature/target scaling into [−1, 1], fit on the training intervals only.
struct ScaledData {
    models::NodeDataset dataset;
    num::MinMaxScaler feature_scaler{-1.0, 1.0};
    num::MinMaxScaler target_scaler{-1.0, 1.0};
    Split split;
};

ScaledData prepare_scaled(const chains::FeatureTable& table, const SplitConfig& config);

struct TrainOptions {
    int epochs = 300;
    double lr = 1e-3;
    std::size_t hidden_dim = 32;
    std::size_t embed_dim_time = 4;
    std::size_t embed_dim_dow = 2;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> test_loss;
    std::vector<double> epoch_seconds;  // wall clock, never serialized
};

struct TrainedModel {
    models::ModelKind kind = models::ModelKind::kGcn;
    models::ModelConfig config;
    std::optional<models::GcnParams> gcn;
    std::optional<models::MlpParams> mlp;
    std::optional<models::LinearModel> linear;
    num::MinMaxScaler feature_scaler{-1.0, 1.0};
    num::MinMaxScaler target_scaler{-1.0, 1.0};
    Split split;
    int interval_minutes = 0;
    bool with_enrolment = false;
};

// Full-batch training: one optimizer step per epoch from gradients summed
// over every training interval. Losses are recorded at the parameters each
// epoch starts with. Deterministic per seed. Throws on a non-finite loss,
// naming the epoch.
TrainedModel train_model(models::ModelKind kind, const graph::OdGraph& graph, const chains::FeatureTable& table,
                         const TrainOptions& options, TrainHistory* history);

// Scaled test-set predictions and targets, flattened interval-major.
struct Predictions {
    std::vector<double> predicted;
    std::vector<double> observed;
};

Predictions predict_test(const TrainedModel& model, const graph::OdGraph& graph,
                         const chains::FeatureTable& table);

struct MetricsReport {
    int interval_minutes = 0;
    std::string model;
    std::uint64_t seed = 0;
    bool with_enrolment = false;
    std::optional<double> rmse_scaled;
    std::optional<double> srmse;
    std::optional<double> pearson;
    std::optional<double> r2;
    std::size_t n_samples = 0;
};

// rmse/corr/R² on scaled values; SRMSE on counts recovered through the target
// scaler. Degenerate statistics (zero variance, zero mean flow) surface as
// empty optionals, never NaN.
MetricsReport compute_metrics(const std::vector<double>& pred_scaled, const std::vector<double>& target_scaled,
                              const num::MinMaxScaler& target_scaler);

double srmse_raw(const std::vector<double>& predicted, const std::vector<double>& observed);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);
std::string history_csv(const TrainHistory& history);

std::string checkpoint_to_json(const TrainedModel& model, const TrainOptions& options);
TrainedModel checkpoint_from_json(const std::string& json_text);

// One synthetic dataset: the OD graph plus feature tables per requested
// (interval width, enrolment arm).
struct SeedDataset {
    graph::OdGraph graph;
    std::map<std::pair<int, bool>, chains::FeatureTable> tables;

    const chains::FeatureTable& table(int width, bool with_enrolment) const;
};

struct DatasetRequest {
    std::vector<int> widths{15, 30, 60};
    std::vector<bool> enrolment_arms{false};
    std::int64_t max_gap_seconds = 3600;
    graph::GraphOptions graph_options;
    std::string salt = "odflow-v1";
    // When set, the raw/anonymized CSV artifacts are written here (a real
    // pipeline run); otherwise everything streams through memory.
    std::filesystem::path artifact_dir;
};

SeedDataset build_synthetic_dataset(const synth::SynthConfig& config, const DatasetRequest& request);

struct BenchmarkConfig {
    synth::SynthConfig base;  // seed is overridden per grid seed
    std::vector<int> intervals{15, 30, 60};
    std::vector<models::ModelKind> kinds{models::ModelKind::kGcn, models::ModelKind::kMlp,
                                         models::ModelKind::kLinear};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    TrainOptions train;
    bool with_enrolment = false;
    DatasetRequest dataset;  // widths field is ignored (taken from `intervals`)
    int threads = 0;         // 0 → hardware concurrency
    std::filesystem::path out_dir;  // empty → no artifact files
};

struct BenchmarkCell {
    MetricsReport report;
    TrainHistory history;
    double wall_seconds = 0.0;
};

struct BenchmarkResult {
    std::vector<BenchmarkCell> cells;  // ordered (interval, model, seed)
};

// The full grid. Cells run concurrently (each internally single-threaded and
// deterministic); the result ordering is fixed regardless of thread count.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

struct AblationConfig {
    synth::SynthConfig base;
    int interval_minutes = 30;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    TrainOptions train;
    DatasetRequest dataset;
    int threads = 0;
    std::filesystem::path out_dir;
};

struct AblationArm {
    std::uint64_t seed = 0;
    bool with_enrolment = false;
    TrainHistory history;
    MetricsReport report;
    double final_test_loss = 0.0;
};

struct AblationResult {
    std::vector<AblationArm> arms;  // ordered (seed, without→with)
};

// Paired runs identical except for the two enrolment feature columns.
AblationResult run_ablation(const AblationConfig& config);

}  // namespace odflow::eval
