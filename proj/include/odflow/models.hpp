#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odflow/matrix.hpp"
#include "odflow/optim.hpp"
#include "odflow/sparse.hpp"

namespace odflow::models {

enum class ModelKind { kGcn, kMlp, kLinear };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind kind);

struct ModelConfig {
    std::size_t numeric_dim = 8;    // scaled numeric feature columns
    std::size_t hidden_dim = 32;
    std::size_t embed_dim_time = 4;
    std::size_t embed_dim_dow = 2;
    std::size_t time_slots = 96;    // rows of the time-of-day table (96/48/24)
    std::uint64_t seed = 0;

    std::size_t embed_dim() const { return embed_dim_time + embed_dim_dow; }
    std::size_t input_dim() const { return numeric_dim + embed_dim(); }
    void validate() const;
};

// Two graph convolutions and a linear head, plus the embedding tables for the
// discrete time features. Initialization is Glorot-uniform, deterministic per
// seed; biases start at zero.
struct GcnParams {
    num::Param W0, b0;      // conv 1: input_dim → hidden
    num::Param W1, b1;      // conv 2: hidden → hidden
    num::Param W2, b2;      // head: hidden → 1
    num::Param E_time, E_dow;

    static GcnParams init(const ModelConfig& config);
    std::vector<num::Param*> all();
    std::vector<const num::Param*> all() const;
};

// One hidden layer of the same width, identical inputs, no propagation.
struct MlpParams {
    num::Param W0, b0;      // input_dim → hidden
    num::Param W1, b1;      // hidden → 1
    num::Param E_time, E_dow;

    static MlpParams init(const ModelConfig& config);
    std::vector<num::Param*> all();
    std::vector<const num::Param*> all() const;
};

// [x_scaled | E_time[tod] | E_dow[dow]]; the embedding rows broadcast to all
// nodes of the interval.
num::Matrix assemble_inputs(const num::Matrix& x_scaled, int tod, int dow, const num::Matrix& e_time,
                            const num::Matrix& e_dow);

// Reference forward passes on dense operators; the trainers below must agree
// with these (regression-tested).
num::Matrix gcn_forward(const num::Matrix& norm_adjacency, const num::Matrix& x_scaled, int tod, int dow,
                        const GcnParams& params);
num::Matrix mlp_forward(const num::Matrix& x_scaled, int tod, int dow, const MlpParams& params);

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
};

// Closed-form ridge solution (XᵀX + λI)⁻¹ Xᵀy with the bias handled through
// an appended ones column.
LinearModel lr_fit(const num::Matrix& x, const std::vector<double>& y, double ridge = 1e-8);
std::vector<double> lr_predict(const LinearModel& model, const num::Matrix& x);

// Scaled per-interval node samples shared by both neural trainers.
struct NodeDataset {
    std::size_t n_nodes = 0;
    std::size_t numeric_dim = 0;
    std::size_t intervals = 0;           // sample count S
    std::vector<double> x;               // S × V × numeric_dim
    std::vector<std::int32_t> tod, dow;  // per sample
    std::vector<double> y;               // S × V

    const double* x_at(std::size_t s) const { return x.data() + s * n_nodes * numeric_dim; }
    const double* y_at(std::size_t s) const { return y.data() + s * n_nodes; }
    num::Matrix x_matrix(std::size_t s) const;
    num::Matrix y_matrix(std::size_t s) const;
};

// Full-batch forward/backward over interval graphs sharing one propagation
// operator. Caches Â·X_num per interval so the first convolution needs no
// sparse product inside the epoch loop; the embedding block of the input is
// identical across nodes of an interval, which turns its propagation into a
// rank-one update with Â·1.
class GcnTrainer {
public:
    GcnTrainer(const num::Matrix& norm_adjacency, const ModelConfig& config);

    void attach(const NodeDataset* data);

    GcnParams& params() { return params_; }
    const GcnParams& params() const { return params_; }
    const ModelConfig& config() const { return config_; }

    // Forward + backward over samples [begin, end); gradients scaled by
    // inv_n_total accumulate into the params. Returns the summed SSE.
    double accumulate(std::size_t begin, std::size_t end, double inv_n_total);
    // Forward-only mean squared error over [begin, end).
    double loss(std::size_t begin, std::size_t end);
    // Scaled predictions for one sample interval (V×1).
    void predict(std::size_t s, num::Matrix& out);

private:
    double forward(std::size_t s);  // returns SSE for the sample

    ModelConfig config_;
    num::CsrMatrix adj_;
    num::CsrMatrix adj_t_;
    num::Matrix s_vec_;  // Â · 1
    GcnParams params_;
    const NodeDataset* data_ = nullptr;
    std::vector<double> p_cache_;  // Â X_num per sample, S × V × numeric_dim

    // per-sample work buffers
    num::Matrix xs_, z1_, h1_, m_, z2_, h2_, yhat_, g_, dz2_, dm_, dh1_, dz1_, embed_row_, u0_;
};

class MlpTrainer {
public:
    MlpTrainer(const ModelConfig& config);

    void attach(const NodeDataset* data) { data_ = data; }

    MlpParams& params() { return params_; }
    const MlpParams& params() const { return params_; }
    const ModelConfig& config() const { return config_; }

    double accumulate(std::size_t begin, std::size_t end, double inv_n_total);
    double loss(std::size_t begin, std::size_t end);
    void predict(std::size_t s, num::Matrix& out);

private:
    double forward(std::size_t s);

    ModelConfig config_;
    MlpParams params_;
    const NodeDataset* data_ = nullptr;
    num::Matrix xs_, z1_, h1_, yhat_, g_, dz1_, embed_row_, u0_;
};

}  // namespace odflow::models
