#include "odflow/models.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "odflow/common.hpp"
#include "odflow/ops.hpp"

namespace odflow::models {

namespace {

// Cholesky solve for the (small) SPD normal-equation system; adds jitter and
// retries once if the factorization stalls.
std::vector<double> solve_spd(num::Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (int attempt = 0; attempt < 2; ++attempt) {
        num::Matrix l(n, n);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = a(i, j);
                for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
                if (i == j) {
                    if (sum <= 0.0) {
                        ok = false;
                        break;
                    }
                    l(i, i) = std::sqrt(sum);
                } else {
                    l(i, j) = sum / l(j, j);
                }
            }
        }
        if (!ok) {
            for (std::size_t i = 0; i < n; ++i) a(i, i) += 1e-6;
            continue;
        }
        std::vector<double> y(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * y[k];
            y[i] = sum / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double sum = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) sum -= l(k, ii) * x[k];
            x[ii] = sum / l(ii, ii);
        }
        return x;
    }
    throw std::runtime_error("lr_fit: normal equations not positive definite");
}

void apply_relu_inplace(num::Matrix& z, num::Matrix& activated) {
    activated = z;
    double* d = activated.data();
    for (std::size_t i = 0; i < activated.size(); ++i)
        if (d[i] < 0.0) d[i] = 0.0;
}

void mask_relu_grad(const num::Matrix& z, num::Matrix& grad) {
    const double* zv = z.data();
    double* gv = grad.data();
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (zv[i] <= 0.0) gv[i] = 0.0;
}

void add_colsum(const num::Matrix& m, num::Param& bias) {
    double* b = bias.grad.data();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) b[j] += row[j];
    }
}

}  // namespace

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "gcn") return ModelKind::kGcn;
    if (s == "mlp") return ModelKind::kMlp;
    if (s == "lr") return ModelKind::kLinear;
    throw ValidationError("unknown model kind: " + s);
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::kGcn: return "gcn";
        case ModelKind::kMlp: return "mlp";
        case ModelKind::kLinear: return "lr";
    }
    return "gcn";
}

void ModelConfig::validate() const {
    if (numeric_dim == 0 || hidden_dim == 0 || embed_dim_time == 0 || embed_dim_dow == 0 || time_slots == 0)
        throw std::invalid_argument("ModelConfig: all dimensions must be positive");
    if (hidden_dim > 128) throw std::invalid_argument("ModelConfig: hidden_dim capped at 128");
}

GcnParams GcnParams::init(const ModelConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    GcnParams p;
    p.W0 = num::Param("W0", num::Matrix::glorot_uniform(config.input_dim(), config.hidden_dim, rng));
    p.b0 = num::Param("b0", num::Matrix(1, config.hidden_dim));
    p.W1 = num::Param("W1", num::Matrix::glorot_uniform(config.hidden_dim, config.hidden_dim, rng));
    p.b1 = num::Param("b1", num::Matrix(1, config.hidden_dim));
    p.W2 = num::Param("W2", num::Matrix::glorot_uniform(config.hidden_dim, 1, rng));
    p.b2 = num::Param("b2", num::Matrix(1, 1));
    p.E_time = num::Param("E_time", num::Matrix::glorot_uniform(config.time_slots, config.embed_dim_time, rng));
    p.E_dow = num::Param("E_dow", num::Matrix::glorot_uniform(7, config.embed_dim_dow, rng));
    return p;
}

std::vector<num::Param*> GcnParams::all() { return {&W0, &b0, &W1, &b1, &W2, &b2, &E_time, &E_dow}; }
std::vector<const num::Param*> GcnParams::all() const { return {&W0, &b0, &W1, &b1, &W2, &b2, &E_time, &E_dow}; }

MlpParams MlpParams::init(const ModelConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    MlpParams p;
    p.W0 = num::Param("W0", num::Matrix::glorot_uniform(config.input_dim(), config.hidden_dim, rng));
    p.b0 = num::Param("b0", num::Matrix(1, config.hidden_dim));
    p.W1 = num::Param("W1", num::Matrix::glorot_uniform(config.hidden_dim, 1, rng));
    p.b1 = num::Param("b1", num::Matrix(1, 1));
    p.E_time = num::Param("E_time", num::Matrix::glorot_uniform(config.time_slots, config.embed_dim_time, rng));
    p.E_dow = num::Param("E_dow", num::Matrix::glorot_uniform(7, config.embed_dim_dow, rng));
    return p;
}

std::vector<num::Param*> MlpParams::all() { return {&W0, &b0, &W1, &b1, &E_time, &E_dow}; }
std::vector<const num::Param*> MlpParams::all() const { return {&W0, &b0, &W1, &b1, &E_time, &E_dow}; }

num::Matrix assemble_inputs(const num::Matrix& x_scaled, int tod, int dow, const num::Matrix& e_time,
                            const num::Matrix& e_dow) {
    if (tod < 0 || static_cast<std::size_t>(tod) >= e_time.rows())
        throw std::invalid_argument("assemble_inputs: time slot out of range");
    if (dow < 0 || static_cast<std::size_t>(dow) >= e_dow.rows())
        throw std::invalid_argument("assemble_inputs: weekday out of range");
    const std::size_t v = x_scaled.rows();
    const std::size_t f = x_scaled.cols();
    const std::size_t et = e_time.cols(), ed = e_dow.cols();
    num::Matrix out(v, f + et + ed);
    for (std::size_t i = 0; i < v; ++i) {
        double* row = out.row(i);
        const double* xrow = x_scaled.row(i);
        for (std::size_t j = 0; j < f; ++j) row[j] = xrow[j];
        const double* te = e_time.row(static_cast<std::size_t>(tod));
        for (std::size_t j = 0; j < et; ++j) row[f + j] = te[j];
        const double* de = e_dow.row(static_cast<std::size_t>(dow));
        for (std::size_t j = 0; j < ed; ++j) row[f + et + j] = de[j];
    }
    return out;
}

num::Matrix gcn_forward(const num::Matrix& norm_adjacency, const num::Matrix& x_scaled, int tod, int dow,
                        const GcnParams& params) {
    if (norm_adjacency.rows() != norm_adjacency.cols() || norm_adjacency.cols() != x_scaled.rows())
        throw std::invalid_argument("gcn_forward: adjacency and feature shapes disagree");
    num::Matrix inputs = assemble_inputs(x_scaled, tod, dow, params.E_time.value, params.E_dow.value);
    num::Matrix z1 = num::matmul(norm_adjacency, num::matmul(inputs, params.W0.value));
    num::add_row_bias(z1, params.b0.value);
    num::Matrix h1 = num::relu(z1);
    num::Matrix z2 = num::matmul(norm_adjacency, num::matmul(h1, params.W1.value));
    num::add_row_bias(z2, params.b1.value);
    num::Matrix h2 = num::relu(z2);
    num::Matrix yhat = num::matmul(h2, params.W2.value);
    num::add_row_bias(yhat, params.b2.value);
    return yhat;
}

num::Matrix mlp_forward(const num::Matrix& x_scaled, int tod, int dow, const MlpParams& params) {
    num::Matrix inputs = assemble_inputs(x_scaled, tod, dow, params.E_time.value, params.E_dow.value);
    if (inputs.cols() != params.W0.value.rows()) throw std::invalid_argument("mlp_forward: input width mismatch");
    num::Matrix z1 = num::matmul(inputs, params.W0.value);
    num::add_row_bias(z1, params.b0.value);
    num::Matrix h1 = num::relu(z1);
    num::Matrix yhat = num::matmul(h1, params.W1.value);
    num::add_row_bias(yhat, params.b1.value);
    return yhat;
}

LinearModel lr_fit(const num::Matrix& x, const std::vector<double>& y, double ridge) {
    const std::size_t rows = x.rows();
    const std::size_t d = x.cols();
    if (rows == 0 || y.size() != rows) throw std::invalid_argument("lr_fit: need at least one row");
    // Gram matrix of [X 1].
    num::Matrix a(d + 1, d + 1);
    std::vector<double> rhs(d + 1, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = x.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = row[i];
            if (xi == 0.0) continue;
            double* arow = a.row(i);
            for (std::size_t j = i; j < d; ++j) arow[j] += xi * row[j];
            arow[d] += xi;
            rhs[i] += xi * y[r];
        }
        rhs[d] += y[r];
    }
    a(d, d) = static_cast<double>(rows);
    for (std::size_t i = 0; i < d + 1; ++i) {
        for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
        a(i, i) += ridge;
    }
    std::vector<double> solution = solve_spd(std::move(a), std::move(rhs));
    LinearModel model;
    model.bias = solution[d];
    solution.resize(d);
    model.weights = std::move(solution);
    return model;
}

std::vector<double> lr_predict(const LinearModel& model, const num::Matrix& x) {
    if (x.cols() != model.weights.size()) throw std::invalid_argument("lr_predict: width mismatch");
    std::vector<double> out(x.rows(), model.bias);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* row = x.row(r);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) acc += row[j] * model.weights[j];
        out[r] += acc;
    }
    return out;
}

num::Matrix NodeDataset::x_matrix(std::size_t s) const {
    num::Matrix m(n_nodes, numeric_dim);
    std::copy(x_at(s), x_at(s) + n_nodes * numeric_dim, m.data());
    return m;
}

num::Matrix NodeDataset::y_matrix(std::size_t s) const {
    num::Matrix m(n_nodes, 1);
    std::copy(y_at(s), y_at(s) + n_nodes, m.data());
    return m;
}

GcnTrainer::GcnTrainer(const num::Matrix& norm_adjacency, const ModelConfig& config)
    : config_(config), params_(GcnParams::init(config)) {
    if (norm_adjacency.rows() != norm_adjacency.cols())
        throw std::invalid_argument("GcnTrainer: adjacency not square");
    adj_ = num::CsrMatrix::from_dense(norm_adjacency);
    adj_t_ = adj_.transposed();
    const std::size_t v = norm_adjacency.rows();
    s_vec_.resize(v, 1);
    for (std::size_t i = 0; i < v; ++i) {
        double sum = 0.0;
        for (std::size_t k = adj_.row_ptr[i]; k < adj_.row_ptr[i + 1]; ++k) sum += adj_.val[k];
        s_vec_(i, 0) = sum;
    }
    const std::size_t h = config_.hidden_dim;
    z1_.resize(v, h);
    h1_.resize(v, h);
    m_.resize(v, h);
    z2_.resize(v, h);
    h2_.resize(v, h);
    yhat_.resize(v, 1);
    g_.resize(v, 1);
    dz2_.resize(v, h);
    dm_.resize(v, h);
    dh1_.resize(v, h);
    dz1_.resize(v, h);
    embed_row_.resize(1, config_.embed_dim());
    u0_.resize(1, h);
}

void GcnTrainer::attach(const NodeDataset* data) {
    if (data->n_nodes != adj_.rows) throw std::invalid_argument("GcnTrainer: dataset node count mismatch");
    if (data->numeric_dim != config_.numeric_dim)
        throw std::invalid_argument("GcnTrainer: dataset feature width mismatch");
    data_ = data;
    // P = Â X_num per sample; the first convolution then runs without any
    // sparse product inside the epoch loop.
    const std::size_t v = data->n_nodes, f = data->numeric_dim;
    p_cache_.assign(data->intervals * v * f, 0.0);
    num::Matrix xs(v, f), ps(v, f);
    for (std::size_t s = 0; s < data->intervals; ++s) {
        std::copy(data->x_at(s), data->x_at(s) + v * f, xs.data());
        adj_.multiply(xs, ps);
        std::copy(ps.data(), ps.data() + v * f, p_cache_.data() + s * v * f);
    }
    xs_.resize(v, f);
}

double GcnTrainer::forward(std::size_t s) {
    const std::size_t v = data_->n_nodes, f = data_->numeric_dim, h = config_.hidden_dim;
    const std::size_t et = config_.embed_dim_time;
    const int tod = data_->tod[s], dow = data_->dow[s];
    if (tod < 0 || static_cast<std::size_t>(tod) >= config_.time_slots)
        throw std::invalid_argument("GcnTrainer: time slot out of range");

    // embedding row for this interval
    {
        double* e = embed_row_.data();
        const double* te = params_.E_time.value.row(static_cast<std::size_t>(tod));
        for (std::size_t j = 0; j < et; ++j) e[j] = te[j];
        const double* de = params_.E_dow.value.row(static_cast<std::size_t>(dow));
        for (std::size_t j = 0; j < config_.embed_dim_dow; ++j) e[et + j] = de[j];
    }

    // u0 = e · W0_emb  (embedding rows of W0 start at row f)
    u0_.fill(0.0);
    for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
        const double ej = embed_row_.data()[j];
        const double* wrow = params_.W0.value.row(f + j);
        double* u = u0_.data();
        for (std::size_t c = 0; c < h; ++c) u[c] += ej * wrow[c];
    }

    // Z1 = P W0_num + s_vec·u0 + b0
    z1_.fill(0.0);
    {
        const double* p = p_cache_.data() + s * v * f;
        for (std::size_t i = 0; i < v; ++i) {
            double* zrow = z1_.row(i);
            const double* prow = p + i * f;
            for (std::size_t k = 0; k < f; ++k) {
                const double pik = prow[k];
                if (pik == 0.0) continue;
                const double* wrow = params_.W0.value.row(k);
                for (std::size_t c = 0; c < h; ++c) zrow[c] += pik * wrow[c];
            }
            const double si = s_vec_(i, 0);
            const double* u = u0_.data();
            const double* b = params_.b0.value.data();
            for (std::size_t c = 0; c < h; ++c) zrow[c] += si * u[c] + b[c];
        }
    }
    apply_relu_inplace(z1_, h1_);

    // Z2 = (Â H1) W1 + b1
    adj_.multiply(h1_, m_);
    z2_.fill(0.0);
    num::gemm_acc(m_, params_.W1.value, z2_);
    num::add_row_bias(z2_, params_.b1.value);
    apply_relu_inplace(z2_, h2_);

    // ŷ = H2 W2 + b2
    yhat_.fill(0.0);
    num::gemm_acc(h2_, params_.W2.value, yhat_);
    num::add_row_bias(yhat_, params_.b2.value);

    // SSE against the sample targets
    const double* y = data_->y_at(s);
    double sse = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        const double d = yhat_(i, 0) - y[i];
        sse += d * d;
    }
    return sse;
}

double GcnTrainer::accumulate(std::size_t begin, std::size_t end, double inv_n_total) {
    if (!data_) throw std::logic_error("GcnTrainer: no dataset attached");
    const std::size_t v = data_->n_nodes, f = data_->numeric_dim, h = config_.hidden_dim;
    double total_sse = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        total_sse += forward(s);

        // g = 2 (ŷ − y) · inv_n_total
        const double* y = data_->y_at(s);
        for (std::size_t i = 0; i < v; ++i) g_(i, 0) = 2.0 * (yhat_(i, 0) - y[i]) * inv_n_total;

        // head
        num::gemm_tn_acc(h2_, g_, params_.W2.grad);
        params_.b2.grad(0, 0) += g_.sum();
        dz2_.fill(0.0);
        num::gemm_nt_acc(g_, params_.W2.value, dz2_);
        mask_relu_grad(z2_, dz2_);

        // conv 2
        num::gemm_tn_acc(m_, dz2_, params_.W1.grad);
        add_colsum(dz2_, params_.b1);
        dm_.fill(0.0);
        num::gemm_nt_acc(dz2_, params_.W1.value, dm_);
        adj_t_.multiply(dm_, dh1_);
        dz1_ = dh1_;
        mask_relu_grad(z1_, dz1_);

        // conv 1: numeric rows of W0 via the P cache
        {
            const double* p = p_cache_.data() + s * v * f;
            for (std::size_t i = 0; i < v; ++i) {
                const double* prow = p + i * f;
                const double* drow = dz1_.row(i);
                for (std::size_t k = 0; k < f; ++k) {
                    const double pik = prow[k];
                    if (pik == 0.0) continue;
                    double* wg = params_.W0.grad.row(k);
                    for (std::size_t c = 0; c < h; ++c) wg[c] += pik * drow[c];
                }
            }
        }
        add_colsum(dz1_, params_.b0);

        // embedding rows of W0 and the tables: q = s_vecᵀ dZ1
        double q[128];
        for (std::size_t c = 0; c < h; ++c) q[c] = 0.0;
        for (std::size_t i = 0; i < v; ++i) {
            const double si = s_vec_(i, 0);
            const double* drow = dz1_.row(i);
            for (std::size_t c = 0; c < h; ++c) q[c] += si * drow[c];
        }
        for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
            double* wg = params_.W0.grad.row(f + j);
            const double ej = embed_row_.data()[j];
            for (std::size_t c = 0; c < h; ++c) wg[c] += ej * q[c];
        }
        // de = q · W0_embᵀ scattered into the tables
        const int tod = data_->tod[s], dow = data_->dow[s];
        for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
            const double* wrow = params_.W0.value.row(f + j);
            double acc = 0.0;
            for (std::size_t c = 0; c < h; ++c) acc += wrow[c] * q[c];
            if (j < config_.embed_dim_time)
                params_.E_time.grad(static_cast<std::size_t>(tod), j) += acc;
            else
                params_.E_dow.grad(static_cast<std::size_t>(dow), j - config_.embed_dim_time) += acc;
        }
    }
    return total_sse;
}

double GcnTrainer::loss(std::size_t begin, std::size_t end) {
    if (!data_) throw std::logic_error("GcnTrainer: no dataset attached");
    if (end <= begin) return 0.0;
    double sse = 0.0;
    for (std::size_t s = begin; s < end; ++s) sse += forward(s);
    return sse / static_cast<double>((end - begin) * data_->n_nodes);
}

void GcnTrainer::predict(std::size_t s, num::Matrix& out) {
    forward(s);
    out = yhat_;
}

MlpTrainer::MlpTrainer(const ModelConfig& config) : config_(config), params_(MlpParams::init(config)) {
    const std::size_t h = config_.hidden_dim;
    embed_row_.resize(1, config_.embed_dim());
    u0_.resize(1, h);
}

double MlpTrainer::forward(std::size_t s) {
    const std::size_t v = data_->n_nodes, f = data_->numeric_dim, h = config_.hidden_dim;
    const std::size_t et = config_.embed_dim_time;
    const int tod = data_->tod[s], dow = data_->dow[s];
    if (tod < 0 || static_cast<std::size_t>(tod) >= config_.time_slots)
        throw std::invalid_argument("MlpTrainer: time slot out of range");
    if (z1_.rows() != v) {
        z1_.resize(v, h);
        h1_.resize(v, h);
        yhat_.resize(v, 1);
        g_.resize(v, 1);
        dz1_.resize(v, h);
    }

    double* e = embed_row_.data();
    const double* te = params_.E_time.value.row(static_cast<std::size_t>(tod));
    for (std::size_t j = 0; j < et; ++j) e[j] = te[j];
    const double* de = params_.E_dow.value.row(static_cast<std::size_t>(dow));
    for (std::size_t j = 0; j < config_.embed_dim_dow; ++j) e[et + j] = de[j];

    u0_.fill(0.0);
    for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
        const double ej = e[j];
        const double* wrow = params_.W0.value.row(f + j);
        double* u = u0_.data();
        for (std::size_t c = 0; c < h; ++c) u[c] += ej * wrow[c];
    }

    z1_.fill(0.0);
    const double* x = data_->x_at(s);
    for (std::size_t i = 0; i < v; ++i) {
        double* zrow = z1_.row(i);
        const double* xrow = x + i * f;
        for (std::size_t k = 0; k < f; ++k) {
            const double xik = xrow[k];
            if (xik == 0.0) continue;
            const double* wrow = params_.W0.value.row(k);
            for (std::size_t c = 0; c < h; ++c) zrow[c] += xik * wrow[c];
        }
        const double* u = u0_.data();
        const double* b = params_.b0.value.data();
        for (std::size_t c = 0; c < h; ++c) zrow[c] += u[c] + b[c];
    }
    apply_relu_inplace(z1_, h1_);

    yhat_.fill(0.0);
    num::gemm_acc(h1_, params_.W1.value, yhat_);
    num::add_row_bias(yhat_, params_.b1.value);

    const double* y = data_->y_at(s);
    double sse = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        const double d = yhat_(i, 0) - y[i];
        sse += d * d;
    }
    return sse;
}

double MlpTrainer::accumulate(std::size_t begin, std::size_t end, double inv_n_total) {
    if (!data_) throw std::logic_error("MlpTrainer: no dataset attached");
    const std::size_t v = data_->n_nodes, f = data_->numeric_dim, h = config_.hidden_dim;
    double total_sse = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        total_sse += forward(s);
        const double* y = data_->y_at(s);
        for (std::size_t i = 0; i < v; ++i) g_(i, 0) = 2.0 * (yhat_(i, 0) - y[i]) * inv_n_total;

        num::gemm_tn_acc(h1_, g_, params_.W1.grad);
        params_.b1.grad(0, 0) += g_.sum();
        dz1_.fill(0.0);
        num::gemm_nt_acc(g_, params_.W1.value, dz1_);
        mask_relu_grad(z1_, dz1_);

        const double* x = data_->x_at(s);
        for (std::size_t i = 0; i < v; ++i) {
            const double* xrow = x + i * f;
            const double* drow = dz1_.row(i);
            for (std::size_t k = 0; k < f; ++k) {
                const double xik = xrow[k];
                if (xik == 0.0) continue;
                double* wg = params_.W0.grad.row(k);
                for (std::size_t c = 0; c < h; ++c) wg[c] += xik * drow[c];
            }
        }
        add_colsum(dz1_, params_.b0);

        double q[128];
        for (std::size_t c = 0; c < h; ++c) q[c] = 0.0;
        for (std::size_t i = 0; i < v; ++i) {
            const double* drow = dz1_.row(i);
            for (std::size_t c = 0; c < h; ++c) q[c] += drow[c];
        }
        for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
            double* wg = params_.W0.grad.row(f + j);
            const double ej = embed_row_.data()[j];
            for (std::size_t c = 0; c < h; ++c) wg[c] += ej * q[c];
        }
        const int tod = data_->tod[s], dow = data_->dow[s];
        for (std::size_t j = 0; j < config_.embed_dim(); ++j) {
            const double* wrow = params_.W0.value.row(f + j);
            double acc = 0.0;
            for (std::size_t c = 0; c < h; ++c) acc += wrow[c] * q[c];
            if (j < config_.embed_dim_time)
                params_.E_time.grad(static_cast<std::size_t>(tod), j) += acc;
            else
                params_.E_dow.grad(static_cast<std::size_t>(dow), j - config_.embed_dim_time) += acc;
        }
    }
    return total_sse;
}

double MlpTrainer::loss(std::size_t begin, std::size_t end) {
    if (!data_) throw std::logic_error("MlpTrainer: no dataset attached");
    if (end <= begin) return 0.0;
    double sse = 0.0;
    for (std::size_t s = begin; s < end; ++s) sse += forward(s);
    return sse / static_cast<double>((end - begin) * data_->n_nodes);
}

void MlpTrainer::predict(std::size_t s, num::Matrix& out) {
    forward(s);
    out = yhat_;
}

}  // namespace odflow::models
