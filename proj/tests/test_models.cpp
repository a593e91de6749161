#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <random>

#include "odflow/graph.hpp"
#include "odflow/models.hpp"
#include "odflow/optim.hpp"

using namespace odflow;
using num::Matrix;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

// 3 buildings → 6 OD nodes, randomly weighted symmetric operator.
graph::OdGraph toy_graph() {
    std::vector<graph::Building> buildings = {
        {"A", 43.6570, -79.3800, 0, 0},
        {"B", 43.6585, -79.3780, 0, 0},
        {"C", 43.6590, -79.3805, 0, 0},
    };
    return graph::build_od_graph(std::move(buildings));
}

models::NodeDataset random_dataset(std::size_t v, std::size_t f, std::size_t intervals, std::size_t time_slots,
                                   std::mt19937_64& rng) {
    models::NodeDataset data;
    data.n_nodes = v;
    data.numeric_dim = f;
    data.intervals = intervals;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    data.x.resize(intervals * v * f);
    for (auto& value : data.x) value = dist(rng);
    data.y.resize(intervals * v);
    for (auto& value : data.y) value = dist(rng);
    std::uniform_int_distribution<int> tod(0, static_cast<int>(time_slots) - 1);
    std::uniform_int_distribution<int> dow(0, 6);
    for (std::size_t s = 0; s < intervals; ++s) {
        data.tod.push_back(tod(rng));
        data.dow.push_back(dow(rng));
    }
    return data;
}

double dataset_loss(models::GcnTrainer& trainer, const models::NodeDataset& data) {
    return trainer.loss(0, data.intervals);
}

}  // namespace

TEST_CASE("initialization is deterministic per seed") {
    models::ModelConfig config;
    config.numeric_dim = 8;
    config.seed = 13;
    auto a = models::GcnParams::init(config);
    auto b = models::GcnParams::init(config);
    CHECK(a.W0.value == b.W0.value);
    CHECK(a.E_time.value == b.E_time.value);
    config.seed = 14;
    auto c = models::GcnParams::init(config);
    CHECK(!(a.W0.value == c.W0.value));
}

TEST_CASE("gcn with zero weights emits the head bias everywhere") {
    graph::OdGraph g = toy_graph();
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.hidden_dim = 8;
    config.time_slots = 96;
    config.seed = 1;
    auto params = models::GcnParams::init(config);
    for (num::Param* p : params.all()) p->value.fill(0.0);
    params.b2.value(0, 0) = 0.75;
    std::mt19937_64 rng(2);
    Matrix x = random_matrix(g.nodes.size(), 4, rng);
    Matrix y = models::gcn_forward(g.norm_adjacency, x, 10, 2, params);
    for (std::size_t i = 0; i < y.rows(); ++i) CHECK(y(i, 0) == doctest::Approx(0.75));
}

TEST_CASE("identity adjacency with an identity second conv reduces to the mlp") {
    std::mt19937_64 rng(5);
    models::ModelConfig config;
    config.numeric_dim = 5;
    config.hidden_dim = 16;
    config.time_slots = 48;
    config.seed = 77;
    auto gcn = models::GcnParams::init(config);
    auto mlp = models::MlpParams::init(config);

    // Transplant: same first layer and embeddings; pass-through second conv
    // (identity weights on already-nonnegative activations); the gcn head
    // becomes the mlp output layer.
    mlp.W0.value = gcn.W0.value;
    mlp.b0.value = gcn.b0.value;
    mlp.E_time.value = gcn.E_time.value;
    mlp.E_dow.value = gcn.E_dow.value;
    gcn.W1.value = Matrix::identity(16);
    gcn.b1.value.fill(0.0);
    mlp.W1.value = gcn.W2.value;
    mlp.b1.value = gcn.b2.value;

    const std::size_t v = 9;
    Matrix identity_adj = Matrix::identity(v);
    Matrix x = random_matrix(v, 5, rng);
    Matrix from_gcn = models::gcn_forward(identity_adj, x, 3, 4, gcn);
    Matrix from_mlp = models::mlp_forward(x, 3, 4, mlp);
    REQUIRE(from_gcn.rows() == from_mlp.rows());
    for (std::size_t i = 0; i < v; ++i)
        CHECK(from_gcn(i, 0) == doctest::Approx(from_mlp(i, 0)).epsilon(1e-12));
}

TEST_CASE("gcn output is permutation equivariant") {
    graph::OdGraph g = toy_graph();
    const std::size_t v = g.nodes.size();
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.hidden_dim = 8;
    config.time_slots = 96;
    config.seed = 3;
    auto params = models::GcnParams::init(config);
    std::mt19937_64 rng(4);
    Matrix x = random_matrix(v, 4, rng);
    Matrix y = models::gcn_forward(g.norm_adjacency, x, 5, 1, params);

    // Random permutation P; Â' = P Â Pᵀ, X' = P X.
    std::vector<std::size_t> perm(v);
    for (std::size_t i = 0; i < v; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix adj_p(v, v), x_p(v, 4);
    for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t j = 0; j < v; ++j) adj_p(i, j) = g.norm_adjacency(perm[i], perm[j]);
        for (std::size_t c = 0; c < 4; ++c) x_p(i, c) = x(perm[i], c);
    }
    Matrix y_p = models::gcn_forward(adj_p, x_p, 5, 1, params);
    for (std::size_t i = 0; i < v; ++i) CHECK(y_p(i, 0) == doctest::Approx(y(perm[i], 0)).epsilon(1e-12));
}

TEST_CASE("mlp zero weights emit the bias; gradcheck against finite differences") {
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.hidden_dim = 8;
    config.time_slots = 24;
    config.seed = 31;
    auto params = models::MlpParams::init(config);
    for (num::Param* p : params.all()) p->value.fill(0.0);
    params.b1.value(0, 0) = -0.5;
    std::mt19937_64 rng(32);
    Matrix x = random_matrix(6, 4, rng);
    Matrix y = models::mlp_forward(x, 2, 6, params);
    for (std::size_t i = 0; i < y.rows(); ++i) CHECK(y(i, 0) == doctest::Approx(-0.5));

    // Full-model finite-difference check through the trainer.
    models::MlpTrainer trainer(config);
    auto data = random_dataset(6, 4, 3, config.time_slots, rng);
    trainer.attach(&data);
    const double inv_n = 1.0 / static_cast<double>(data.intervals * data.n_nodes);
    for (num::Param* p : trainer.params().all()) p->zero_grad();
    trainer.accumulate(0, data.intervals, inv_n);

    const double h = 1e-5;
    double worst = 0.0;
    for (num::Param* p : trainer.params().all()) {
        for (std::size_t k = 0; k < p->value.size(); ++k) {
            const double saved = p->value.data()[k];
            p->value.data()[k] = saved + h;
            const double up = trainer.loss(0, data.intervals);
            p->value.data()[k] = saved - h;
            const double down = trainer.loss(0, data.intervals);
            p->value.data()[k] = saved;
            const double fd = (up - down) / (2 * h);
            const double an = p->grad.data()[k];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("gcn trainer gradients match finite differences on the 6-node fixture") {
    graph::OdGraph g = toy_graph();
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.hidden_dim = 8;
    config.time_slots = 96;
    config.seed = 7;
    models::GcnTrainer trainer(g.norm_adjacency, config);
    std::mt19937_64 rng(70);
    auto data = random_dataset(g.nodes.size(), 4, 3, config.time_slots, rng);
    trainer.attach(&data);
    const double inv_n = 1.0 / static_cast<double>(data.intervals * data.n_nodes);
    for (num::Param* p : trainer.params().all()) p->zero_grad();
    trainer.accumulate(0, data.intervals, inv_n);

    const double h = 1e-5;
    double worst = 0.0;
    for (num::Param* p : trainer.params().all()) {
        for (std::size_t k = 0; k < p->value.size(); ++k) {
            const double saved = p->value.data()[k];
            p->value.data()[k] = saved + h;
            const double up = dataset_loss(trainer, data);
            p->value.data()[k] = saved - h;
            const double down = dataset_loss(trainer, data);
            p->value.data()[k] = saved;
            const double fd = (up - down) / (2 * h);
            const double an = p->grad.data()[k];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("trainer forward agrees with the reference dense forward") {
    graph::OdGraph g = toy_graph();
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.hidden_dim = 8;
    config.time_slots = 96;
    config.seed = 21;
    models::GcnTrainer trainer(g.norm_adjacency, config);
    std::mt19937_64 rng(22);
    auto data = random_dataset(g.nodes.size(), 4, 4, config.time_slots, rng);
    trainer.attach(&data);
    Matrix fast;
    for (std::size_t s = 0; s < data.intervals; ++s) {
        trainer.predict(s, fast);
        Matrix reference =
            models::gcn_forward(g.norm_adjacency, data.x_matrix(s), data.tod[s], data.dow[s], trainer.params());
        for (std::size_t i = 0; i < reference.rows(); ++i)
            CHECK(fast(i, 0) == doctest::Approx(reference(i, 0)).epsilon(1e-10));
    }
}

TEST_CASE("lr recovers exact linear data") {
    std::mt19937_64 rng(888);
    Matrix x = random_matrix(200, 5, rng, -2.0, 2.0);
    std::vector<double> w = {0.5, -1.25, 2.0, 0.0, 3.5};
    std::vector<double> y(200);
    for (std::size_t r = 0; r < 200; ++r) {
        double acc = 0.7;
        for (std::size_t c = 0; c < 5; ++c) acc += x(r, c) * w[c];
        y[r] = acc;
    }
    auto model = models::lr_fit(x, y);
    auto pred = models::lr_predict(model, x);
    double sse = 0.0;
    for (std::size_t r = 0; r < 200; ++r) sse += (pred[r] - y[r]) * (pred[r] - y[r]);
    CHECK(std::sqrt(sse / 200.0) < 1e-8);
    CHECK(model.bias == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("lr on constant targets returns the mean as bias") {
    std::mt19937_64 rng(9);
    Matrix x = random_matrix(50, 3, rng);
    std::vector<double> y(50, 4.25);
    auto model = models::lr_fit(x, y);
    CHECK(model.bias == doctest::Approx(4.25).epsilon(1e-5));
    for (double w : model.weights) CHECK(std::abs(w) < 1e-5);
}

TEST_CASE("lr matches an independent normal-equations solve") {
    std::mt19937_64 rng(123);
    Matrix x = random_matrix(300, 6, rng, -3.0, 3.0);
    std::vector<double> y(300);
    std::uniform_real_distribution<double> noise(-0.5, 0.5);
    for (std::size_t r = 0; r < 300; ++r) y[r] = noise(rng) + 0.3 * x(r, 0) - 1.1 * x(r, 4);
    auto model = models::lr_fit(x, y);

    Eigen::MatrixXd design(300, 7);
    Eigen::VectorXd target(300);
    for (int r = 0; r < 300; ++r) {
        for (int c = 0; c < 6; ++c)
            design(r, c) = x(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        design(r, 6) = 1.0;
        target(r) = y[static_cast<std::size_t>(r)];
    }
    Eigen::MatrixXd gram = design.transpose() * design + 1e-8 * Eigen::MatrixXd::Identity(7, 7);
    Eigen::VectorXd solution = gram.ldlt().solve(design.transpose() * target);
    for (int c = 0; c < 6; ++c)
        CHECK(model.weights[static_cast<std::size_t>(c)] == doctest::Approx(solution(c)).epsilon(1e-8));
    CHECK(model.bias == doctest::Approx(solution(6)).epsilon(1e-8));
    CHECK_THROWS_AS(models::lr_fit(Matrix(0, 3), {}), std::invalid_argument);
}

TEST_CASE("forward shape mismatches throw") {
    graph::OdGraph g = toy_graph();
    models::ModelConfig config;
    config.numeric_dim = 4;
    config.seed = 0;
    auto params = models::GcnParams::init(config);
    Matrix wrong_rows(3, 4);
    CHECK_THROWS_AS(models::gcn_forward(g.norm_adjacency, wrong_rows, 0, 0, params), std::invalid_argument);
    Matrix x(g.nodes.size(), 4);
    CHECK_THROWS_AS(models::gcn_forward(g.norm_adjacency, x, 10000, 0, params), std::invalid_argument);
}
