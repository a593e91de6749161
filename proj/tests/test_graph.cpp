#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <random>

#include "odflow/common.hpp"
#include "odflow/graph.hpp"

using namespace odflow;
using graph::Building;

namespace {

std::vector<Building> square_campus() {
    // Four buildings on a rough square, a few hundred meters apart.
    return {
        {"CUI", 43.6580, -79.3790, 0, 0},
        {"JOR", 43.6600, -79.3760, 0, 0},
        {"KHE", 43.6560, -79.3800, 0, 0},
        {"LIB", 43.6590, -79.3820, 0, 0},
    };
}

std::vector<Building> grid_campus(std::size_t n) {
    std::vector<Building> buildings;
    for (std::size_t i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "B%02zu", i);
        buildings.push_back(Building{id, 43.65 + 0.0005 * static_cast<double>(i % 5),
                                     -79.38 + 0.0007 * static_cast<double>(i / 5), 0, 0});
    }
    return buildings;
}

std::size_t find_node(const graph::OdGraph& g, const std::string& origin, const std::string& destination) {
    for (const auto& n : g.nodes)
        if (g.origin_id(n.index) == origin && g.destination_id(n.index) == destination) return n.index;
    FAIL("node not found");
    return 0;
}

}  // namespace

TEST_CASE("od node enumeration counts and ordering") {
    auto three = graph::prepare_buildings(grid_campus(3));
    auto nodes = graph::enumerate_od_nodes(three);
    CHECK(nodes.size() == 6);

    auto twenty_two = graph::prepare_buildings(grid_campus(22));
    CHECK(graph::enumerate_od_nodes(twenty_two).size() == 462);

    auto one = graph::prepare_buildings(grid_campus(1));
    CHECK_THROWS_AS(graph::enumerate_od_nodes(one), ValidationError);

    // Lexicographic (origin, destination) order and the index formula agree.
    for (const auto& n : nodes) {
        CHECK(n.origin != n.destination);
        CHECK(graph::od_node_index(3, n.origin, n.destination) == n.index);
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const auto& a = nodes[i - 1];
        const auto& b = nodes[i];
        const bool ordered =
            three[a.origin].id < three[b.origin].id ||
            (three[a.origin].id == three[b.origin].id && three[a.destination].id < three[b.destination].id);
        CHECK(ordered);
    }
}

TEST_CASE("node count is B(B-1) for every B") {
    for (std::size_t b = 2; b <= 8; ++b) {
        auto buildings = graph::prepare_buildings(grid_campus(b));
        CHECK(graph::enumerate_od_nodes(buildings).size() == b * (b - 1));
    }
}

TEST_CASE("shared-building edge rule with the campus fixture") {
    graph::OdGraph g = graph::build_od_graph(square_campus());
    const std::size_t khe_cui = find_node(g, "KHE", "CUI");
    const std::size_t cui_jor = find_node(g, "CUI", "JOR");

    // (KHE, CUI) → (CUI, JOR) carries the KHE-JOR distance.
    const auto& khe = g.buildings[g.nodes[khe_cui].origin];
    const auto& jor = g.buildings[g.nodes[cui_jor].destination];
    const double expected = graph::planar_distance_m(khe, jor);
    bool found = false;
    for (const auto& e : g.edges) {
        if (e.src == khe_cui && e.dst == cui_jor) {
            CHECK(e.weight_m == doctest::Approx(expected));
            found = true;
        }
    }
    CHECK(found);

    // Unrelated pairs share no building: no edge.
    const std::size_t khe_lib = find_node(g, "KHE", "LIB");
    const std::size_t cui_jor2 = cui_jor;
    for (const auto& e : g.edges) CHECK(!(e.src == khe_lib && e.dst == cui_jor2));

    // Reverse pair: edge exists in the list with weight 0, absent from the
    // raw-weighted adjacency.
    const std::size_t cui_khe = find_node(g, "CUI", "KHE");
    bool reverse_found = false;
    for (const auto& e : g.edges) {
        if (e.src == khe_cui && e.dst == cui_khe) {
            CHECK(e.weight_m == doctest::Approx(0.0));
            reverse_found = true;
        }
    }
    CHECK(reverse_found);
    CHECK(g.adjacency(khe_cui, cui_khe) == 0.0);
}

TEST_CASE("edge rule soundness and completeness by brute force") {
    for (std::size_t b : {3u, 4u, 6u}) {
        graph::OdGraph g = graph::build_od_graph(grid_campus(b));
        std::vector<std::vector<bool>> has_edge(g.nodes.size(), std::vector<bool>(g.nodes.size(), false));
        for (const auto& e : g.edges) {
            CHECK(!has_edge[e.src][e.dst]);  // no duplicates
            has_edge[e.src][e.dst] = true;
        }
        for (const auto& u : g.nodes)
            for (const auto& v : g.nodes) {
                const bool rule = u.destination == v.origin;
                CHECK(has_edge[u.index][v.index] == rule);
            }
    }
}

TEST_CASE("edge weight transforms") {
    CHECK(graph::edge_weight_transform(120.0, graph::EdgeWeightMode::kRaw) == 120.0);
    CHECK(graph::edge_weight_transform(120.0, graph::EdgeWeightMode::kUnit) == 1.0);
    CHECK(graph::edge_weight_transform(0.0, graph::EdgeWeightMode::kUnit) == 0.0);
    CHECK(graph::edge_weight_transform(0.0, graph::EdgeWeightMode::kInverse) == doctest::Approx(1.0));
    CHECK(graph::edge_weight_transform(1.0, graph::EdgeWeightMode::kInverse) == doctest::Approx(0.5));
    CHECK_THROWS_AS(graph::edge_weight_transform(-1.0, graph::EdgeWeightMode::kRaw), std::invalid_argument);
}

TEST_CASE("normalization hand cases") {
    num::Matrix single(1, 1);
    num::Matrix n1 = graph::normalize_adjacency(single, true);
    CHECK(n1(0, 0) == doctest::Approx(1.0));

    num::Matrix path = num::Matrix::from_rows({{0, 1}, {1, 0}});
    num::Matrix n2 = graph::normalize_adjacency(path, true);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(n2(i, j) == doctest::Approx(0.5));

    num::Matrix negative = num::Matrix::from_rows({{0, -1}, {1, 0}});
    CHECK_THROWS_AS(graph::normalize_adjacency(negative, true), std::invalid_argument);

    // Isolated row without self loops stays all-zero.
    num::Matrix isolated = num::Matrix::from_rows({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}});
    num::Matrix n3 = graph::normalize_adjacency(isolated, false);
    CHECK(n3(0, 0) == 0.0);
    CHECK(n3(0, 1) == 0.0);
    CHECK(n3(0, 2) == 0.0);
    CHECK(n3(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("normalized spectrum lies in [-1, 1] against a dense eigensolve") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(2, 20);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = size_dist(rng);
        num::Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (unit(rng) < 0.4) {
                    const double w = 0.1 + 10.0 * unit(rng);
                    a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = w;
                    a(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = w;
                }
            }
        num::Matrix norm = graph::normalize_adjacency(a, true);

        // Symmetry is preserved.
        double asymmetry = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                asymmetry = std::max(asymmetry, std::abs(norm(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                                                         norm(static_cast<std::size_t>(j), static_cast<std::size_t>(i))));
        CHECK(asymmetry <= 1e-12);

        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = norm(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
        REQUIRE(solver.info() == Eigen::Success);
        for (int k = 0; k < n; ++k) {
            CHECK(solver.eigenvalues()[k] >= -1.0 - 1e-9);
            CHECK(solver.eigenvalues()[k] <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("planar projection matches haversine within 0.5% at campus scale") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> dlat(-0.009, 0.009);  // ~±1 km
    std::uniform_real_distribution<double> dlon(-0.012, 0.012);
    std::vector<Building> buildings;
    for (int i = 0; i < 30; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "P%02d", i);
        buildings.push_back(Building{id, 43.6577 + dlat(rng), -79.3788 + dlon(rng), 0, 0});
    }
    auto prepared = graph::prepare_buildings(std::move(buildings));
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        for (std::size_t j = i + 1; j < prepared.size(); ++j) {
            const double planar = graph::planar_distance_m(prepared[i], prepared[j]);
            const double sphere =
                graph::haversine_m(prepared[i].lat, prepared[i].lon, prepared[j].lat, prepared[j].lon);
            if (sphere < 1.0) continue;
            CHECK(std::abs(planar - sphere) / sphere < 0.005);
        }
    }
}

TEST_CASE("unit mode excludes reverse-pair edges from the adjacency") {
    graph::GraphOptions options;
    options.weight_mode = graph::EdgeWeightMode::kUnit;
    graph::OdGraph g = graph::build_od_graph(square_campus(), options);
    const std::size_t khe_cui = find_node(g, "KHE", "CUI");
    const std::size_t cui_khe = find_node(g, "CUI", "KHE");
    const std::size_t cui_jor = find_node(g, "CUI", "JOR");
    CHECK(g.adjacency(khe_cui, cui_khe) == 0.0);
    CHECK(g.adjacency(khe_cui, cui_jor) == 1.0);
}

TEST_CASE("inverse mode keeps reverse-pair edges with weight 1") {
    graph::GraphOptions options;
    options.weight_mode = graph::EdgeWeightMode::kInverse;
    graph::OdGraph g = graph::build_od_graph(square_campus(), options);
    const std::size_t khe_cui = find_node(g, "KHE", "CUI");
    const std::size_t cui_khe = find_node(g, "CUI", "KHE");
    CHECK(g.adjacency(khe_cui, cui_khe) == doctest::Approx(1.0));
}

TEST_CASE("duplicate building ids are rejected") {
    auto buildings = square_campus();
    buildings.push_back(buildings.front());
    CHECK_THROWS_AS(graph::prepare_buildings(std::move(buildings)), ValidationError);
}
