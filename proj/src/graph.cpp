#include "odflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "odflow/common.hpp"

namespace odflow::graph {

namespace {
constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

EdgeWeightMode edge_weight_mode_from_string(const std::string& s) {
    if (s == "raw") return EdgeWeightMode::kRaw;
    if (s == "inverse") return EdgeWeightMode::kInverse;
    if (s == "unit") return EdgeWeightMode::kUnit;
    throw ValidationError("unknown edge weight mode: " + s);
}

std::string to_string(EdgeWeightMode mode) {
    switch (mode) {
        case EdgeWeightMode::kRaw: return "raw";
        case EdgeWeightMode::kInverse: return "inverse";
        case EdgeWeightMode::kUnit: return "unit";
    }
    return "raw";
}

std::vector<Building> prepare_buildings(std::vector<Building> buildings) {
    std::sort(buildings.begin(), buildings.end(),
              [](const Building& a, const Building& b) { return a.id < b.id; });
    std::unordered_set<std::string> seen;
    double lat0 = 0.0, lon0 = 0.0;
    for (const Building& b : buildings) {
        if (b.id.empty()) throw ValidationError("building with empty id");
        if (!seen.insert(b.id).second) throw ValidationError("duplicate building id: " + b.id);
        if (b.lat < -90.0 || b.lat > 90.0 || b.lon < -180.0 || b.lon > 180.0)
            throw ValidationError("building " + b.id + " has out-of-range coordinates");
        lat0 += b.lat;
        lon0 += b.lon;
    }
    if (!buildings.empty()) {
        lat0 /= static_cast<double>(buildings.size());
        lon0 /= static_cast<double>(buildings.size());
        const double cos_lat0 = std::cos(lat0 * kDegToRad);
        for (Building& b : buildings) {
            b.x = kEarthRadiusM * cos_lat0 * (b.lon - lon0) * kDegToRad;
            b.y = kEarthRadiusM * (b.lat - lat0) * kDegToRad;
        }
    }
    return buildings;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDegToRad, p2 = lat2 * kDegToRad;
    const double dp = (lat2 - lat1) * kDegToRad;
    const double dl = (lon2 - lon1) * kDegToRad;
    const double a =
        std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

double planar_distance_m(const Building& a, const Building& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<OdNode> enumerate_od_nodes(const std::vector<Building>& buildings) {
    const std::size_t n = buildings.size();
    if (n < 2) throw ValidationError("OD node enumeration needs at least 2 buildings");
    std::vector<OdNode> nodes;
    nodes.reserve(n * (n - 1));
    std::size_t index = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            nodes.push_back(OdNode{index++, i, j});
        }
    }
    return nodes;
}

std::size_t od_node_index(std::size_t n_buildings, std::size_t i, std::size_t j) {
    return i * (n_buildings - 1) + j - (j > i ? 1 : 0);
}

std::vector<OdEdge> build_edges(const std::vector<OdNode>& nodes, const std::vector<Building>& buildings) {
    const std::size_t n = buildings.size();
    std::vector<OdEdge> edges;
    edges.reserve(nodes.size() * (n - 1));
    for (const OdNode& u : nodes) {
        // (a, b) links to every (b, c); the edge carries distance(a, c).
        const std::size_t a = u.origin;
        const std::size_t b = u.destination;
        for (std::size_t c = 0; c < n; ++c) {
            if (c == b) continue;
            const std::size_t v = od_node_index(n, b, c);
            edges.push_back(OdEdge{u.index, v, planar_distance_m(buildings[a], buildings[c])});
        }
    }
    return edges;
}

double edge_weight_transform(double weight_m, EdgeWeightMode mode) {
    if (weight_m < 0.0) throw std::invalid_argument("edge weight must be nonnegative");
    switch (mode) {
        case EdgeWeightMode::kRaw: return weight_m;
        case EdgeWeightMode::kInverse: return 1.0 / (weight_m + 1.0);
        case EdgeWeightMode::kUnit: return weight_m > 0.0 ? 1.0 : 0.0;
    }
    return weight_m;
}

num::Matrix normalize_adjacency(const num::Matrix& adjacency, bool self_loops) {
    if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("normalize_adjacency: matrix not square");
    const std::size_t n = adjacency.rows();
    num::Matrix a = adjacency;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) < 0.0) throw std::invalid_argument("normalize_adjacency: negative entry");
        }
        if (self_loops) a(i, i) += 1.0;
    }
    std::vector<double> inv_sqrt_deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
        inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
    return a;
}

OdGraph build_od_graph(std::vector<Building> buildings, const GraphOptions& options) {
    OdGraph g;
    g.buildings = prepare_buildings(std::move(buildings));
    g.nodes = enumerate_od_nodes(g.buildings);
    g.edges = build_edges(g.nodes, g.buildings);
    const std::size_t v = g.nodes.size();
    g.adjacency.resize(v, v);
    for (const OdEdge& e : g.edges) {
        const double w = edge_weight_transform(e.weight_m, options.weight_mode);
        if (w > 0.0) g.adjacency(e.src, e.dst) = w;
    }
    num::Matrix prop = g.adjacency;
    if (options.symmetrize) {
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = i + 1; j < v; ++j) {
                const double m = std::max(prop(i, j), prop(j, i));
                prop(i, j) = m;
                prop(j, i) = m;
            }
    }
    g.norm_adjacency = normalize_adjacency(prop, options.self_loops);
    return g;
}

void write_nodes_csv(const OdGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "index,origin,destination\n";
    for (const OdNode& n : g.nodes)
        out << n.index << ',' << g.buildings[n.origin].id << ',' << g.buildings[n.destination].id << '\n';
}

void write_edges_csv(const OdGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "src,dst,weight_m\n";
    char buf[64];
    for (const OdEdge& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f\n", e.src, e.dst, e.weight_m);
        out << buf;
    }
}

void write_matrix_csv(const num::Matrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.12g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace odflow::graph
