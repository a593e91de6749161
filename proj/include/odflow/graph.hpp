#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "odflow/matrix.hpp"

namespace odflow::graph {

struct Building {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    // Planar meters, equirectangular projection about the set centroid.
    double x = 0.0;
    double y = 0.0;
};

// A directed origin-destination pair; the graph's vertex. `origin` and
// `destination` index into the building list (sorted by id).
struct OdNode {
    std::size_t index = 0;
    std::size_t origin = 0;
    std::size_t destination = 0;
};

struct OdEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    double weight_m = 0.0;
};

enum class EdgeWeightMode { kRaw, kInverse, kUnit };

EdgeWeightMode edge_weight_mode_from_string(const std::string& s);
std::string to_string(EdgeWeightMode mode);

struct GraphOptions {
    EdgeWeightMode weight_mode = EdgeWeightMode::kRaw;
    bool self_loops = true;
    // Use max(A, Aᵀ) for the propagation operator so degrees are symmetric.
    bool symmetrize = true;
};

struct OdGraph {
    std::vector<Building> buildings;  // sorted by id, projected
    std::vector<OdNode> nodes;
    std::vector<OdEdge> edges;
    num::Matrix adjacency;       // |V|×|V| transformed edge weights
    num::Matrix norm_adjacency;  // propagation operator

    std::size_t node_count() const { return nodes.size(); }
    const std::string& origin_id(std::size_t node) const { return buildings[nodes[node].origin].id; }
    const std::string& destination_id(std::size_t node) const { return buildings[nodes[node].destination].id; }
};

// Sorts by id and fills planar coordinates. Duplicate ids are an error.
std::vector<Building> prepare_buildings(std::vector<Building> buildings);

double haversine_m(double lat1, double lon1, double lat2, double lon2);
double planar_distance_m(const Building& a, const Building& b);

// All ordered pairs (i, j), i ≠ j, in lexicographic (origin, destination)
// order of building ids. Throws on fewer than two buildings.
std::vector<OdNode> enumerate_od_nodes(const std::vector<Building>& buildings);

// Flattened index of pair (origin i, destination j) among B(B−1) nodes.
std::size_t od_node_index(std::size_t n_buildings, std::size_t i, std::size_t j);

// Directed edge (a,b) → (b,c) for every c ≠ b; weight = distance(a, c).
std::vector<OdEdge> build_edges(const std::vector<OdNode>& nodes, const std::vector<Building>& buildings);

// raw → w; inverse → 1/(w + 1m); unit → w > 0 ? 1 : 0. Negative input throws.
double edge_weight_transform(double weight_m, EdgeWeightMode mode);

// Symmetric degree normalization. With self_loops: D̃^(−1/2) (A + I) D̃^(−1/2);
// without: D^(−1/2) A D^(−1/2) with zero-degree rows left all-zero.
// Negative entries throw.
num::Matrix normalize_adjacency(const num::Matrix& adjacency, bool self_loops);

OdGraph build_od_graph(std::vector<Building> buildings, const GraphOptions& options = {});

void write_nodes_csv(const OdGraph& g, const std::filesystem::path& path);
void write_edges_csv(const OdGraph& g, const std::filesystem::path& path);
void write_matrix_csv(const num::Matrix& m, const std::filesystem::path& path);

}  // namespace odflow::graph
