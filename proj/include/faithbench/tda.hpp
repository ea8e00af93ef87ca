#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faithbench/metrics.hpp"

namespace faithbench {

struct MapperConfig {
    int resolution = 10;     // number of cover intervals
    double gain = 0.4;       // fractional overlap of neighboring intervals
    int histogram_bins = 10; // single-linkage gap heuristic bins
    uint64_t seed = 0;

    void validate() const;
};

struct CoverInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// resolution intervals with centers spaced range/resolution apart and length
// spacing/(1 - gain); neighbor overlap fraction equals gain. A zero lens
// range degenerates to one interval.
std::vector<CoverInterval> build_cover(const std::vector<double>& lens_values,
                                       int resolution, double gain);

struct MapperNode {
    std::vector<int> members;   // point indices
    double filter_value = 0.0;  // midpoint of the members' lens range
    int interval_index = 0;
};

struct MapperGraph {
    std::vector<MapperNode> nodes;
    std::vector<std::pair<int, int>> edges;  // nodes sharing at least one point
};

// Per-interval single-linkage clustering cut at the histogram-gap threshold
// (first empty bin of a histogram of within-slice pairwise distances; no
// empty bin means one cluster).
MapperGraph build_mapper(const Eigen::MatrixXd& points, const std::vector<double>& lens,
                         const MapperConfig& cfg);

enum class PersistenceClass { component, branch, loop };

struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;
    PersistenceClass cls = PersistenceClass::component;
};

using PersistenceDiagram = std::vector<DiagramPoint>;

// Extended persistence of the node-filtered graph: an ascending union-find
// sweep pairs upward branches by the elder rule, a descending sweep pairs
// downward branches, every connected component contributes its (min, max)
// essential pair, and independent cycles contribute loop pairs.
PersistenceDiagram persistence(const MapperGraph& graph);

// Exact bottleneck distance: binary search over the candidate cost set with
// bipartite matching feasibility tests. Unmatched points pay their L-inf
// distance to the diagonal, (death - birth) / 2.
double bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2);

struct StabilityRecord {
    int resolution = 0;
    int candidate = 0;
    double stability = 0.0;  // 95th percentile of bootstrap bottleneck distances
};

// Per-column z-score of a point cloud; zero-variance columns are centered.
Eigen::MatrixXd standardize_cloud(const Eigen::MatrixXd& points);

// Lowest resolution among the argmin of total stability over candidates.
int pick_resolution(const std::vector<StabilityRecord>& records, const std::vector<int>& grid);

// Grid search: per (candidate, resolution), `bootstraps` resamples of the
// cloud are compared against the full-data diagram; stability is the 95th
// percentile of those distances.
int select_resolution(const std::vector<Eigen::MatrixXd>& candidate_clouds,
                      const std::vector<double>& lens, const std::vector<int>& grid,
                      int bootstraps, uint64_t seed,
                      std::vector<StabilityRecord>* records_out = nullptr);

std::vector<int> default_resolution_grid();  // {6, 8, ..., 30}

// Pairwise bottleneck matrix over the candidates' diagrams; each score is the
// mean distance to all others, lower is better. Clouds are standardized
// per-column before the mapper build.
std::vector<MetricScore> bnd_scores(const std::vector<const AttributionTable*>& tables,
                                    const std::vector<double>& lens, int resolution,
                                    Eigen::MatrixXd* matrix_out = nullptr);

PersistenceDiagram diagram_for_cloud(const Eigen::MatrixXd& cloud,
                                     const std::vector<double>& lens,
                                     const MapperConfig& cfg);

nlohmann::json mapper_graph_to_json(const MapperGraph& graph);

}  // namespace faithbench
