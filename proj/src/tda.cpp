#include "faithbench/tda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    }

    // Returns false when already joined.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<size_t>(b)] = a;
        return true;
    }
};

double nearest_rank_percentile(std::vector<double> values, double p) {
    require(!values.empty(), ErrorCode::invalid_argument, "percentile of an empty set");
    std::sort(values.begin(), values.end());
    const size_t rank = static_cast<size_t>(
        std::ceil(p * static_cast<double>(values.size())));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

// Single-linkage components of one slice, cut at the histogram-gap threshold.
// Zero-distance pairs are always linked and stay out of the histogram, so
// duplicated points cannot shift the gap.
std::vector<std::vector<int>> cluster_slice(const Eigen::MatrixXd& points,
                                            const std::vector<int>& members, int bins) {
    const size_t m = members.size();
    if (m == 1) return {{members[0]}};

    UnionFind uf(m);
    std::vector<double> dist(m * m, 0.0);
    double dmax = 0.0;
    for (size_t a = 0; a < m; ++a) {
        for (size_t b = a + 1; b < m; ++b) {
            const double d = (points.row(members[a]) - points.row(members[b])).norm();
            dist[a * m + b] = d;
            dmax = std::max(dmax, d);
            if (d == 0.0) uf.unite(static_cast<int>(a), static_cast<int>(b));
        }
    }

    if (dmax > 0.0) {
        std::vector<int> histogram(static_cast<size_t>(bins), 0);
        for (size_t a = 0; a < m; ++a)
            for (size_t b = a + 1; b < m; ++b) {
                const double d = dist[a * m + b];
                if (d == 0.0) continue;
                const size_t bin = std::min<size_t>(static_cast<size_t>(bins) - 1,
                                                    static_cast<size_t>(d / dmax *
                                                                        static_cast<double>(bins)));
                ++histogram[bin];
            }
        // A gap separates two populated distance regions: the cut is the
        // first empty bin after the first nonempty one. Leading empty bins
        // only mean no tight pairs exist.
        int first_nonempty = 0;
        while (first_nonempty < bins && histogram[static_cast<size_t>(first_nonempty)] == 0)
            ++first_nonempty;
        int gap_bin = -1;
        for (int b = first_nonempty + 1; b < bins; ++b) {
            if (histogram[static_cast<size_t>(b)] == 0) {
                gap_bin = b;
                break;
            }
        }
        if (gap_bin < 0) {
            for (size_t a = 1; a < m; ++a) uf.unite(0, static_cast<int>(a));
        } else {
            const double threshold = dmax * static_cast<double>(gap_bin) / static_cast<double>(bins);
            for (size_t a = 0; a < m; ++a)
                for (size_t b = a + 1; b < m; ++b)
                    if (dist[a * m + b] < threshold) uf.unite(static_cast<int>(a), static_cast<int>(b));
        }
    }

    std::map<int, std::vector<int>> groups;
    for (size_t a = 0; a < m; ++a) groups[uf.find(static_cast<int>(a))].push_back(members[a]);
    std::vector<std::vector<int>> clusters;
    clusters.reserve(groups.size());
    for (auto& [root, pts] : groups) clusters.push_back(std::move(pts));
    return clusters;
}

// Branch pairs from a monotone union-find sweep. `ascending` sweeps sublevel
// sets (upward branches); descending sweeps superlevel sets (downward
// branches). Zero-persistence pairs are dropped.
void sweep_branches(const MapperGraph& graph, const std::vector<std::vector<int>>& adjacency,
                    bool ascending, PersistenceDiagram& diagram) {
    const size_t n = graph.nodes.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double fa = graph.nodes[static_cast<size_t>(a)].filter_value;
        const double fb = graph.nodes[static_cast<size_t>(b)].filter_value;
        if (fa != fb) return ascending ? fa < fb : fa > fb;
        return a < b;
    });
    std::vector<int> position(n);
    for (size_t i = 0; i < n; ++i) position[static_cast<size_t>(order[i])] = static_cast<int>(i);

    // Per-root extreme value: min for ascending (the elder birth), max for
    // descending.
    UnionFind uf(n);
    std::vector<double> extreme(n);
    for (size_t v = 0; v < n; ++v) extreme[v] = graph.nodes[v].filter_value;

    auto older = [&](double a, double b) { return ascending ? a < b : a > b; };

    for (size_t i = 0; i < n; ++i) {
        const int v = order[i];
        for (int u : adjacency[static_cast<size_t>(v)]) {
            if (position[static_cast<size_t>(u)] > static_cast<int>(i)) continue;  // not added yet
            const int ru = uf.find(u);
            const int rv = uf.find(v);
            if (ru == rv) continue;
            const double bu = extreme[static_cast<size_t>(ru)];
            const double bv = extreme[static_cast<size_t>(rv)];
            const double surviving = older(bu, bv) || (bu == bv) ? bu : bv;
            const double dying = older(bu, bv) || (bu == bv) ? bv : bu;
            const double merge_value = graph.nodes[static_cast<size_t>(v)].filter_value;
            if (dying != merge_value) {
                if (ascending)
                    diagram.push_back({dying, merge_value, PersistenceClass::branch});
                else
                    diagram.push_back({merge_value, dying, PersistenceClass::branch});
            }
            uf.unite(ru, rv);
            extreme[static_cast<size_t>(uf.find(ru))] = surviving;
        }
    }
}

// Values of non-tree edges under Kruskal insertion; `ascending` orders edges
// by their max endpoint (cycle births), otherwise by descending min endpoint
// (cycle deaths).
std::vector<double> cycle_values(const MapperGraph& graph, bool ascending) {
    struct EdgeRec {
        double key_primary;
        double key_secondary;
        int a, b;
        double value;
    };
    std::vector<EdgeRec> edges;
    edges.reserve(graph.edges.size());
    for (const auto& [a, b] : graph.edges) {
        const double fa = graph.nodes[static_cast<size_t>(a)].filter_value;
        const double fb = graph.nodes[static_cast<size_t>(b)].filter_value;
        const double hi = std::max(fa, fb);
        const double lo = std::min(fa, fb);
        if (ascending)
            edges.push_back({hi, lo, a, b, hi});
        else
            edges.push_back({-lo, -hi, a, b, lo});
    }
    std::sort(edges.begin(), edges.end(), [](const EdgeRec& x, const EdgeRec& y) {
        if (x.key_primary != y.key_primary) return x.key_primary < y.key_primary;
        if (x.key_secondary != y.key_secondary) return x.key_secondary < y.key_secondary;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    UnionFind uf(graph.nodes.size());
    std::vector<double> values;
    for (const auto& e : edges)
        if (!uf.unite(e.a, e.b)) values.push_back(e.value);
    return values;
}

double diagonal_cost(const DiagramPoint& p) { return (p.death - p.birth) / 2.0; }

double linf_cost(const DiagramPoint& p, const DiagramPoint& q) {
    return std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
}

// Kuhn's augmenting-path matching on the standard bottleneck bipartite graph:
// each side holds the diagram's points plus diagonal slots for the other
// side's points.
bool matching_feasible(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double t) {
    const size_t n1 = d1.size();
    const size_t n2 = d2.size();
    const size_t left = n1 + n2;   // d1 points, then diagonal partners of d2
    const size_t right = n2 + n1;  // d2 points, then diagonal partners of d1

    std::vector<std::vector<int>> adj(left);
    for (size_t i = 0; i < n1; ++i) {
        for (size_t j = 0; j < n2; ++j)
            if (linf_cost(d1[i], d2[j]) <= t) adj[i].push_back(static_cast<int>(j));
        if (diagonal_cost(d1[i]) <= t) adj[i].push_back(static_cast<int>(n2 + i));
    }
    for (size_t j = 0; j < n2; ++j) {
        if (diagonal_cost(d2[j]) <= t) adj[n1 + j].push_back(static_cast<int>(j));
        // Diagonal-to-diagonal matches are free.
        for (size_t i = 0; i < n1; ++i) adj[n1 + j].push_back(static_cast<int>(n2 + i));
    }

    std::vector<int> match_right(right, -1);
    std::vector<char> visited(right, 0);

    std::function<bool(int)> augment = [&](int u) -> bool {
        for (int v : adj[static_cast<size_t>(u)]) {
            if (visited[static_cast<size_t>(v)]) continue;
            visited[static_cast<size_t>(v)] = 1;
            if (match_right[static_cast<size_t>(v)] < 0 || augment(match_right[static_cast<size_t>(v)])) {
                match_right[static_cast<size_t>(v)] = u;
                return true;
            }
        }
        return false;
    };

    size_t matched = 0;
    for (size_t u = 0; u < left; ++u) {
        std::fill(visited.begin(), visited.end(), 0);
        if (augment(static_cast<int>(u))) ++matched;
    }
    return matched == left;
}

}  // namespace

void MapperConfig::validate() const {
    require(resolution >= 2, ErrorCode::invalid_argument, "resolution must be at least 2");
    require(gain >= 0.3 && gain <= 0.5, ErrorCode::invalid_argument,
            "gain must lie in [0.3, 0.5]");
    require(histogram_bins >= 2, ErrorCode::invalid_argument, "histogram_bins must be at least 2");
}

std::vector<CoverInterval> build_cover(const std::vector<double>& lens_values, int resolution,
                                       double gain) {
    require(!lens_values.empty(), ErrorCode::invalid_argument, "cover of an empty lens");
    require(resolution >= 1, ErrorCode::invalid_argument, "resolution must be positive");
    require(gain >= 0.0 && gain < 1.0, ErrorCode::invalid_argument, "gain must lie in [0, 1)");

    const auto [lo_it, hi_it] = std::minmax_element(lens_values.begin(), lens_values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) return {{lo, hi}};

    // Centers spaced range/resolution apart; interval length spacing/(1-gain)
    // gives a fractional neighbor overlap of exactly `gain`.
    const double spacing = (hi - lo) / static_cast<double>(resolution);
    const double length = spacing / (1.0 - gain);
    std::vector<CoverInterval> cover;
    cover.reserve(static_cast<size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double center = lo + (static_cast<double>(i) + 0.5) * spacing;
        cover.push_back({center - length / 2.0, center + length / 2.0});
    }
    return cover;
}

MapperGraph build_mapper(const Eigen::MatrixXd& points, const std::vector<double>& lens,
                         const MapperConfig& cfg) {
    require(points.rows() > 0, ErrorCode::invalid_argument, "mapper needs at least one point");
    require(static_cast<size_t>(points.rows()) == lens.size(), ErrorCode::shape,
            "lens length does not match the point count");

    const auto cover = build_cover(lens, cfg.resolution, cfg.gain);

    MapperGraph graph;
    for (size_t interval = 0; interval < cover.size(); ++interval) {
        std::vector<int> members;
        for (size_t i = 0; i < lens.size(); ++i)
            if (lens[i] >= cover[interval].lo && lens[i] <= cover[interval].hi)
                members.push_back(static_cast<int>(i));
        if (members.empty()) continue;
        for (auto& cluster : cluster_slice(points, members, cfg.histogram_bins)) {
            MapperNode node;
            node.interval_index = static_cast<int>(interval);
            // Midpoint of the member lens range: invariant under duplicated
            // points, unlike the mean.
            double lo = lens[static_cast<size_t>(cluster[0])];
            double hi = lo;
            for (int p : cluster) {
                lo = std::min(lo, lens[static_cast<size_t>(p)]);
                hi = std::max(hi, lens[static_cast<size_t>(p)]);
            }
            node.filter_value = 0.5 * (lo + hi);
            node.members = std::move(cluster);
            graph.nodes.push_back(std::move(node));
        }
    }

    // Edges between nodes sharing at least one point.
    std::map<int, std::vector<int>> nodes_of_point;
    for (size_t v = 0; v < graph.nodes.size(); ++v)
        for (int p : graph.nodes[v].members) nodes_of_point[p].push_back(static_cast<int>(v));
    std::set<std::pair<int, int>> edges;
    for (const auto& [point, nodes] : nodes_of_point)
        for (size_t a = 0; a < nodes.size(); ++a)
            for (size_t b = a + 1; b < nodes.size(); ++b)
                edges.insert({std::min(nodes[a], nodes[b]), std::max(nodes[a], nodes[b])});
    graph.edges.assign(edges.begin(), edges.end());
    return graph;
}

PersistenceDiagram persistence(const MapperGraph& graph) {
    PersistenceDiagram diagram;
    if (graph.nodes.empty()) return diagram;

    const size_t n = graph.nodes.size();
    std::vector<std::vector<int>> adjacency(n);
    for (const auto& [a, b] : graph.edges) {
        adjacency[static_cast<size_t>(a)].push_back(b);
        adjacency[static_cast<size_t>(b)].push_back(a);
    }

    sweep_branches(graph, adjacency, true, diagram);
    sweep_branches(graph, adjacency, false, diagram);

    // Essential pair per connected component: (component min, component max).
    UnionFind components(n);
    for (const auto& [a, b] : graph.edges) components.unite(a, b);
    std::map<int, std::pair<double, double>> extremes;
    for (size_t v = 0; v < n; ++v) {
        const int root = components.find(static_cast<int>(v));
        const double f = graph.nodes[v].filter_value;
        auto it = extremes.find(root);
        if (it == extremes.end()) {
            extremes[root] = {f, f};
        } else {
            it->second.first = std::min(it->second.first, f);
            it->second.second = std::max(it->second.second, f);
        }
    }
    for (const auto& [root, range] : extremes)
        diagram.push_back({range.first, range.second, PersistenceClass::component});

    // Independent cycles: births from the ascending sweep, deaths from the
    // descending one, paired in sorted order.
    std::vector<double> births = cycle_values(graph, true);
    std::vector<double> deaths = cycle_values(graph, false);
    std::sort(births.begin(), births.end());
    std::sort(deaths.begin(), deaths.end());
    for (size_t i = 0; i < births.size(); ++i) {
        const double lo = std::min(deaths[i], births[i]);
        const double hi = std::max(deaths[i], births[i]);
        diagram.push_back({lo, hi, PersistenceClass::loop});
    }

    std::sort(diagram.begin(), diagram.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death != b.death) return a.death < b.death;
        return static_cast<int>(a.cls) < static_cast<int>(b.cls);
    });
    return diagram;
}

double bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
    // Diagonal points can always be matched at zero cost.
    PersistenceDiagram a, b;
    for (const auto& p : d1)
        if (p.death != p.birth) a.push_back(p);
    for (const auto& p : d2)
        if (p.death != p.birth) b.push_back(p);
    if (a.empty() && b.empty()) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& p : a) candidates.push_back(diagonal_cost(p));
    for (const auto& q : b) candidates.push_back(diagonal_cost(q));
    for (const auto& p : a)
        for (const auto& q : b) candidates.push_back(linf_cost(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    size_t lo = 0;
    size_t hi = candidates.size() - 1;
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (matching_feasible(a, b, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

Eigen::MatrixXd standardize_cloud(const Eigen::MatrixXd& points) {
    Eigen::MatrixXd out = points;
    const double n = static_cast<double>(points.rows());
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        const double mean = points.col(j).mean();
        const double var = (points.col(j).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        out.col(j) = (points.col(j).array() - mean) / (sd == 0.0 ? 1.0 : sd);
    }
    return out;
}

std::vector<int> default_resolution_grid() {
    std::vector<int> grid;
    for (int r = 6; r <= 30; r += 2) grid.push_back(r);
    return grid;
}

int pick_resolution(const std::vector<StabilityRecord>& records, const std::vector<int>& grid) {
    require(!grid.empty(), ErrorCode::invalid_argument, "empty resolution grid");
    std::map<int, double> totals;
    for (int r : grid) totals[r] = 0.0;
    for (const auto& record : records) {
        auto it = totals.find(record.resolution);
        require(it != totals.end(), ErrorCode::invalid_argument,
                "stability record for a resolution outside the grid");
        it->second += record.stability;
    }
    int best = grid.front();
    double best_total = std::numeric_limits<double>::infinity();
    for (int r : grid) {  // grid order: ties go to the lowest resolution
        if (totals[r] < best_total) {
            best_total = totals[r];
            best = r;
        }
    }
    return best;
}

PersistenceDiagram diagram_for_cloud(const Eigen::MatrixXd& cloud, const std::vector<double>& lens,
                                     const MapperConfig& cfg) {
    return persistence(build_mapper(cloud, lens, cfg));
}

int select_resolution(const std::vector<Eigen::MatrixXd>& candidate_clouds,
                      const std::vector<double>& lens, const std::vector<int>& grid,
                      int bootstraps, uint64_t seed, std::vector<StabilityRecord>* records_out) {
    require(!candidate_clouds.empty(), ErrorCode::invalid_argument, "no candidate point clouds");
    require(!grid.empty(), ErrorCode::invalid_argument, "empty resolution grid");
    require(bootstraps >= 1, ErrorCode::invalid_argument, "bootstraps must be positive");

    const size_t n = lens.size();
    std::vector<StabilityRecord> records;

    for (size_t c = 0; c < candidate_clouds.size(); ++c) {
        const auto& cloud = candidate_clouds[c];
        require(static_cast<size_t>(cloud.rows()) == n, ErrorCode::shape,
                "candidate cloud rows do not match the lens length");
        for (int r : grid) {
            MapperConfig cfg;
            cfg.resolution = r;
            const PersistenceDiagram full = diagram_for_cloud(cloud, lens, cfg);

            std::vector<double> distances;
            distances.reserve(static_cast<size_t>(bootstraps));
            for (int b = 0; b < bootstraps; ++b) {
                Rng rng(derive_seed(seed, "bootstrap:" + std::to_string(c) + ":" + std::to_string(r),
                                    static_cast<uint64_t>(b)));
                Eigen::MatrixXd resampled(cloud.rows(), cloud.cols());
                std::vector<double> resampled_lens(n);
                for (size_t i = 0; i < n; ++i) {
                    const size_t pick = static_cast<size_t>(rng.below(n));
                    resampled.row(static_cast<Eigen::Index>(i)) =
                        cloud.row(static_cast<Eigen::Index>(pick));
                    resampled_lens[i] = lens[pick];
                }
                distances.push_back(bottleneck(diagram_for_cloud(resampled, resampled_lens, cfg), full));
            }
            records.push_back({r, static_cast<int>(c), nearest_rank_percentile(distances, 0.95)});
        }
    }

    if (records_out) *records_out = records;
    return pick_resolution(records, grid);
}

std::vector<MetricScore> bnd_scores(const std::vector<const AttributionTable*>& tables,
                                    const std::vector<double>& lens, int resolution,
                                    Eigen::MatrixXd* matrix_out) {
    require(tables.size() >= 2, ErrorCode::invalid_argument, "bnd_scores needs at least 2 tables");

    std::vector<PersistenceDiagram> diagrams;
    diagrams.reserve(tables.size());
    MapperConfig cfg;
    cfg.resolution = resolution;
    for (const auto* table : tables)
        diagrams.push_back(diagram_for_cloud(standardize_cloud(table->values), lens, cfg));

    const auto n = static_cast<Eigen::Index>(tables.size());
    Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = bottleneck(diagrams[static_cast<size_t>(i)],
                                        diagrams[static_cast<size_t>(j)]);
            matrix(i, j) = d;
            matrix(j, i) = d;
        }

    std::vector<MetricScore> scores;
    scores.reserve(tables.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        MetricScore score;
        score.metric = MetricKind::bnd;
        score.direction = Direction::lower_better;
        score.value = matrix.row(i).sum() / static_cast<double>(n - 1);
        score.table = table_key(*tables[static_cast<size_t>(i)]);
        scores.push_back(score);
    }
    if (matrix_out) *matrix_out = matrix;
    return scores;
}

nlohmann::json mapper_graph_to_json(const MapperGraph& graph) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : graph.nodes)
        nodes.push_back({{"members", node.members},
                         {"filter_value", node.filter_value},
                         {"interval", node.interval_index}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : graph.edges) edges.push_back({a, b});
    return nlohmann::json{{"nodes", nodes}, {"edges", edges}};
}

}  // namespace faithbench
