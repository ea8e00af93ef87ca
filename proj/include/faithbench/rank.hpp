#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "faithbench/metrics.hpp"

namespace faithbench {

struct Ranking {
    MetricKind metric = MetricKind::pgi;
    // rank 0 = most faithful; scores are repeat-averaged before sorting and
    // ties break lexicographically on the candidate name.
    std::vector<std::string> ordered;
    std::vector<double> scores;  // aligned with `ordered`

    int rank_of(const std::string& candidate) const;
};

// One score per (candidate, repeat) with equal candidate sets across repeats.
Ranking rank_candidates(const std::vector<MetricScore>& scores);

// Pearson correlation of the rank vectors (average ranks for ties).
double spearman(const Ranking& r1, const Ranking& r2);

// Tie-corrected tau-b over O(n^2) pair counting.
double kendall(const Ranking& r1, const Ranking& r2);

// Top-weighted tau with additive hyperbolic weights w(i) = 1/(i+1),
// symmetrized over both argument orders.
double weighted_kendall(const Ranking& r1, const Ranking& r2);

// Value-vector variants shared with the oracles and the Ranking wrappers.
double spearman_values(const std::vector<double>& a, const std::vector<double>& b);
double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b);
double weighted_kendall_ranks(const std::vector<int>& r1, const std::vector<int>& r2);

enum class CorrelationKind { spearman, kendall, weighted_kendall };
std::string correlation_kind_name(CorrelationKind kind);

struct AgreementMatrix {
    std::vector<MetricKind> metrics;
    // One symmetric metrics x metrics matrix per correlation kind.
    std::map<CorrelationKind, std::vector<std::vector<double>>> values;
};

AgreementMatrix agreement(const std::vector<Ranking>& rankings);

struct ReportBundle {
    std::vector<Ranking> rankings;
    AgreementMatrix aggregated;              // correlation of repeat-averaged ranks
    std::optional<AgreementMatrix> per_repeat_mean;  // mean of per-repeat correlations
};

// Emits top-3 tables, pairwise slope-chart rows and heatmap CSVs for one
// dataset/architecture cell.
void write_report_artifacts(const std::filesystem::path& dir, const std::string& dataset,
                            const std::string& architecture, const ReportBundle& bundle);

}  // namespace faithbench
