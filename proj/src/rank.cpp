#include "faithbench/rank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "faithbench/io.hpp"

namespace faithbench {

namespace {

std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j - 1);  // 0-based average rank
        for (size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

std::pair<std::vector<int>, std::vector<int>> paired_ranks(const Ranking& r1, const Ranking& r2) {
    require(r1.ordered.size() == r2.ordered.size(), ErrorCode::invalid_argument,
            "rankings cover different candidate counts");
    require(r1.ordered.size() >= 2, ErrorCode::invalid_argument,
            "correlation needs at least two candidates");
    std::vector<int> a, b;
    a.reserve(r1.ordered.size());
    b.reserve(r1.ordered.size());
    for (const auto& candidate : r1.ordered) {
        const int rank2 = r2.rank_of(candidate);
        require(rank2 >= 0, ErrorCode::invalid_argument,
                "candidate sets differ between rankings: " + candidate);
        a.push_back(r1.rank_of(candidate));
        b.push_back(rank2);
    }
    return {a, b};
}

double weighted_kendall_directed(const std::vector<int>& r1, const std::vector<int>& r2) {
    // Additive hyperbolic weights on the first ranking's positions:
    // an exchange of items at ranks (i, j) costs 1/(i+1) + 1/(j+1).
    const size_t n = r1.size();
    double agree = 0.0;
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double w = 1.0 / (static_cast<double>(r1[i]) + 1.0) +
                             1.0 / (static_cast<double>(r1[j]) + 1.0);
            const int da = r1[i] - r1[j];
            const int db = r2[i] - r2[j];
            total += w;
            agree += (da > 0) == (db > 0) ? w : -w;
        }
    }
    return agree / total;
}

void write_csv_rows(const std::filesystem::path& path, const std::string& header,
                    const std::vector<std::string>& rows) {
    std::ostringstream out;
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
    write_text_file(path, out.str());
}

}  // namespace

int Ranking::rank_of(const std::string& candidate) const {
    for (size_t i = 0; i < ordered.size(); ++i)
        if (ordered[i] == candidate) return static_cast<int>(i);
    return -1;
}

Ranking rank_candidates(const std::vector<MetricScore>& scores) {
    require(!scores.empty(), ErrorCode::invalid_argument, "no scores to rank");
    const MetricKind metric = scores.front().metric;
    const Direction direction = scores.front().direction;

    std::map<std::string, std::map<int, double>> by_candidate;  // candidate -> repeat -> value
    std::set<int> repeats;
    for (const auto& score : scores) {
        require(score.metric == metric, ErrorCode::invalid_argument,
                "mixed metrics in one ranking");
        const std::string name = score.table.candidate();
        require(!by_candidate[name].count(score.table.repeat), ErrorCode::invalid_argument,
                "duplicate score for " + name + " repeat " + std::to_string(score.table.repeat));
        by_candidate[name][score.table.repeat] = score.value;
        repeats.insert(score.table.repeat);
    }
    for (const auto& [name, values] : by_candidate)
        require(values.size() == repeats.size(), ErrorCode::invalid_argument,
                "incomplete grid: candidate " + name + " is missing repeats");

    // Mean over repeats, then sort per direction; ties break on the name.
    std::vector<std::pair<double, std::string>> aggregated;
    aggregated.reserve(by_candidate.size());
    for (const auto& [name, values] : by_candidate) {
        double sum = 0.0;
        for (const auto& [rep, v] : values) sum += v;
        aggregated.emplace_back(sum / static_cast<double>(values.size()), name);
    }
    std::sort(aggregated.begin(), aggregated.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first)
            return direction == Direction::higher_better ? a.first > b.first : a.first < b.first;
        return a.second < b.second;
    });

    Ranking ranking;
    ranking.metric = metric;
    for (const auto& [value, name] : aggregated) {
        ranking.ordered.push_back(name);
        ranking.scores.push_back(value);
    }
    return ranking;
}

double spearman_values(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2, ErrorCode::invalid_argument,
            "spearman needs two equally sized vectors of length >= 2");
    const auto ra = fractional_ranks(a);
    const auto rb = fractional_ranks(b);
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - mean_a) * (rb[i] - mean_b);
        var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
        var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
    }
    require(var_a > 0.0 && var_b > 0.0, ErrorCode::numeric,
            "spearman undefined for a constant rank vector");
    return cov / std::sqrt(var_a * var_b);
}

double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2, ErrorCode::invalid_argument,
            "kendall needs two equally sized vectors of length >= 2");
    double concordant = 0.0, discordant = 0.0, ties_a = 0.0, ties_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = i + 1; j < a.size(); ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;
            if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if (da * db > 0.0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom =
        std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
    require(denom > 0.0, ErrorCode::numeric, "kendall undefined for constant vectors");
    return (concordant - discordant) / denom;
}

double weighted_kendall_ranks(const std::vector<int>& r1, const std::vector<int>& r2) {
    require(r1.size() == r2.size() && r1.size() >= 2, ErrorCode::invalid_argument,
            "weighted kendall needs two equally sized rankings of length >= 2");
    return 0.5 * (weighted_kendall_directed(r1, r2) + weighted_kendall_directed(r2, r1));
}

double spearman(const Ranking& r1, const Ranking& r2) {
    const auto [a, b] = paired_ranks(r1, r2);
    std::vector<double> da(a.begin(), a.end());
    std::vector<double> db(b.begin(), b.end());
    return spearman_values(da, db);
}

double kendall(const Ranking& r1, const Ranking& r2) {
    const auto [a, b] = paired_ranks(r1, r2);
    std::vector<double> da(a.begin(), a.end());
    std::vector<double> db(b.begin(), b.end());
    return kendall_tau_b(da, db);
}

double weighted_kendall(const Ranking& r1, const Ranking& r2) {
    const auto [a, b] = paired_ranks(r1, r2);
    return weighted_kendall_ranks(a, b);
}

std::string correlation_kind_name(CorrelationKind kind) {
    switch (kind) {
        case CorrelationKind::spearman: return "spearman";
        case CorrelationKind::kendall: return "kendall";
        case CorrelationKind::weighted_kendall: return "weighted-kendall";
    }
    return "spearman";
}

AgreementMatrix agreement(const std::vector<Ranking>& rankings) {
    require(rankings.size() >= 2, ErrorCode::invalid_argument,
            "agreement needs at least two metrics");

    AgreementMatrix matrix;
    for (const auto& ranking : rankings) matrix.metrics.push_back(ranking.metric);

    const size_t m = rankings.size();
    for (CorrelationKind kind : {CorrelationKind::spearman, CorrelationKind::kendall,
                                 CorrelationKind::weighted_kendall}) {
        std::vector<std::vector<double>> cells(m, std::vector<double>(m, 1.0));
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = i + 1; j < m; ++j) {
                double value = 0.0;
                switch (kind) {
                    case CorrelationKind::spearman: value = spearman(rankings[i], rankings[j]); break;
                    case CorrelationKind::kendall: value = kendall(rankings[i], rankings[j]); break;
                    case CorrelationKind::weighted_kendall:
                        value = weighted_kendall(rankings[i], rankings[j]);
                        break;
                }
                cells[i][j] = value;
                cells[j][i] = value;
            }
        }
        matrix.values[kind] = std::move(cells);
    }
    return matrix;
}

void write_report_artifacts(const std::filesystem::path& dir, const std::string& dataset,
                            const std::string& architecture, const ReportBundle& bundle) {
    std::filesystem::create_directories(dir);
    const std::string prefix = dataset + "_" + architecture;

    // Top-3 per metric, mirroring the candidate identity split.
    {
        std::vector<std::string> rows;
        for (const auto& ranking : bundle.rankings) {
            const size_t top = std::min<size_t>(3, ranking.ordered.size());
            for (size_t i = 0; i < top; ++i) {
                const auto& name = ranking.ordered[i];
                const auto sep = name.find('|');
                rows.push_back(dataset + "," + metric_kind_name(ranking.metric) + "," +
                               name.substr(0, sep) + "," + name.substr(sep + 1) + "," +
                               std::to_string(i));
            }
        }
        write_csv_rows(dir / (prefix + "_top3.csv"), "dataset,metric,method,baseline,ranking", rows);
    }

    // Slope-chart rows per metric pair.
    for (size_t i = 0; i < bundle.rankings.size(); ++i) {
        for (size_t j = i + 1; j < bundle.rankings.size(); ++j) {
            const auto& r1 = bundle.rankings[i];
            const auto& r2 = bundle.rankings[j];
            std::vector<std::string> rows;
            for (const auto& candidate : r1.ordered)
                rows.push_back(candidate + "," + std::to_string(r1.rank_of(candidate)) + "," +
                               std::to_string(r2.rank_of(candidate)));
            const std::string name = prefix + "_slope_" + metric_kind_name(r1.metric) + "_" +
                                     metric_kind_name(r2.metric) + ".csv";
            write_csv_rows(dir / name,
                           "candidate,rank_" + metric_kind_name(r1.metric) + ",rank_" +
                               metric_kind_name(r2.metric),
                           rows);
        }
    }

    // Heatmap CSVs, one per correlation kind and aggregation reading.
    auto write_matrix = [&](const AgreementMatrix& matrix, const std::string& suffix) {
        for (const auto& [kind, cells] : matrix.values) {
            std::vector<std::string> rows;
            for (size_t i = 0; i < cells.size(); ++i) {
                std::string row = metric_kind_name(matrix.metrics[i]);
                for (double v : cells[i]) row += "," + format_double(v);
                rows.push_back(row);
            }
            std::string header = "metric";
            for (const auto metric : matrix.metrics) header += "," + metric_kind_name(metric);
            write_csv_rows(dir / (prefix + "_agreement_" + correlation_kind_name(kind) + suffix + ".csv"),
                           header, rows);
        }
    };
    write_matrix(bundle.aggregated, "");
    if (bundle.per_repeat_mean) write_matrix(*bundle.per_repeat_mean, "_per_repeat");
}

}  // namespace faithbench
