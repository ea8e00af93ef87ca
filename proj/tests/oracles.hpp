#pragma once

// Independent brute-force oracles. These deliberately avoid the library's
// algorithms: Shapley values by direct subset enumeration, bottleneck by
// exhaustive matching, rank correlations by their textbook formulas.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "faithbench/model.hpp"
#include "faithbench/tda.hpp"

namespace oracle {

// Exact Shapley values with v(S) = mean over reference rows of the model
// output on the masked composite. O(2^d * d) subset enumeration.
inline Eigen::VectorXd shapley_bruteforce(const faithbench::DenseModel& model,
                                          const Eigen::VectorXd& x, const Eigen::MatrixXd& refs,
                                          faithbench::GradientTarget target) {
    const int d = static_cast<int>(x.size());
    const uint64_t total = uint64_t{1} << d;

    auto value = [&](uint64_t bits) {
        double sum = 0.0;
        for (Eigen::Index r = 0; r < refs.rows(); ++r) {
            Eigen::VectorXd composite = refs.row(r);
            for (int j = 0; j < d; ++j)
                if (bits & (uint64_t{1} << j)) composite(j) = x(j);
            sum += target == faithbench::GradientTarget::logit ? model.logit(composite)
                                                               : model.predict(composite);
        }
        return sum / static_cast<double>(refs.rows());
    };

    std::vector<double> v(total);
    for (uint64_t bits = 0; bits < total; ++bits) v[bits] = value(bits);

    std::vector<double> factorial(static_cast<size_t>(d) + 1, 1.0);
    for (int i = 1; i <= d; ++i) factorial[static_cast<size_t>(i)] = factorial[static_cast<size_t>(i - 1)] * i;

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
        for (uint64_t bits = 0; bits < total; ++bits) {
            if (bits & (uint64_t{1} << j)) continue;
            const int s = static_cast<int>(__builtin_popcountll(bits));
            const double weight = factorial[static_cast<size_t>(s)] *
                                  factorial[static_cast<size_t>(d - s - 1)] /
                                  factorial[static_cast<size_t>(d)];
            phi(j) += weight * (v[bits | (uint64_t{1} << j)] - v[bits]);
        }
    }
    return phi;
}

// Exhaustive bottleneck distance: every injective partial matching between
// the diagrams, unmatched points paired with the diagonal.
inline double bottleneck_bruteforce(const faithbench::PersistenceDiagram& d1,
                                    const faithbench::PersistenceDiagram& d2) {
    std::vector<faithbench::DiagramPoint> a, b;
    for (const auto& p : d1)
        if (p.death != p.birth) a.push_back(p);
    for (const auto& p : d2)
        if (p.death != p.birth) b.push_back(p);

    auto diag = [](const faithbench::DiagramPoint& p) { return (p.death - p.birth) / 2.0; };
    auto linf = [](const faithbench::DiagramPoint& p, const faithbench::DiagramPoint& q) {
        return std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> assignment(a.size(), -1);  // index into b or -1 for diagonal
    std::vector<char> used(b.size(), 0);

    std::function<void(size_t, double)> search = [&](size_t i, double cost_so_far) {
        if (cost_so_far >= best) return;
        if (i == a.size()) {
            double cost = cost_so_far;
            for (size_t j = 0; j < b.size(); ++j)
                if (!used[j]) cost = std::max(cost, diag(b[j]));
            best = std::min(best, cost);
            return;
        }
        search(i + 1, std::max(cost_so_far, diag(a[i])));
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            search(i + 1, std::max(cost_so_far, linf(a[i], b[j])));
            used[j] = 0;
        }
    };
    search(0, 0.0);
    return best;
}

// Spearman for tie-free rankings: 1 - 6 * sum(d^2) / (n (n^2 - 1)).
inline double spearman_permutation(const std::vector<int>& r1, const std::vector<int>& r2) {
    const double n = static_cast<double>(r1.size());
    double sum_sq = 0.0;
    for (size_t i = 0; i < r1.size(); ++i) {
        const double diff = static_cast<double>(r1[i] - r2[i]);
        sum_sq += diff * diff;
    }
    return 1.0 - 6.0 * sum_sq / (n * (n * n - 1.0));
}

// Plain tau-a pair counting (valid for tie-free rankings).
inline double kendall_permutation(const std::vector<int>& r1, const std::vector<int>& r2) {
    double concordant = 0.0, discordant = 0.0;
    for (size_t i = 0; i < r1.size(); ++i)
        for (size_t j = i + 1; j < r1.size(); ++j) {
            const int da = r1[i] - r1[j];
            const int db = r2[i] - r2[j];
            if (da * db > 0)
                ++concordant;
            else
                ++discordant;
        }
    return (concordant - discordant) / (concordant + discordant);
}

// Directed weighted tau with additive hyperbolic weights, written out
// longhand; symmetrized over both orders like the implementation contract.
inline double weighted_kendall_naive(const std::vector<int>& r1, const std::vector<int>& r2) {
    auto directed = [](const std::vector<int>& x, const std::vector<int>& y) {
        double agree = 0.0, total = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = i + 1; j < x.size(); ++j) {
                const double w = 1.0 / (x[i] + 1.0) + 1.0 / (x[j] + 1.0);
                total += w;
                const bool concordant = (x[i] < x[j]) == (y[i] < y[j]);
                agree += concordant ? w : -w;
            }
        return agree / total;
    };
    return 0.5 * (directed(r1, r2) + directed(r2, r1));
}

}  // namespace oracle
