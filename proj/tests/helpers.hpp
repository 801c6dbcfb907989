#pragma once

// Shared test utilities: random synthetic instances, a clustered implicit
// feedback generator, and a Jacobi eigenvalue solver for PSD checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "i2i/dataset.hpp"
#include "i2i/fisher.hpp"
#include "i2i/rng.hpp"
#include "i2i/similarity.hpp"
#include "oracle.hpp"

namespace testutil {

// Random distance matrix with zero diagonal, entries in [0,1].
inline std::vector<std::vector<double>> random_distance_matrix(std::size_t n, i2i::Rng& rng,
                                                               bool symmetric = true) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = symmetric ? i + 1 : 0; j < n; ++j) {
            if (i == j) continue;
            const double v = rng.uniform();
            d[i][j] = v;
            if (symmetric) d[j][i] = v;
        }
    return d;
}

inline std::vector<int> random_samples(std::size_t items, std::size_t n, i2i::Rng& rng) {
    std::vector<int> all(items);
    for (std::size_t i = 0; i < items; ++i) all[i] = static_cast<int>(i);
    i2i::shuffle(all, rng);
    all.resize(n);
    std::sort(all.begin(), all.end());
    return all;
}

// Wraps a distance matrix as a library Distance.
inline i2i::Distance matrix_distance(const std::vector<std::vector<double>>& matrix,
                                     i2i::SimilarityKind kind = i2i::SimilarityKind::jaccard) {
    return i2i::Distance::from_fn(kind, [matrix](i2i::ItemIndex i, i2i::ItemIndex j) {
        return matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    });
}

// Fits a library modality over the full population with the exact all-pairs
// pair mean, mirroring what the oracle computes.
inline i2i::ModalityView fit_view(const std::vector<std::vector<double>>& matrix,
                                  const std::vector<int>& samples) {
    i2i::SampleSet set;
    for (int s : samples) set.items.push_back(s);
    const auto dist = matrix_distance(matrix);
    i2i::FitOptions options;
    options.pair_samples = matrix.size() * matrix.size() + 1;  // force the exact mean
    const auto fit = i2i::fit_modality(dist, set, matrix.size(), options);
    return i2i::ModalityView(fit.modality, dist, matrix.size());
}

inline oracle::Modality oracle_modality(const std::vector<std::vector<double>>& matrix,
                                        const std::vector<int>& samples) {
    return oracle::Modality{matrix, samples};
}

// Clustered implicit-feedback sessions: users mostly stay inside one item
// cluster, with a configurable escape rate. Produces user -> item-id events.
struct ClusteredData {
    std::vector<std::vector<i2i::ItemIndex>> user_items;
    std::size_t item_count = 0;
};

inline ClusteredData clustered_interactions(std::size_t clusters, std::size_t items_per_cluster,
                                            std::size_t users, std::size_t session_len,
                                            double escape_rate, std::uint64_t seed) {
    ClusteredData data;
    data.item_count = clusters * items_per_cluster;
    i2i::Rng rng(seed);
    data.user_items.resize(users);
    for (std::size_t u = 0; u < users; ++u) {
        const std::size_t home = rng.below(clusters);
        std::vector<i2i::ItemIndex> items;
        std::size_t guard = 0;
        while (items.size() < session_len && ++guard < session_len * 60) {
            const bool escape = rng.uniform() < escape_rate;
            const std::size_t cluster = escape ? rng.below(clusters) : home;
            // Mild popularity skew inside the cluster.
            const double r = rng.uniform();
            const auto offset =
                static_cast<std::size_t>(r * r * static_cast<double>(items_per_cluster));
            const auto item = static_cast<i2i::ItemIndex>(
                cluster * items_per_cluster + std::min(offset, items_per_cluster - 1));
            if (std::find(items.begin(), items.end(), item) == items.end())
                items.push_back(item);
        }
        data.user_items[u] = std::move(items);
    }
    return data;
}

// Hub-structured implicit feedback: each topic cluster is glued together by
// a couple of very popular hub items, the remaining items are individually
// sparse, and a slice of every session is uniform cross-topic noise. Rare
// items barely co-occur with each other directly but share their cluster's
// hub profile, which is the regime where anchored global similarity pays
// off over raw pairwise counts.
struct HubParams {
    std::size_t clusters = 10;
    std::size_t hubs_per_cluster = 2;
    std::size_t mids_per_cluster = 598;
    std::size_t users = 2500;
    std::size_t min_session = 15;
    std::size_t max_session = 60;
    double hub_share = 0.08;
    double noise_share = 0.20;
};

inline ClusteredData hub_structured_interactions(const HubParams& p, std::uint64_t seed) {
    ClusteredData data;
    const std::size_t per_cluster = p.hubs_per_cluster + p.mids_per_cluster;
    data.item_count = p.clusters * per_cluster;
    i2i::Rng rng(seed);
    data.user_items.resize(p.users);
    for (auto& items : data.user_items) {
        const std::size_t home = rng.below(p.clusters);
        const double log_len =
            std::log(static_cast<double>(p.min_session)) +
            rng.uniform() * (std::log(static_cast<double>(p.max_session)) -
                             std::log(static_cast<double>(p.min_session)));
        const auto len = static_cast<std::size_t>(std::exp(log_len));
        std::vector<char> seen(data.item_count, 0);
        std::size_t guard = 0;
        while (items.size() < len && ++guard < len * 60) {
            i2i::ItemIndex item;
            const double u = rng.uniform();
            if (u < p.hub_share)
                item = static_cast<i2i::ItemIndex>(home * per_cluster +
                                                   rng.below(p.hubs_per_cluster));
            else if (u < p.hub_share + p.noise_share)
                item = static_cast<i2i::ItemIndex>(rng.below(data.item_count));
            else
                item = static_cast<i2i::ItemIndex>(home * per_cluster + p.hubs_per_cluster +
                                                   rng.below(p.mids_per_cluster));
            if (!seen[static_cast<std::size_t>(item)]) {
                seen[static_cast<std::size_t>(item)] = 1;
                items.push_back(item);
            }
        }
    }
    return data;
}

// Writes events as `user<TAB>item` lines for CLI-level tests.
inline std::string events_text(const ClusteredData& data) {
    std::string text;
    for (std::size_t u = 0; u < data.user_items.size(); ++u)
        for (const auto item : data.user_items[u])
            text += "u" + std::to_string(u) + "\t" + "i" + std::to_string(item) + "\n";
    return text;
}

// Jacobi eigenvalues of a symmetric matrix (row-major, n x n).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-18) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace testutil
