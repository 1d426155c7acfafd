#include "fusionlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fusionlab::analysis {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

}  // namespace

Clustering kmeans(const Matrix& embeddings, std::size_t k, SeededRng& rng,
                  std::size_t max_iters) {
    const std::size_t n = embeddings.rows;
    const std::size_t dim = embeddings.cols;
    if (k == 0) throw std::invalid_argument("kmeans: k must be positive");

    // k must not exceed the number of distinct vectors
    {
        std::vector<Vec> distinct;
        for (std::size_t i = 0; i < n && distinct.size() <= k; ++i) {
            const Vec row = embeddings.row_vec(i);
            if (std::find(distinct.begin(), distinct.end(), row) == distinct.end()) {
                distinct.push_back(row);
            }
        }
        if (distinct.size() < k) {
            throw std::invalid_argument("kmeans: k=" + std::to_string(k) +
                                        " exceeds the number of distinct vectors (" +
                                        std::to_string(distinct.size()) + ")");
        }
    }

    Clustering result;
    result.k = k;
    result.centroids = Matrix(k, dim);

    // distance-weighted seeding
    std::vector<std::size_t> seeds;
    seeds.push_back(static_cast<std::size_t>(rng.next_u64() % n));
    Vec min_d2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        min_d2[i] = sq_dist(embeddings.row(i), embeddings.row(seeds[0]), dim);
    }
    while (seeds.size() < k) {
        const double total = std::accumulate(min_d2.begin(), min_d2.end(), 0.0);
        std::size_t chosen = 0;
        if (total > 0.0) {
            const double target = rng.uniform(0.0, total);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (acc > target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            // all remaining points coincide with a seed; pick any non-seed
            for (std::size_t i = 0; i < n; ++i) {
                if (std::find(seeds.begin(), seeds.end(), i) == seeds.end()) {
                    chosen = i;
                    break;
                }
            }
        }
        seeds.push_back(chosen);
        for (std::size_t i = 0; i < n; ++i) {
            min_d2[i] = std::min(min_d2[i], sq_dist(embeddings.row(i), embeddings.row(chosen), dim));
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        const double* src = embeddings.row(seeds[c]);
        std::copy(src, src + dim, result.centroids.row(c));
    }

    result.assignments.assign(n, 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(embeddings.row(i), result.centroids.row(c), dim);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (result.assignments[i] != best) {
                result.assignments[i] = best;
                changed = true;
            }
        }
        result.iterations = iter + 1;

        // update step
        Matrix sums(k, dim);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = result.assignments[i];
            const double* row = embeddings.row(i);
            for (std::size_t d = 0; d < dim; ++d) sums.at(c, d) += row[d];
            counts[c] += 1;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // empty-cluster repair: steal the point farthest from its centroid
                std::size_t farthest = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t a = result.assignments[i];
                    if (counts[a] <= 1) continue;
                    const double d = sq_dist(embeddings.row(i), result.centroids.row(a), dim);
                    if (d > far_d) {
                        far_d = d;
                        farthest = i;
                    }
                }
                const std::size_t old = result.assignments[farthest];
                const double* row = embeddings.row(farthest);
                for (std::size_t d = 0; d < dim; ++d) {
                    sums.at(old, d) -= row[d];
                    sums.at(c, d) += row[d];
                }
                counts[old] -= 1;
                counts[c] = 1;
                result.assignments[farthest] = c;
                changed = true;
            }
            for (std::size_t d = 0; d < dim; ++d) {
                result.centroids.at(c, d) = sums.at(c, d) / static_cast<double>(counts[c]);
            }
        }
        if (!changed) break;
    }

    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        result.inertia +=
            sq_dist(embeddings.row(i), result.centroids.row(result.assignments[i]), dim);
    }
    return result;
}

CentroidProfile centroid_profile(const models::Model& model, const Vec& centroid,
                                 const Matrix& item_features,
                                 const std::vector<std::string>& tag_names,
                                 const std::vector<std::string>& titles,
                                 std::size_t n_features_top, std::size_t n_movies_top) {
    if (model.kind != models::ModelKind::TensorFusion) {
        throw std::invalid_argument(
            "centroid profiles are defined for tensor-fusion models only; use the generic "
            "sensitivity operation for other kinds");
    }
    if (item_features.rows != titles.size()) {
        throw std::invalid_argument("centroid_profile: feature rows / title count mismatch");
    }
    CentroidProfile profile;
    profile.bias = numerics::dot(models::tensor_user_bias_weights(model), centroid);

    const Vec change = models::tensor_sensitivity_change(model, centroid);
    if (change.size() != tag_names.size()) {
        throw std::invalid_argument("centroid_profile: tag name count mismatch");
    }
    std::vector<std::size_t> tag_order(change.size());
    std::iota(tag_order.begin(), tag_order.end(), 0);
    std::sort(tag_order.begin(), tag_order.end(), [&](std::size_t a, std::size_t b) {
        if (change[a] != change[b]) return change[a] > change[b];
        return tag_names[a] < tag_names[b];
    });
    const std::size_t nf = std::min(n_features_top, tag_order.size());
    for (std::size_t i = 0; i < nf; ++i) {
        profile.top_features.push_back({tag_names[tag_order[i]], change[tag_order[i]]});
        const std::size_t j = tag_order[tag_order.size() - 1 - i];
        profile.bottom_features.push_back({tag_names[j], change[j]});
    }

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(item_features.rows);
    for (std::size_t i = 0; i < item_features.rows; ++i) {
        scored.emplace_back(
            models::tensor_score_with_embedding(model, item_features.row_vec(i), centroid), i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return titles[a.second] < titles[b.second];
    });
    const std::size_t nm = std::min(n_movies_top, scored.size());
    for (std::size_t i = 0; i < nm; ++i) {
        profile.top_movies.push_back({titles[scored[i].second], scored[i].first});
        const auto& [score, idx] = scored[scored.size() - 1 - i];
        profile.bottom_movies.push_back({titles[idx], score});
    }
    return profile;
}

std::vector<std::size_t> sample_clusters(const Clustering& clustering, std::size_t count,
                                         SeededRng& rng) {
    if (count > clustering.k) {
        throw std::invalid_argument("sample_clusters: count " + std::to_string(count) +
                                    " exceeds cluster count " + std::to_string(clustering.k));
    }
    std::vector<std::size_t> ids(clustering.k);
    std::iota(ids.begin(), ids.end(), 0);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    return ids;
}

}  // namespace fusionlab::analysis
