#pragma once

#include <string>
#include <vector>

#include "fusionlab/models.hpp"
#include "fusionlab/numerics.hpp"

namespace fusionlab::analysis {

using numerics::Matrix;
using numerics::SeededRng;
using numerics::Vec;

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;  // one per embedding row
    Matrix centroids;                      // k x dim
    double inertia = 0.0;
    std::size_t iterations = 0;
};

// Lloyd's algorithm with distance-weighted (k-means++-style) seeding.
// Deterministic for a fixed rng seed; the objective is non-increasing per
// iteration and the loop stops at an assignment fixpoint or `max_iters`.
Clustering kmeans(const Matrix& embeddings, std::size_t k, SeededRng& rng,
                  std::size_t max_iters = 300);

struct RankedItem {
    std::string name;
    double score = 0.0;
};

struct CentroidProfile {
    std::size_t cluster = 0;
    double bias = 0.0;  // user bias evaluated at the centroid
    std::vector<RankedItem> top_features, bottom_features;  // 5 each
    std::vector<RankedItem> top_movies, bottom_movies;      // 3 each
};

// Reads per-centroid interpretation off a tensor-fusion model: the bias
// term, the 1128-long sensitivity-change vector (top/bottom 5 tags), and
// movie rankings with the centroid substituted for the user embedding
// (top/bottom 3). Movie score ties break lexicographically by title.
CentroidProfile centroid_profile(const models::Model& model, const Vec& centroid,
                                 const Matrix& item_features,
                                 const std::vector<std::string>& tag_names,
                                 const std::vector<std::string>& titles,
                                 std::size_t n_features_top = 5, std::size_t n_movies_top = 3);

// Seeded sample of `count` distinct cluster ids without replacement.
std::vector<std::size_t> sample_clusters(const Clustering& clustering, std::size_t count,
                                         SeededRng& rng);

}  // namespace fusionlab::analysis
