#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fusionlab/numerics.hpp"

namespace fusionlab::evaluation {

using numerics::Matrix;
using numerics::Vec;

double mae(const Vec& pred, const Vec& target);
double rmse(const Vec& pred, const Vec& target);

enum class UserDistance { MeanSquaredDifference, MeanAbsoluteDifference };

std::string to_string(UserDistance d);
UserDistance user_distance_from_string(const std::string& s);

struct PdcConfig {
    std::size_t threshold = 4;  // minimum common rated items per pair
    UserDistance d_u = UserDistance::MeanSquaredDifference;
};

// One user's ratings, sorted by item index, no duplicate items.
struct UserRatings {
    std::vector<std::pair<std::size_t, double>> items;
};

// Groups ratings by user index; throws on a duplicate (user,item) pair.
std::vector<UserRatings> group_ratings(
    const std::vector<std::pair<std::size_t, std::size_t>>& user_item, const Vec& ratings,
    std::size_t n_users);

// Rating-behavior distance over items rated by both users; nullopt when the
// pair shares fewer than `threshold` items.
std::optional<double> user_distance(const UserRatings& a, const UserRatings& b,
                                    std::size_t threshold, UserDistance d);

// Standard Pearson r; throws if either list has zero variance (the
// correlation is undefined, never silently 0).
double pearson(const Vec& a, const Vec& b);

struct PdcResult {
    double score = 0.0;
    std::size_t pair_count = 0;
};

// Pair-Distance Correlation: Pearson correlation between per-pair Euclidean
// embedding distances and per-pair rating-behavior distances, over all
// unordered user pairs sharing at least cfg.threshold rated items.
// Embeddings are rows of `embeddings`; row u is user u's vector.
PdcResult pdc(const Matrix& embeddings, const std::vector<UserRatings>& ratings,
              const PdcConfig& cfg);

struct PdcSweepEntry {
    std::size_t threshold = 0;
    bool available = false;
    double score = 0.0;
    std::size_t pair_count = 0;
    std::string error;  // set when unavailable
};

std::vector<PdcSweepEntry> pdc_sweep(const Matrix& embeddings,
                                     const std::vector<UserRatings>& ratings,
                                     const std::vector<std::size_t>& thresholds,
                                     UserDistance d_u = UserDistance::MeanSquaredDifference);

struct EvalReport {
    std::string kind;
    std::size_t z = 0;
    int fold_id = 0;
    std::uint64_t seed = 0;
    double mae = 0.0;
    double rmse = 0.0;
    std::map<std::size_t, double> pdc;
    std::map<std::size_t, std::size_t> pair_counts;
    std::size_t param_count = 0;
};

}  // namespace fusionlab::evaluation
