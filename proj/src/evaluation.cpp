#include "fusionlab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusionlab::evaluation {

double mae(const Vec& pred, const Vec& target) {
    if (pred.empty() || pred.size() != target.size()) {
        throw std::invalid_argument("mae: lists must be nonempty and of equal length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += std::fabs(pred[i] - target[i]);
    return acc / static_cast<double>(pred.size());
}

double rmse(const Vec& pred, const Vec& target) {
    if (pred.empty() || pred.size() != target.size()) {
        throw std::invalid_argument("rmse: lists must be nonempty and of equal length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

std::string to_string(UserDistance d) {
    return d == UserDistance::MeanSquaredDifference ? "mean_squared_difference"
                                                    : "mean_absolute_difference";
}

UserDistance user_distance_from_string(const std::string& s) {
    if (s == "mean_squared_difference") return UserDistance::MeanSquaredDifference;
    if (s == "mean_absolute_difference") return UserDistance::MeanAbsoluteDifference;
    throw std::invalid_argument("unknown user distance: " + s);
}

std::vector<UserRatings> group_ratings(
    const std::vector<std::pair<std::size_t, std::size_t>>& user_item, const Vec& ratings,
    std::size_t n_users) {
    if (user_item.size() != ratings.size()) {
        throw std::invalid_argument("group_ratings: index/rating length mismatch");
    }
    std::vector<UserRatings> out(n_users);
    for (std::size_t k = 0; k < user_item.size(); ++k) {
        const auto [u, item] = user_item[k];
        if (u >= n_users) throw std::out_of_range("group_ratings: user index out of range");
        out[u].items.emplace_back(item, ratings[k]);
    }
    for (std::size_t u = 0; u < n_users; ++u) {
        auto& items = out[u].items;
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < items.size(); ++i) {
            if (items[i].first == items[i - 1].first) {
                throw std::runtime_error("duplicate rating for user " + std::to_string(u) +
                                         ", item " + std::to_string(items[i].first));
            }
        }
    }
    return out;
}

std::optional<double> user_distance(const UserRatings& a, const UserRatings& b,
                                    std::size_t threshold, UserDistance d) {
    std::size_t i = 0, j = 0, common = 0;
    double acc = 0.0;
    while (i < a.items.size() && j < b.items.size()) {
        if (a.items[i].first < b.items[j].first) {
            ++i;
        } else if (b.items[j].first < a.items[i].first) {
            ++j;
        } else {
            const double diff = a.items[i].second - b.items[j].second;
            acc += (d == UserDistance::MeanSquaredDifference) ? diff * diff : std::fabs(diff);
            ++common;
            ++i;
            ++j;
        }
    }
    if (common < threshold) return std::nullopt;
    return acc / static_cast<double>(common);
}

double pearson(const Vec& a, const Vec& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("pearson: lists must have equal length >= 2");
    }
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) {
        throw std::runtime_error("pearson: zero variance, correlation undefined");
    }
    return cov / std::sqrt(va * vb);
}

PdcResult pdc(const Matrix& embeddings, const std::vector<UserRatings>& ratings,
              const PdcConfig& cfg) {
    if (cfg.threshold < 1) throw std::invalid_argument("pdc: threshold must be >= 1");
    if (embeddings.rows < ratings.size()) {
        throw std::invalid_argument("pdc: embeddings missing rows for some users");
    }
    Vec l_e, l_u;
    const std::size_t n = ratings.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (ratings[i].items.empty()) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto du = user_distance(ratings[i], ratings[j], cfg.threshold, cfg.d_u);
            if (!du) continue;
            const double* ei = embeddings.row(i);
            const double* ej = embeddings.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < embeddings.cols; ++k) {
                const double diff = ei[k] - ej[k];
                acc += diff * diff;
            }
            l_u.push_back(*du);
            l_e.push_back(std::sqrt(acc));
        }
    }
    if (l_e.size() < 2) {
        throw std::runtime_error("pdc: fewer than 2 qualifying user pairs at threshold " +
                                 std::to_string(cfg.threshold) + "; threshold too high");
    }
    PdcResult result;
    result.pair_count = l_e.size();
    result.score = pearson(l_e, l_u);
    return result;
}

std::vector<PdcSweepEntry> pdc_sweep(const Matrix& embeddings,
                                     const std::vector<UserRatings>& ratings,
                                     const std::vector<std::size_t>& thresholds,
                                     UserDistance d_u) {
    if (thresholds.empty()) throw std::invalid_argument("pdc_sweep: no thresholds given");
    std::vector<PdcSweepEntry> out;
    for (std::size_t t : thresholds) {
        PdcSweepEntry entry;
        entry.threshold = t;
        try {
            const PdcResult r = pdc(embeddings, ratings, PdcConfig{t, d_u});
            entry.available = true;
            entry.score = r.score;
            entry.pair_count = r.pair_count;
        } catch (const std::exception& e) {
            entry.available = false;
            entry.error = e.what();
        }
        out.push_back(entry);
    }
    return out;
}

}  // namespace fusionlab::evaluation
