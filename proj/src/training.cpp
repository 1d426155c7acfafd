#include "fusionlab/training.hpp"

#include "fusionlab/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace fusionlab::training {

std::string to_string(Optimizer opt) {
    return opt == Optimizer::Sgd ? "sgd" : "adam";
}

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    throw std::invalid_argument("unknown optimizer: " + s);
}

void fit_user_means(Model& model, const std::vector<Example>& train_set) {
    const std::size_t users = model.dims.n_users;
    Vec sums(users, 0.0);
    std::vector<std::size_t> counts(users, 0);
    double total = 0.0;
    for (const Example& ex : train_set) {
        sums[ex.user] += ex.rating;
        counts[ex.user] += 1;
        total += ex.rating;
    }
    model.global_mean = train_set.empty() ? 0.0 : total / static_cast<double>(train_set.size());
    model.user_mean.assign(users, model.global_mean);
    for (std::size_t u = 0; u < users; ++u) {
        if (counts[u] > 0) model.user_mean[u] = sums[u] / static_cast<double>(counts[u]);
    }
}

std::uint64_t hash_model(const Model& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const double* data, std::size_t count) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < count * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    feed(model.theta.data(), model.theta.size());
    feed(model.user_mean.data(), model.user_mean.size());
    feed(&model.global_mean, 1);
    return h;
}

TrainTrace train(Model& model, const std::vector<Example>& train_set, const Matrix& features,
                 const HyperParams& hp) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    if (hp.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be > 0");
    if (hp.epochs < 1 || hp.batch_size < 1) {
        throw std::invalid_argument("train: epochs and batch_size must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();

    // Baselines need means before any gradient step; for user-bias that is
    // the whole fit.
    if (model.kind == models::ModelKind::UserBias || model.kind == models::ModelKind::Linear) {
        fit_user_means(model, train_set);
    }

    const bool apply_l2 =
        (model.kind == models::ModelKind::FactorizationMachine || hp.l2_on_neural) &&
        (hp.l2_weights > 0.0 || hp.l2_embeddings > 0.0);
    const models::ThetaLayout lay = models::layout(model);

    Vec adam_m, adam_v;
    if (hp.optimizer == Optimizer::Adam) {
        adam_m.assign(model.theta.size(), 0.0);
        adam_v.assign(model.theta.size(), 0.0);
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    std::size_t adam_t = 0;

    TrainTrace trace;
    trace.epoch_loss.reserve(hp.epochs);
    std::vector<Example> batch;
    batch.reserve(hp.batch_size);

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        numerics::SeededRng shuffle_rng(numerics::mix_seed(hp.seed, epoch));
        const std::vector<std::size_t> order = shuffle_rng.permutation(train_set.size());

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
            batch.clear();
            const std::size_t end = std::min(start + hp.batch_size, order.size());
            for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);

            const double loss = models::mse_loss(model, features, batch);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                                         " (learning_rate=" + std::to_string(hp.learning_rate) +
                                         ")");
            }
            epoch_loss += loss;
            ++n_batches;
            if (model.theta.empty()) continue;  // user-bias: nothing to update

            Vec grad = models::gradients(model, features, batch);
            if (apply_l2) {
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    const bool emb = i >= lay.embedding_begin && i < lay.embedding_end;
                    const double lambda = emb ? hp.l2_embeddings : hp.l2_weights;
                    if (lambda > 0.0) grad[i] += 2.0 * lambda * model.theta[i];
                }
            }
            if (hp.optimizer == Optimizer::Sgd) {
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    model.theta[i] -= hp.learning_rate * grad[i];
                }
            } else {
                ++adam_t;
                const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
                const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    adam_m[i] = kBeta1 * adam_m[i] + (1.0 - kBeta1) * grad[i];
                    adam_v[i] = kBeta2 * adam_v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                    model.theta[i] -= hp.learning_rate * (adam_m[i] / bc1) /
                                      (std::sqrt(adam_v[i] / bc2) + kEps);
                }
            }
        }
        trace.epoch_loss.push_back(epoch_loss / static_cast<double>(n_batches));
    }

    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.final_model_hash = hash_model(model);
    return trace;
}

GridResult grid_search(models::ModelKind kind, std::size_t z, const models::ModelDims& dims,
                       const std::vector<HyperParams>& grid,
                       const std::vector<Example>& tune_train,
                       const std::vector<Example>& tune_test, const Matrix& features) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    GridResult result;
    bool have_best = false;
    for (const HyperParams& hp : grid) {
        GridEntry entry;
        entry.hp = hp;
        numerics::SeededRng init_rng(hp.seed);
        Model model = models::init_model(kind, z, dims, init_rng, hp.activation);
        try {
            train(model, tune_train, features, hp);
            Vec pred, target;
            pred.reserve(tune_test.size());
            target.reserve(tune_test.size());
            for (const Example& ex : tune_test) {
                pred.push_back(models::forward(model, features.row_vec(ex.item), ex.user));
                target.push_back(ex.rating);
            }
            entry.validation_rmse = evaluation::rmse(pred, target);
        } catch (const std::exception&) {
            entry.diverged = true;
        }
        result.entries.push_back(entry);

        if (!entry.diverged) {
            if (!have_best) {
                result.best_index = result.entries.size() - 1;
                have_best = true;
            } else {
                const GridEntry& best = result.entries[result.best_index];
                const GridEntry& cur = entry;
                const bool better =
                    cur.validation_rmse < best.validation_rmse ||
                    (cur.validation_rmse == best.validation_rmse &&
                     (cur.hp.learning_rate < best.hp.learning_rate ||
                      (cur.hp.learning_rate == best.hp.learning_rate &&
                       cur.hp.epochs < best.hp.epochs)));
                if (better) result.best_index = result.entries.size() - 1;
            }
        }
    }
    if (!have_best) throw std::runtime_error("grid_search: every grid point diverged");
    return result;
}

}  // namespace fusionlab::training
