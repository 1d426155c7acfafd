#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fusionlab/models.hpp"
#include "fusionlab/numerics.hpp"

namespace fusionlab::training {

using models::Example;
using models::Model;
using numerics::Matrix;
using numerics::Vec;

enum class Optimizer { Sgd, Adam };

std::string to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& s);

struct HyperParams {
    double learning_rate = 1e-3;
    std::size_t epochs = 10;
    std::size_t batch_size = 64;
    double l2_weights = 0.0;     // FM linear weights
    double l2_embeddings = 0.0;  // FM factor matrix
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::Sgd;
    models::Activation activation = models::Activation::Relu;
    bool l2_on_neural = false;  // off by default; L2 is an FM knob
};

struct TrainTrace {
    Vec epoch_loss;  // mean minibatch MSE per epoch
    double wall_seconds = 0.0;
    std::uint64_t final_model_hash = 0;
};

// Minibatch gradient descent on MSE (+ L2 for FM). Deterministic given the
// model's initial parameters and hp.seed; the per-epoch shuffle depends on
// (hp.seed, epoch) only. Throws when the loss goes non-finite, naming the
// epoch and learning rate.
TrainTrace train(Model& model, const std::vector<Example>& train_set, const Matrix& features,
                 const HyperParams& hp);

// FNV-1a over the parameter bytes; used for trace/reporting only.
std::uint64_t hash_model(const Model& model);

struct GridEntry {
    HyperParams hp;
    bool diverged = false;
    double validation_rmse = 0.0;
};

struct GridResult {
    std::vector<GridEntry> entries;
    std::size_t best_index = 0;
};

// Trains (kind, z) from a fresh seeded init for each grid point on
// tune_train and scores RMSE on tune_test. Ties break toward lower learning
// rate, then fewer epochs. Divergent points are kept in the result, marked.
GridResult grid_search(models::ModelKind kind, std::size_t z, const models::ModelDims& dims,
                       const std::vector<HyperParams>& grid,
                       const std::vector<Example>& tune_train,
                       const std::vector<Example>& tune_test, const Matrix& features);

// Fills user_mean / global_mean of a baseline model from training ratings.
void fit_user_means(Model& model, const std::vector<Example>& train_set);

}  // namespace fusionlab::training
