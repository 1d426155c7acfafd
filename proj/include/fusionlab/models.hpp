#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fusionlab/numerics.hpp"

namespace fusionlab::models {

using numerics::Matrix;
using numerics::SeededRng;
using numerics::Vec;

enum class ModelKind {
    UserBias,
    Linear,
    AdditiveMask,
    MultiplicativeMask,
    TensorFusion,
    FactorizationMachine,
};

enum class Activation { Relu, Tanh, Identity };

std::string to_string(ModelKind kind);
ModelKind kind_from_string(const std::string& s);
std::string to_string(Activation act);
Activation activation_from_string(const std::string& s);

bool is_fusion_kind(ModelKind kind);

struct ModelDims {
    std::size_t n_features = 0;
    std::size_t n_users = 0;
    std::size_t z = 0;  // embedding size; 0 for baselines
};

// All gradient-trained parameters live in a single flat vector with a fixed
// per-kind layout (see layout() accessors below). This keeps the optimizer,
// the finite-difference oracle and serialization trivial.
//
// Layouts:
//   UserBias:            (empty)
//   Linear:              w[n], b
//   Additive/Mul mask:   W1[z*n], b1[z], E[users*z], w2[z], b2
//   TensorFusion:        W[n], b, T[z*n], E[users*z], u_b[z]
//   FM (n' = n+users):   b, W[n'], V[n'*z]
struct Model {
    ModelKind kind = ModelKind::UserBias;
    ModelDims dims;
    Activation act = Activation::Relu;
    std::uint64_t seed = 0;

    Vec theta;

    // Baselines only: per-user training means, not touched by the optimizer.
    Vec user_mean;
    double global_mean = 0.0;
};

// Offsets of the named parameter blocks inside Model::theta.
struct ThetaLayout {
    std::size_t embedding_begin = 0;  // start of the E block (user rows),
    std::size_t embedding_end = 0;    //   or the user part of V/W for FM
    std::size_t size = 0;
};
ThetaLayout layout(const Model& m);

// Number of gradient-trained parameters for the fusion kinds and FM
// (matches the published architecture sizes exactly); baselines report the
// number of stored values (943 user means + 1 global for user-bias, plus
// w and b for linear).
std::size_t param_count(ModelKind kind, std::size_t z,
                        std::size_t n_features = 1128, std::size_t n_users = 943);

Model init_model(ModelKind kind, std::size_t z, const ModelDims& dims, SeededRng& rng,
                 Activation act = Activation::Relu);

double forward(const Model& m, const Vec& x, std::size_t u);

// Tensor-fusion prediction split into its three additive components:
// item-only score, user bias, and the user-feature interaction.
struct TensorParts {
    double y_x = 0.0;
    double y_u = 0.0;
    double y_h = 0.0;
    double total() const { return y_x + y_u + y_h; }
};
TensorParts tensor_forward_parts(const Model& m, const Vec& x, std::size_t u);

struct Example {
    std::size_t user = 0;
    std::size_t item = 0;  // row into the feature matrix
    double rating = 0.0;
};

// Gradient of mean squared error over the batch w.r.t. theta (same layout).
// Only embedding rows of users present in the batch receive nonzero gradient.
Vec gradients(const Model& m, const Matrix& features, const std::vector<Example>& batch);

double mse_loss(const Model& m, const Matrix& features, const std::vector<Example>& batch);

// The extracted user representation: E[u] for mask/tensor, the user's V row
// with the user bias appended for FM, [user_mean[u]] for baselines.
Vec embedding_of(const Model& m, std::size_t u);

std::size_t embedding_dim(const Model& m);

// Full-double-sum FM variant over an explicit input of length n_features+n_users:
// b + W.x + (xV)(V^T x), diagonal included.
double fm_t_forward(const Model& m, const Vec& x);

// d(prediction)/d(input features).
// TensorFusion / Linear: exact and input-independent; pass no x.
// Mask models: input-dependent; x is required.
Vec sensitivity(const Model& m, std::size_t u, const Vec* x = nullptr);

// User-dependent part of the tensor model's sensitivity: e(u) contracted
// against the interaction tensor (length n_features).
Vec tensor_sensitivity_change(const Model& m, const Vec& embedding);

// Tensor-fusion prediction with an arbitrary embedding substituted for the
// user row (used for centroid interpretation).
double tensor_score_with_embedding(const Model& m, const Vec& x, const Vec& embedding);

// The z weights mapping a tensor-fusion embedding to its user bias.
Vec tensor_user_bias_weights(const Model& m);

void save_model(const Model& m, std::ostream& out, const std::string& dataset_hash);
Model load_model(std::istream& in, std::string* dataset_hash = nullptr);
void save_model_file(const Model& m, const std::string& path, const std::string& dataset_hash);
Model load_model_file(const std::string& path, std::string* dataset_hash = nullptr);

}  // namespace fusionlab::models
