#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fusionlab/models.hpp"
#include "support/oracles.hpp"

using namespace fusionlab;
using namespace fusionlab::models;
using fusionlab::numerics::Matrix;
using fusionlab::numerics::SeededRng;
using fusionlab::numerics::Vec;

namespace {

ModelDims dims_of(std::size_t n, std::size_t users) {
    ModelDims d;
    d.n_features = n;
    d.n_users = users;
    return d;
}

Matrix random_features(SeededRng& rng, std::size_t items, std::size_t n) {
    Matrix f(items, n);
    f.v = rng.sample_uniform(0.0, 1.0, items * n);
    return f;
}

}  // namespace

TEST_CASE("param_count matches the published architecture sizes") {
    CHECK(param_count(ModelKind::AdditiveMask, 4) == 8293);
    CHECK(param_count(ModelKind::MultiplicativeMask, 4) == 8293);
    CHECK(param_count(ModelKind::TensorFusion, 2) == 5273);
    CHECK(param_count(ModelKind::TensorFusion, 64) == 133737);
    CHECK(param_count(ModelKind::FactorizationMachine, 8) == 18640);
    CHECK(param_count(ModelKind::FactorizationMachine, 64) == 134616);
}

TEST_CASE("init_model is seed-deterministic and validates z") {
    const ModelDims d = dims_of(10, 5);
    for (ModelKind kind : {ModelKind::AdditiveMask, ModelKind::MultiplicativeMask,
                           ModelKind::TensorFusion, ModelKind::FactorizationMachine}) {
        SeededRng a(42), b(42);
        const Model ma = init_model(kind, 4, d, a);
        const Model mb = init_model(kind, 4, d, b);
        CHECK(ma.theta == mb.theta);
        CHECK(ma.theta.size() == layout(ma).size);
        SeededRng c(1);
        CHECK_THROWS_AS(init_model(kind, 0, d, c), std::invalid_argument);
    }
}

TEST_CASE("theta size equals param_count for fusion kinds") {
    const ModelDims d = dims_of(1128, 943);
    SeededRng rng(7);
    for (ModelKind kind : {ModelKind::AdditiveMask, ModelKind::MultiplicativeMask,
                           ModelKind::TensorFusion, ModelKind::FactorizationMachine}) {
        for (std::size_t z : {2, 8}) {
            const Model m = init_model(kind, z, d, rng);
            CHECK(m.theta.size() == param_count(kind, z));
        }
    }
}

TEST_CASE("multiplicative-mask embeddings initialize near one") {
    const ModelDims d = dims_of(12, 40);
    double mean = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SeededRng rng(seed);
        const Model m = init_model(ModelKind::MultiplicativeMask, 8, d, rng);
        for (std::size_t u = 0; u < d.n_users; ++u) {
            for (double e : embedding_of(m, u)) {
                mean += e;
                ++count;
            }
        }
    }
    mean /= static_cast<double>(count);
    CHECK(std::fabs(mean - 1.0) < 0.05);
}

TEST_CASE("tensor fusion reduces to the context-free layer when T and u_b vanish") {
    const ModelDims d = dims_of(6, 3);
    SeededRng rng(5);
    Model m = init_model(ModelKind::TensorFusion, 2, d, rng);
    // zero the interaction tensor and the user-bias weights: theta layout is
    // W[n], b, T[z*n], E, u_b[z]
    for (std::size_t i = d.n_features + 1; i < d.n_features + 1 + 2 * d.n_features; ++i) {
        m.theta[i] = 0.0;
    }
    for (std::size_t i = m.theta.size() - 2; i < m.theta.size(); ++i) m.theta[i] = 0.0;

    const Vec x = rng.sample_uniform(0.0, 1.0, 6);
    double expected = m.theta[d.n_features];  // b
    for (std::size_t j = 0; j < 6; ++j) expected += m.theta[j] * x[j];
    for (std::size_t u = 0; u < 3; ++u) {
        CHECK(forward(m, x, u) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("multiplicative mask at all-ones embedding equals the plain network") {
    const ModelDims d = dims_of(7, 4);
    SeededRng rng(11);
    Model mul = init_model(ModelKind::MultiplicativeMask, 3, d, rng);
    Model add = mul;
    add.kind = ModelKind::AdditiveMask;
    const ThetaLayout lay = layout(mul);
    for (std::size_t i = lay.embedding_begin; i < lay.embedding_end; ++i) {
        mul.theta[i] = 1.0;  // identity mask
        add.theta[i] = 0.0;  // no mask
    }
    const Vec x = rng.sample_uniform(-1.0, 1.0, 7);
    for (std::size_t u = 0; u < 4; ++u) {
        CHECK(forward(mul, x, u) == doctest::Approx(forward(add, x, u)).epsilon(1e-14));
    }
}

TEST_CASE("tensor fusion hand evaluation, n=2 z=1") {
    const ModelDims d = dims_of(2, 1);
    SeededRng rng(1);
    Model m = init_model(ModelKind::TensorFusion, 1, d, rng);
    // W=[1,0], b=0, T=[[0,1]], E[0]=[3], u_b=[2]
    m.theta = {1, 0, /*b*/ 0, /*T*/ 0, 1, /*E*/ 3, /*u_b*/ 2};
    const double y = forward(m, {1, 1}, 0);
    CHECK(y == doctest::Approx(10.0).epsilon(1e-15));  // 1 + 3*1 + 2*3

    const TensorParts parts = tensor_forward_parts(m, {1, 1}, 0);
    CHECK(parts.y_x == doctest::Approx(1.0));
    CHECK(parts.y_h == doctest::Approx(3.0));
    CHECK(parts.y_u == doctest::Approx(6.0));
}

TEST_CASE("tensor decomposition components sum to the prediction") {
    const ModelDims d = dims_of(9, 6);
    SeededRng rng(21);
    const Model m = init_model(ModelKind::TensorFusion, 4, d, rng);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec x = rng.sample_uniform(-1.0, 1.0, 9);
        const std::size_t u = trial % 6;
        const TensorParts parts = tensor_forward_parts(m, x, u);
        CHECK(std::fabs(parts.total() - forward(m, x, u)) < 1e-12);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    SeededRng rng(2024);
    const ModelDims d = dims_of(5, 4);
    const Matrix feats = random_features(rng, 6, 5);
    for (ModelKind kind : {ModelKind::Linear, ModelKind::AdditiveMask,
                           ModelKind::MultiplicativeMask, ModelKind::TensorFusion,
                           ModelKind::FactorizationMachine}) {
        for (std::size_t z : {1, 2, 4}) {
            for (Activation act : {Activation::Tanh, Activation::Identity}) {
                SeededRng init(rng.next_u64());
                Model m = init_model(kind, z, d, init, act);
                if (!m.user_mean.empty()) m.user_mean.assign(d.n_users, 3.0);
                std::vector<Example> batch;
                for (int i = 0; i < 4; ++i) {
                    batch.push_back({static_cast<std::size_t>(i % 4),
                                     static_cast<std::size_t>(i % 6),
                                     1.0 + (i % 5)});
                }
                const Vec analytic = gradients(m, feats, batch);
                const Vec numeric =
                    test_support::finite_difference_gradient(m, feats, batch, 1e-5);
                REQUIRE(analytic.size() == numeric.size());
                for (std::size_t i = 0; i < analytic.size(); ++i) {
                    const double scale =
                        std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-8});
                    CHECK(std::fabs(analytic[i] - numeric[i]) / scale < 1e-4);
                }
            }
        }
    }
}

TEST_CASE("gradient is zero at an exact fit") {
    const ModelDims d = dims_of(3, 2);
    SeededRng rng(8);
    Model m = init_model(ModelKind::TensorFusion, 2, d, rng);
    const Matrix feats = random_features(rng, 2, 3);
    const double target = forward(m, feats.row_vec(0), 1);
    const std::vector<Example> batch{{1, 0, target}};
    for (double g : gradients(m, feats, batch)) CHECK(g == 0.0);
}

TEST_CASE("embedding rows of users outside the batch get zero gradient") {
    const ModelDims d = dims_of(4, 5);
    SeededRng rng(13);
    for (ModelKind kind : {ModelKind::AdditiveMask, ModelKind::MultiplicativeMask,
                           ModelKind::TensorFusion, ModelKind::FactorizationMachine}) {
        Model m = init_model(kind, 2, d, rng, Activation::Tanh);
        const Matrix feats = random_features(rng, 3, 4);
        const std::vector<Example> batch{{1, 0, 4.0}, {3, 2, 2.0}};
        const Vec grad = gradients(m, feats, batch);
        const ThetaLayout lay = layout(m);
        const std::size_t z = 2;
        for (std::size_t u : {std::size_t{0}, std::size_t{2}, std::size_t{4}}) {
            // user u's row: inside E for mask/tensor; inside the user part of
            // V (rows after the n_features item rows) for FM
            const std::size_t row = lay.embedding_begin +
                                    (kind == ModelKind::FactorizationMachine
                                         ? (d.n_features + u) * z
                                         : u * z);
            for (std::size_t k = 0; k < z; ++k) CHECK(grad[row + k] == 0.0);
            if (kind == ModelKind::FactorizationMachine) {
                CHECK(grad[1 + d.n_features + u] == 0.0);  // user's W entry
            }
        }
    }
}

TEST_CASE("additive mask equals a single linear layer on the concatenation") {
    // y = W [x;e] = W1 x + W2 e with W2 columns holding the embedding table:
    // build both sides from the same numbers
    const std::size_t n = 6, users = 3, z = 4;
    const ModelDims d = dims_of(n, users);
    SeededRng rng(77);
    Model m = init_model(ModelKind::AdditiveMask, z, d, rng, Activation::Identity);

    const Vec x = rng.sample_uniform(-1.0, 1.0, n);
    for (std::size_t u = 0; u < users; ++u) {
        // single layer over [x ; onehot(u)] with weights [W1 | E columns]
        Matrix big(z, n + users);
        for (std::size_t i = 0; i < z; ++i) {
            for (std::size_t j = 0; j < n; ++j) big.at(i, j) = m.theta[i * n + j];
            for (std::size_t v = 0; v < users; ++v) {
                // E row v, coordinate i  (theta layout: W1, b1, E, w2, b2)
                big.at(i, n + v) = m.theta[z * n + z + v * z + i];
            }
        }
        Vec concat(x);
        for (std::size_t v = 0; v < users; ++v) concat.push_back(v == u ? 1.0 : 0.0);
        const Vec hidden = numerics::matvec(big, concat);

        double expected = m.theta[layout(m).size - 1];  // b2
        for (std::size_t i = 0; i < z; ++i) {
            const double b1 = m.theta[z * n + i];
            const double w2 = m.theta[z * n + z + users * z + i];
            expected += w2 * (hidden[i] + b1);
        }
        CHECK(std::fabs(forward(m, x, u) - expected) < 1e-12);
    }
}

TEST_CASE("fm_t identities against the brute-force double loop") {
    const std::size_t n = 4, users = 3, z = 2;
    const ModelDims d = dims_of(n, users);
    SeededRng rng(31);
    const Model m = init_model(ModelKind::FactorizationMachine, z, d, rng);
    const std::size_t n_total = n + users;

    Matrix v(n_total, z);
    for (std::size_t i = 0; i < n_total; ++i) {
        for (std::size_t f = 0; f < z; ++f) v.at(i, f) = m.theta[1 + n_total + i * z + f];
    }

    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t u = trial % users;
        const Vec feats = rng.sample_uniform(-1.0, 1.0, n);
        Vec full(feats);
        for (std::size_t k = 0; k < users; ++k) full.push_back(k == u ? 1.0 : 0.0);

        double linear = m.theta[0];
        for (std::size_t i = 0; i < n_total; ++i) linear += m.theta[1 + i] * full[i];

        // forward uses the O(nz) identity; check against the i<j double loop
        const double fm = forward(m, feats, u);
        CHECK(std::fabs(fm - (linear + test_support::brute_force_fm_pairwise(v, full))) < 1e-10);

        // full-double-sum variant vs its own brute force
        const double fmt = fm_t_forward(m, full);
        CHECK(std::fabs(fmt - (linear + test_support::brute_force_fm_full(v, full))) < 1e-10);

        // fm_t - linear = 2 (fm - linear) + sum_i x_i^2 ||V_i||^2
        double diag = 0.0;
        for (std::size_t i = 0; i < n_total; ++i) {
            double norm2 = 0.0;
            for (std::size_t f = 0; f < z; ++f) norm2 += v.at(i, f) * v.at(i, f);
            diag += full[i] * full[i] * norm2;
        }
        CHECK(std::fabs((fmt - linear) - (2.0 * (fm - linear) + diag)) < 1e-10);

        // precomputed V V^T route vs the (xV)(V^T x) route
        Matrix vvt(n_total, n_total);
        for (std::size_t i = 0; i < n_total; ++i) {
            for (std::size_t j = 0; j < n_total; ++j) {
                double acc = 0.0;
                for (std::size_t f = 0; f < z; ++f) acc += v.at(i, f) * v.at(j, f);
                vvt.at(i, j) = acc;
            }
        }
        double xtx = 0.0;
        const Vec mx = numerics::matvec(vvt, full);
        for (std::size_t i = 0; i < n_total; ++i) xtx += full[i] * mx[i];
        CHECK(std::fabs(fmt - (linear + xtx)) < 1e-10);
    }
}

TEST_CASE("embedding_of shapes and values") {
    const ModelDims d = dims_of(5, 4);
    SeededRng rng(3);
    const Model fm = init_model(ModelKind::FactorizationMachine, 2, d, rng);
    CHECK(embedding_of(fm, 1).size() == 3);  // z + user bias
    CHECK(embedding_dim(fm) == 3);

    const Model add = init_model(ModelKind::AdditiveMask, 8, d, rng);
    CHECK(embedding_of(add, 2).size() == 8);

    SeededRng r1(5), r2(5);
    const Model a = init_model(ModelKind::TensorFusion, 4, d, r1);
    const Model b = init_model(ModelKind::TensorFusion, 4, d, r2);
    for (std::size_t u = 0; u < 4; ++u) CHECK(embedding_of(a, u) == embedding_of(b, u));

    CHECK_THROWS_AS(embedding_of(a, 99), std::out_of_range);
}

TEST_CASE("tensor sensitivity is W plus the embedding contraction") {
    const ModelDims d = dims_of(4, 2);
    SeededRng rng(9);
    Model m = init_model(ModelKind::TensorFusion, 1, d, rng);
    const ThetaLayout lay = layout(m);
    // zero user 0's embedding
    m.theta[lay.embedding_begin] = 0.0;
    const Vec s0 = sensitivity(m, 0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(s0[j] == m.theta[j]);

    // z=1, E[u]=[2], T row one-hot on feature 1 -> change vector [0,2,0,0]
    m.theta[lay.embedding_begin + 1] = 2.0;
    for (std::size_t j = 0; j < 4; ++j) m.theta[d.n_features + 1 + j] = (j == 1) ? 1.0 : 0.0;
    const Vec change = tensor_sensitivity_change(m, embedding_of(m, 1));
    CHECK(change == Vec{0, 2, 0, 0});

    const Vec x{1, 1, 1, 1};
    CHECK_THROWS_AS(sensitivity(m, 0, &x), std::invalid_argument);
}

TEST_CASE("mask sensitivity matches finite differences on the input") {
    const ModelDims d = dims_of(6, 3);
    SeededRng rng(17);
    for (ModelKind kind : {ModelKind::AdditiveMask, ModelKind::MultiplicativeMask}) {
        const Model m = init_model(kind, 4, d, rng, Activation::Tanh);
        Vec x = rng.sample_uniform(-1.0, 1.0, 6);
        const Vec analytic = sensitivity(m, 1, &x);
        const double h = 1e-6;
        for (std::size_t j = 0; j < 6; ++j) {
            const double orig = x[j];
            x[j] = orig + h;
            const double up = forward(m, x, 1);
            x[j] = orig - h;
            const double down = forward(m, x, 1);
            x[j] = orig;
            const double numeric = (up - down) / (2.0 * h);
            const double scale = std::max({std::fabs(analytic[j]), std::fabs(numeric), 1e-8});
            CHECK(std::fabs(analytic[j] - numeric) / scale < 1e-4);
        }
        CHECK_THROWS_AS(sensitivity(m, 1), std::invalid_argument);
    }
}

TEST_CASE("tensor decomposition exactness over embeddings") {
    // forward(x, e) - forward(x, 0) = (e.T)x + u_b.e for every x
    const ModelDims d = dims_of(5, 3);
    SeededRng rng(23);
    const Model m = init_model(ModelKind::TensorFusion, 3, d, rng);
    const Vec ub = tensor_user_bias_weights(m);
    for (int trial = 0; trial < 8; ++trial) {
        const Vec x = rng.sample_uniform(-1.0, 1.0, 5);
        const Vec e = rng.sample_uniform(-2.0, 2.0, 3);
        const double with_e = tensor_score_with_embedding(m, x, e);
        const double without = tensor_score_with_embedding(m, x, Vec(3, 0.0));
        const double expected =
            numerics::dot(tensor_sensitivity_change(m, e), x) + numerics::dot(ub, e);
        CHECK(std::fabs((with_e - without) - expected) < 1e-12);
    }
}

TEST_CASE("forward is pure") {
    const ModelDims d = dims_of(5, 2);
    SeededRng rng(4);
    const Model m = init_model(ModelKind::MultiplicativeMask, 3, d, rng);
    const Vec x = rng.sample_uniform(0.0, 1.0, 5);
    const double first = forward(m, x, 1);
    for (int i = 0; i < 5; ++i) CHECK(forward(m, x, 1) == first);
}

TEST_CASE("model serialization round-trips bit-exactly") {
    const ModelDims d = dims_of(7, 5);
    SeededRng rng(55);
    for (ModelKind kind : {ModelKind::UserBias, ModelKind::Linear, ModelKind::AdditiveMask,
                           ModelKind::FactorizationMachine, ModelKind::TensorFusion}) {
        Model m = init_model(kind, 3, d, rng, Activation::Tanh);
        if (!m.user_mean.empty()) {
            for (std::size_t u = 0; u < d.n_users; ++u) m.user_mean[u] = 1.0 + 0.37 * u;
        }
        std::ostringstream first;
        save_model(m, first, "abc123");
        std::istringstream in(first.str());
        std::string hash;
        const Model loaded = load_model(in, &hash);
        CHECK(hash == "abc123");
        CHECK(loaded.theta == m.theta);
        CHECK(loaded.user_mean == m.user_mean);
        CHECK(loaded.kind == m.kind);
        std::ostringstream second;
        save_model(loaded, second, "abc123");
        CHECK(first.str() == second.str());
    }
}

TEST_CASE("model load rejects wrong versions and truncation") {
    std::istringstream bad("fusionlab-model v99\n");
    CHECK_THROWS_WITH_AS(load_model(bad), doctest::Contains("version"), std::runtime_error);

    const ModelDims d = dims_of(3, 2);
    SeededRng rng(6);
    Model m = init_model(ModelKind::Linear, 0, d, rng);
    std::ostringstream out;
    save_model(m, out, "");
    const std::string full = out.str();
    std::istringstream truncated(full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(load_model(truncated), std::exception);
}

TEST_CASE("forward input validation") {
    const ModelDims d = dims_of(4, 2);
    SeededRng rng(14);
    const Model m = init_model(ModelKind::AdditiveMask, 2, d, rng);
    CHECK_THROWS_AS(forward(m, {1, 2, 3, 4}, 7), std::out_of_range);
    CHECK_THROWS_AS(forward(m, {1, 2}, 0), std::invalid_argument);
    CHECK_THROWS_AS(gradients(m, Matrix(1, 4), {}), std::invalid_argument);
}
