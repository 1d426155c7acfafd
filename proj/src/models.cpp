#include "fusionlab/models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fusionlab::models {

namespace {

void format_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

double activate(Activation act, double h) {
    switch (act) {
        case Activation::Relu: return h > 0.0 ? h : 0.0;
        case Activation::Tanh: return std::tanh(h);
        case Activation::Identity: return h;
    }
    return h;
}

double activate_deriv(Activation act, double h) {
    switch (act) {
        case Activation::Relu: return h > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(h);
            return 1.0 - t * t;
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

// Block offsets within theta, computed on demand. See the layout comment in
// the header.
struct MaskOffsets {
    std::size_t w1, b1, e, w2, b2, size;
};
MaskOffsets mask_offsets(const ModelDims& d) {
    MaskOffsets o{};
    o.w1 = 0;
    o.b1 = o.w1 + d.z * d.n_features;
    o.e = o.b1 + d.z;
    o.w2 = o.e + d.n_users * d.z;
    o.b2 = o.w2 + d.z;
    o.size = o.b2 + 1;
    return o;
}

struct TensorOffsets {
    std::size_t w, b, t, e, ub, size;
};
TensorOffsets tensor_offsets(const ModelDims& d) {
    TensorOffsets o{};
    o.w = 0;
    o.b = o.w + d.n_features;
    o.t = o.b + 1;
    o.e = o.t + d.z * d.n_features;
    o.ub = o.e + d.n_users * d.z;
    o.size = o.ub + d.z;
    return o;
}

struct FmOffsets {
    std::size_t b, w, v, size;
    std::size_t n_total;
};
FmOffsets fm_offsets(const ModelDims& d) {
    FmOffsets o{};
    o.n_total = d.n_features + d.n_users;
    o.b = 0;
    o.w = 1;
    o.v = o.w + o.n_total;
    o.size = o.v + o.n_total * d.z;
    return o;
}

void require_user(const Model& m, std::size_t u) {
    if (u >= m.dims.n_users) {
        throw std::out_of_range("user index " + std::to_string(u) + " out of range (n_users=" +
                                std::to_string(m.dims.n_users) + ")");
    }
}

void require_features(const Model& m, const Vec& x) {
    if (x.size() != m.dims.n_features) {
        throw std::invalid_argument("feature vector has length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(m.dims.n_features));
    }
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::UserBias: return "user-bias";
        case ModelKind::Linear: return "linear";
        case ModelKind::AdditiveMask: return "add";
        case ModelKind::MultiplicativeMask: return "mul";
        case ModelKind::TensorFusion: return "tensor";
        case ModelKind::FactorizationMachine: return "fm";
    }
    return "?";
}

ModelKind kind_from_string(const std::string& s) {
    if (s == "user-bias") return ModelKind::UserBias;
    if (s == "linear") return ModelKind::Linear;
    if (s == "add") return ModelKind::AdditiveMask;
    if (s == "mul") return ModelKind::MultiplicativeMask;
    if (s == "tensor") return ModelKind::TensorFusion;
    if (s == "fm") return ModelKind::FactorizationMachine;
    throw std::invalid_argument("unknown model kind: " + s);
}

std::string to_string(Activation act) {
    switch (act) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + s);
}

bool is_fusion_kind(ModelKind kind) {
    return kind == ModelKind::AdditiveMask || kind == ModelKind::MultiplicativeMask ||
           kind == ModelKind::TensorFusion || kind == ModelKind::FactorizationMachine;
}

ThetaLayout layout(const Model& m) {
    ThetaLayout l{};
    switch (m.kind) {
        case ModelKind::UserBias:
            l.size = 0;
            break;
        case ModelKind::Linear:
            l.size = m.dims.n_features + 1;
            break;
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask: {
            const auto o = mask_offsets(m.dims);
            l.embedding_begin = o.e;
            l.embedding_end = o.w2;
            l.size = o.size;
            break;
        }
        case ModelKind::TensorFusion: {
            const auto o = tensor_offsets(m.dims);
            l.embedding_begin = o.e;
            l.embedding_end = o.ub;
            l.size = o.size;
            break;
        }
        case ModelKind::FactorizationMachine: {
            const auto o = fm_offsets(m.dims);
            l.embedding_begin = o.v;
            l.embedding_end = o.size;
            l.size = o.size;
            break;
        }
    }
    return l;
}

std::size_t param_count(ModelKind kind, std::size_t z, std::size_t n_features,
                        std::size_t n_users) {
    switch (kind) {
        case ModelKind::UserBias:
            return n_users + 1;
        case ModelKind::Linear:
            return n_users + 1 + n_features + 1;
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask:
            return z * (n_features + n_users + 2) + 1;
        case ModelKind::TensorFusion:
            return (n_features + 1) + z * (n_features + n_users + 1);
        case ModelKind::FactorizationMachine:
            return 1 + (n_features + n_users) * (1 + z);
    }
    return 0;
}

Model init_model(ModelKind kind, std::size_t z, const ModelDims& dims, SeededRng& rng,
                 Activation act) {
    if (is_fusion_kind(kind) && z == 0) {
        throw std::invalid_argument("embedding size must be positive for " + to_string(kind));
    }
    Model m;
    m.kind = kind;
    m.dims = dims;
    m.dims.z = is_fusion_kind(kind) ? z : 0;
    m.act = act;
    m.seed = rng.seed();

    const std::size_t n = dims.n_features;
    const std::size_t users = dims.n_users;
    m.theta.assign(layout(m).size, 0.0);

    auto fill_uniform = [&](std::size_t begin, std::size_t count, double lo, double hi) {
        for (std::size_t i = 0; i < count; ++i) m.theta[begin + i] = rng.uniform(lo, hi);
    };
    auto fan_limit = [](std::size_t fan_in, std::size_t fan_out) {
        return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    };

    switch (kind) {
        case ModelKind::UserBias:
            m.user_mean.assign(users, 0.0);
            break;
        case ModelKind::Linear: {
            m.user_mean.assign(users, 0.0);
            fill_uniform(0, n, -fan_limit(n, 1), fan_limit(n, 1));
            break;
        }
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask: {
            const auto o = mask_offsets(m.dims);
            const double l1 = fan_limit(n, z);
            fill_uniform(o.w1, z * n, -l1, l1);
            // multiplicative masks start near identity so gradients flow
            const double e_base = (kind == ModelKind::MultiplicativeMask) ? 1.0 : 0.0;
            fill_uniform(o.e, users * z, e_base - 0.05, e_base + 0.05);
            const double l2 = fan_limit(z, 1);
            fill_uniform(o.w2, z, -l2, l2);
            break;
        }
        case ModelKind::TensorFusion: {
            const auto o = tensor_offsets(m.dims);
            const double lw = fan_limit(n, 1);
            fill_uniform(o.w, n, -lw, lw);
            const double lt = fan_limit(n, z);
            fill_uniform(o.t, z * n, -lt, lt);
            fill_uniform(o.e, users * z, -0.05, 0.05);
            const double lu = fan_limit(z, 1);
            fill_uniform(o.ub, z, -lu, lu);
            break;
        }
        case ModelKind::FactorizationMachine: {
            const auto o = fm_offsets(m.dims);
            const double lw = fan_limit(o.n_total, 1);
            fill_uniform(o.w, o.n_total, -lw, lw);
            fill_uniform(o.v, o.n_total * z, -0.05, 0.05);
            break;
        }
    }
    return m;
}

namespace {

// Hidden pre-activation of a mask model, before the mask for additive
// (mask added in-place) and the post-mask state for multiplicative.
struct MaskState {
    Vec pre;     // W1 x + b1
    Vec masked;  // pre + e  or  pre .* e
};

MaskState mask_hidden(const Model& m, const Vec& x, std::size_t u) {
    const auto o = mask_offsets(m.dims);
    const std::size_t z = m.dims.z;
    const std::size_t n = m.dims.n_features;
    MaskState s;
    s.pre.resize(z);
    s.masked.resize(z);
    for (std::size_t i = 0; i < z; ++i) {
        const double* row = m.theta.data() + o.w1 + i * n;
        double acc = m.theta[o.b1 + i];
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        s.pre[i] = acc;
        const double e = m.theta[o.e + u * z + i];
        s.masked[i] = (m.kind == ModelKind::AdditiveMask) ? acc + e : acc * e;
    }
    return s;
}

// s_f = sum_i V[i,f] x_i + V[user_col,f]; q_f = sum_i V[i,f]^2 x_i^2 + V[user_col,f]^2
struct FmState {
    Vec s;
    Vec q;
    double linear = 0.0;  // b + W.x + W_user
};

FmState fm_state(const Model& m, const Vec& x, std::size_t u) {
    const auto o = fm_offsets(m.dims);
    const std::size_t z = m.dims.z;
    const std::size_t n = m.dims.n_features;
    const std::size_t ucol = n + u;
    FmState st;
    st.s.assign(z, 0.0);
    st.q.assign(z, 0.0);
    double lin = m.theta[o.b] + m.theta[o.w + ucol];
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        lin += m.theta[o.w + i] * xi;
        const double* vrow = m.theta.data() + o.v + i * z;
        for (std::size_t f = 0; f < z; ++f) {
            st.s[f] += vrow[f] * xi;
            st.q[f] += vrow[f] * vrow[f] * xi * xi;
        }
    }
    const double* urow = m.theta.data() + o.v + ucol * z;
    for (std::size_t f = 0; f < z; ++f) {
        st.s[f] += urow[f];
        st.q[f] += urow[f] * urow[f];
    }
    st.linear = lin;
    return st;
}

}  // namespace

double forward(const Model& m, const Vec& x, std::size_t u) {
    require_user(m, u);
    switch (m.kind) {
        case ModelKind::UserBias:
            return m.user_mean[u];
        case ModelKind::Linear: {
            require_features(m, x);
            const std::size_t n = m.dims.n_features;
            double acc = m.user_mean[u] + m.theta[n];
            for (std::size_t j = 0; j < n; ++j) acc += m.theta[j] * x[j];
            return acc;
        }
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask: {
            require_features(m, x);
            const auto o = mask_offsets(m.dims);
            const MaskState s = mask_hidden(m, x, u);
            double acc = m.theta[o.b2];
            for (std::size_t i = 0; i < m.dims.z; ++i) {
                acc += m.theta[o.w2 + i] * activate(m.act, s.masked[i]);
            }
            return acc;
        }
        case ModelKind::TensorFusion:
            return tensor_forward_parts(m, x, u).total();
        case ModelKind::FactorizationMachine: {
            require_features(m, x);
            const FmState st = fm_state(m, x, u);
            double pair = 0.0;
            for (std::size_t f = 0; f < m.dims.z; ++f) {
                pair += st.s[f] * st.s[f] - st.q[f];
            }
            return st.linear + 0.5 * pair;
        }
    }
    return 0.0;
}

TensorParts tensor_forward_parts(const Model& m, const Vec& x, std::size_t u) {
    if (m.kind != ModelKind::TensorFusion) {
        throw std::invalid_argument("tensor_forward_parts requires a tensor-fusion model");
    }
    require_user(m, u);
    require_features(m, x);
    const auto o = tensor_offsets(m.dims);
    const std::size_t n = m.dims.n_features;
    const std::size_t z = m.dims.z;
    const double* e = m.theta.data() + o.e + u * z;

    TensorParts parts;
    parts.y_x = m.theta[o.b];
    for (std::size_t j = 0; j < n; ++j) parts.y_x += m.theta[o.w + j] * x[j];
    for (std::size_t i = 0; i < z; ++i) {
        const double* trow = m.theta.data() + o.t + i * n;
        double tx = 0.0;
        for (std::size_t j = 0; j < n; ++j) tx += trow[j] * x[j];
        parts.y_h += e[i] * tx;
        parts.y_u += m.theta[o.ub + i] * e[i];
    }
    return parts;
}

double mse_loss(const Model& m, const Matrix& features, const std::vector<Example>& batch) {
    if (batch.empty()) throw std::invalid_argument("mse_loss: empty batch");
    double acc = 0.0;
    for (const Example& ex : batch) {
        const double r = forward(m, features.row_vec(ex.item), ex.user) - ex.rating;
        acc += r * r;
    }
    return acc / static_cast<double>(batch.size());
}

Vec gradients(const Model& m, const Matrix& features, const std::vector<Example>& batch) {
    if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
    Vec grad(m.theta.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(batch.size());
    const std::size_t n = m.dims.n_features;
    const std::size_t z = m.dims.z;

    for (const Example& ex : batch) {
        const Vec x = features.row_vec(ex.item);
        const std::size_t u = ex.user;
        const double g = 2.0 * (forward(m, x, u) - ex.rating) * inv;

        switch (m.kind) {
            case ModelKind::UserBias:
                break;  // means are not gradient-trained
            case ModelKind::Linear: {
                for (std::size_t j = 0; j < n; ++j) grad[j] += g * x[j];
                grad[n] += g;
                break;
            }
            case ModelKind::AdditiveMask: {
                const auto o = mask_offsets(m.dims);
                const MaskState s = mask_hidden(m, x, u);
                for (std::size_t i = 0; i < z; ++i) {
                    const double a = activate(m.act, s.masked[i]);
                    grad[o.w2 + i] += g * a;
                    const double dh = g * m.theta[o.w2 + i] * activate_deriv(m.act, s.masked[i]);
                    grad[o.b1 + i] += dh;
                    grad[o.e + u * z + i] += dh;
                    double* w1g = grad.data() + o.w1 + i * n;
                    for (std::size_t j = 0; j < n; ++j) w1g[j] += dh * x[j];
                }
                grad[o.b2] += g;
                break;
            }
            case ModelKind::MultiplicativeMask: {
                const auto o = mask_offsets(m.dims);
                const MaskState s = mask_hidden(m, x, u);
                for (std::size_t i = 0; i < z; ++i) {
                    const double a = activate(m.act, s.masked[i]);
                    grad[o.w2 + i] += g * a;
                    const double dh = g * m.theta[o.w2 + i] * activate_deriv(m.act, s.masked[i]);
                    const double e = m.theta[o.e + u * z + i];
                    grad[o.e + u * z + i] += dh * s.pre[i];
                    const double dp = dh * e;
                    grad[o.b1 + i] += dp;
                    double* w1g = grad.data() + o.w1 + i * n;
                    for (std::size_t j = 0; j < n; ++j) w1g[j] += dp * x[j];
                }
                grad[o.b2] += g;
                break;
            }
            case ModelKind::TensorFusion: {
                const auto o = tensor_offsets(m.dims);
                const double* e = m.theta.data() + o.e + u * z;
                grad[o.b] += g;
                for (std::size_t j = 0; j < n; ++j) grad[o.w + j] += g * x[j];
                for (std::size_t i = 0; i < z; ++i) {
                    const double* trow = m.theta.data() + o.t + i * n;
                    double tx = 0.0;
                    for (std::size_t j = 0; j < n; ++j) tx += trow[j] * x[j];
                    grad[o.e + u * z + i] += g * (tx + m.theta[o.ub + i]);
                    grad[o.ub + i] += g * e[i];
                    double* tg = grad.data() + o.t + i * n;
                    const double ge = g * e[i];
                    for (std::size_t j = 0; j < n; ++j) tg[j] += ge * x[j];
                }
                break;
            }
            case ModelKind::FactorizationMachine: {
                const auto o = fm_offsets(m.dims);
                const std::size_t ucol = n + u;
                const FmState st = fm_state(m, x, u);
                grad[o.b] += g;
                grad[o.w + ucol] += g;
                for (std::size_t i = 0; i < n; ++i) {
                    const double xi = x[i];
                    if (xi == 0.0) continue;
                    grad[o.w + i] += g * xi;
                    const double* vrow = m.theta.data() + o.v + i * z;
                    double* vg = grad.data() + o.v + i * z;
                    for (std::size_t f = 0; f < z; ++f) {
                        vg[f] += g * (st.s[f] * xi - vrow[f] * xi * xi);
                    }
                }
                const double* urow = m.theta.data() + o.v + ucol * z;
                double* ug = grad.data() + o.v + ucol * z;
                for (std::size_t f = 0; f < z; ++f) {
                    ug[f] += g * (st.s[f] - urow[f]);
                }
                break;
            }
        }
    }
    numerics::check_finite(grad, "gradient(" + to_string(m.kind) + ")");
    return grad;
}

Vec embedding_of(const Model& m, std::size_t u) {
    require_user(m, u);
    const std::size_t z = m.dims.z;
    switch (m.kind) {
        case ModelKind::UserBias:
        case ModelKind::Linear:
            return Vec{m.user_mean[u]};
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask: {
            const auto o = mask_offsets(m.dims);
            const double* e = m.theta.data() + o.e + u * z;
            return Vec(e, e + z);
        }
        case ModelKind::TensorFusion: {
            const auto o = tensor_offsets(m.dims);
            const double* e = m.theta.data() + o.e + u * z;
            return Vec(e, e + z);
        }
        case ModelKind::FactorizationMachine: {
            const auto o = fm_offsets(m.dims);
            const std::size_t ucol = m.dims.n_features + u;
            const double* vrow = m.theta.data() + o.v + ucol * z;
            Vec e(vrow, vrow + z);
            e.push_back(m.theta[o.w + ucol]);  // user bias appended
            return e;
        }
    }
    return {};
}

std::size_t embedding_dim(const Model& m) {
    switch (m.kind) {
        case ModelKind::UserBias:
        case ModelKind::Linear: return 1;
        case ModelKind::FactorizationMachine: return m.dims.z + 1;
        default: return m.dims.z;
    }
}

double fm_t_forward(const Model& m, const Vec& x) {
    if (m.kind != ModelKind::FactorizationMachine) {
        throw std::invalid_argument("fm_t_forward requires an FM model");
    }
    const auto o = fm_offsets(m.dims);
    if (x.size() != o.n_total) {
        throw std::invalid_argument("fm_t_forward: input has length " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(o.n_total));
    }
    const std::size_t z = m.dims.z;
    double lin = m.theta[o.b];
    Vec s(z, 0.0);  // V^T x
    for (std::size_t i = 0; i < o.n_total; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        lin += m.theta[o.w + i] * xi;
        const double* vrow = m.theta.data() + o.v + i * z;
        for (std::size_t f = 0; f < z; ++f) s[f] += vrow[f] * xi;
    }
    double pair = 0.0;
    for (std::size_t f = 0; f < z; ++f) pair += s[f] * s[f];
    return lin + pair;
}

Vec sensitivity(const Model& m, std::size_t u, const Vec* x) {
    require_user(m, u);
    const std::size_t n = m.dims.n_features;
    const std::size_t z = m.dims.z;
    switch (m.kind) {
        case ModelKind::UserBias: {
            if (x) throw std::invalid_argument("sensitivity of user-bias is input-independent; do not pass x");
            return Vec(n, 0.0);
        }
        case ModelKind::Linear: {
            if (x) throw std::invalid_argument("sensitivity of the linear model is input-independent; do not pass x");
            return Vec(m.theta.begin(), m.theta.begin() + static_cast<std::ptrdiff_t>(n));
        }
        case ModelKind::TensorFusion: {
            if (x) throw std::invalid_argument("tensor-fusion sensitivity is input-independent; do not pass x");
            const auto o = tensor_offsets(m.dims);
            Vec out(m.theta.begin() + static_cast<std::ptrdiff_t>(o.w),
                    m.theta.begin() + static_cast<std::ptrdiff_t>(o.w + n));
            const Vec change = tensor_sensitivity_change(m, embedding_of(m, u));
            for (std::size_t j = 0; j < n; ++j) out[j] += change[j];
            return out;
        }
        case ModelKind::AdditiveMask:
        case ModelKind::MultiplicativeMask: {
            if (!x) throw std::invalid_argument("mask-model sensitivity is input-dependent; pass x");
            require_features(m, *x);
            const auto o = mask_offsets(m.dims);
            const MaskState s = mask_hidden(m, *x, u);
            Vec out(n, 0.0);
            for (std::size_t i = 0; i < z; ++i) {
                double dh = m.theta[o.w2 + i] * activate_deriv(m.act, s.masked[i]);
                if (m.kind == ModelKind::MultiplicativeMask) dh *= m.theta[o.e + u * z + i];
                const double* w1row = m.theta.data() + o.w1 + i * n;
                for (std::size_t j = 0; j < n; ++j) out[j] += dh * w1row[j];
            }
            return out;
        }
        case ModelKind::FactorizationMachine: {
            if (!x) throw std::invalid_argument("FM sensitivity is input-dependent; pass x");
            require_features(m, *x);
            const auto o = fm_offsets(m.dims);
            const FmState st = fm_state(m, *x, u);
            Vec out(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = m.theta[o.w + i];
                const double* vrow = m.theta.data() + o.v + i * z;
                for (std::size_t f = 0; f < z; ++f) {
                    acc += vrow[f] * (st.s[f] - vrow[f] * (*x)[i]);
                }
                out[i] = acc;
            }
            return out;
        }
    }
    return {};
}

Vec tensor_sensitivity_change(const Model& m, const Vec& embedding) {
    if (m.kind != ModelKind::TensorFusion) {
        throw std::invalid_argument("sensitivity change requires a tensor-fusion model");
    }
    if (embedding.size() != m.dims.z) {
        throw std::invalid_argument("embedding has wrong length");
    }
    const auto o = tensor_offsets(m.dims);
    const std::size_t n = m.dims.n_features;
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < m.dims.z; ++i) {
        const double* trow = m.theta.data() + o.t + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += embedding[i] * trow[j];
    }
    return out;
}

double tensor_score_with_embedding(const Model& m, const Vec& x, const Vec& embedding) {
    if (m.kind != ModelKind::TensorFusion) {
        throw std::invalid_argument("tensor_score_with_embedding requires a tensor-fusion model");
    }
    require_features(m, x);
    if (embedding.size() != m.dims.z) {
        throw std::invalid_argument("embedding has wrong length");
    }
    const auto o = tensor_offsets(m.dims);
    const std::size_t n = m.dims.n_features;
    double acc = m.theta[o.b];
    for (std::size_t j = 0; j < n; ++j) acc += m.theta[o.w + j] * x[j];
    for (std::size_t i = 0; i < m.dims.z; ++i) {
        const double* trow = m.theta.data() + o.t + i * n;
        double tx = 0.0;
        for (std::size_t j = 0; j < n; ++j) tx += trow[j] * x[j];
        acc += embedding[i] * tx + m.theta[o.ub + i] * embedding[i];
    }
    return acc;
}

Vec tensor_user_bias_weights(const Model& m) {
    if (m.kind != ModelKind::TensorFusion) {
        throw std::invalid_argument("tensor_user_bias_weights requires a tensor-fusion model");
    }
    const auto o = tensor_offsets(m.dims);
    return Vec(m.theta.begin() + static_cast<std::ptrdiff_t>(o.ub),
               m.theta.begin() + static_cast<std::ptrdiff_t>(o.ub + m.dims.z));
}

void save_model(const Model& m, std::ostream& out, const std::string& dataset_hash) {
    out << "fusionlab-model v1\n";
    out << "kind " << to_string(m.kind) << "\n";
    out << "z " << m.dims.z << "\n";
    out << "n_features " << m.dims.n_features << "\n";
    out << "n_users " << m.dims.n_users << "\n";
    out << "activation " << to_string(m.act) << "\n";
    out << "seed " << m.seed << "\n";
    out << "rng " << numerics::SeededRng::kAlgorithm << "\n";
    out << "dataset_hash " << (dataset_hash.empty() ? "-" : dataset_hash) << "\n";
    out << "global_mean ";
    format_double(out, m.global_mean);
    out << "\n";
    out << "user_mean " << m.user_mean.size() << "\n";
    for (double v : m.user_mean) {
        format_double(out, v);
        out << "\n";
    }
    out << "theta " << m.theta.size() << "\n";
    for (double v : m.theta) {
        format_double(out, v);
        out << "\n";
    }
    out << "end\n";
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
    std::string k, rest;
    if (!(in >> k) || k != key) {
        throw std::runtime_error("model file: expected '" + key + "', got '" + k + "'");
    }
    in >> rest;
    return rest;
}

}  // namespace

Model load_model(std::istream& in, std::string* dataset_hash) {
    std::string line;
    if (!std::getline(in, line) || line != "fusionlab-model v1") {
        throw std::runtime_error("model file: unsupported format or version ('" + line + "')");
    }
    Model m;
    m.kind = kind_from_string(expect_key(in, "kind"));
    m.dims.z = std::stoull(expect_key(in, "z"));
    m.dims.n_features = std::stoull(expect_key(in, "n_features"));
    m.dims.n_users = std::stoull(expect_key(in, "n_users"));
    m.act = activation_from_string(expect_key(in, "activation"));
    m.seed = std::stoull(expect_key(in, "seed"));
    expect_key(in, "rng");
    const std::string hash = expect_key(in, "dataset_hash");
    if (dataset_hash) *dataset_hash = (hash == "-") ? "" : hash;
    m.global_mean = std::stod(expect_key(in, "global_mean"));

    const std::size_t n_means = std::stoull(expect_key(in, "user_mean"));
    m.user_mean.resize(n_means);
    for (std::size_t i = 0; i < n_means; ++i) {
        if (!(in >> m.user_mean[i])) throw std::runtime_error("model file: truncated user_mean");
    }
    const std::size_t n_theta = std::stoull(expect_key(in, "theta"));
    if (n_theta != layout(m).size) {
        throw std::runtime_error("model file: theta size " + std::to_string(n_theta) +
                                 " does not match declared dimensions");
    }
    m.theta.resize(n_theta);
    for (std::size_t i = 0; i < n_theta; ++i) {
        if (!(in >> m.theta[i])) throw std::runtime_error("model file: truncated theta");
    }
    std::string end;
    if (!(in >> end) || end != "end") throw std::runtime_error("model file: missing end marker");
    return m;
}

void save_model_file(const Model& m, const std::string& path, const std::string& dataset_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_model(m, out, dataset_hash);
}

Model load_model_file(const std::string& path, std::string* dataset_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_model(in, dataset_hash);
}

}  // namespace fusionlab::models
