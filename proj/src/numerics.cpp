#include "fusionlab/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace fusionlab::numerics {

Vec matvec(const Matrix& m, const Vec& x) {
    if (m.cols != x.size()) {
        throw std::invalid_argument(
            "matvec: shape mismatch, matrix is " + std::to_string(m.rows) + "x" +
            std::to_string(m.cols) + " but vector has length " + std::to_string(x.size()));
    }
    Vec out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) acc += r[j] * x[j];
        out[i] = acc;
    }
    return out;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: length mismatch, " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void check_finite(const Vec& values, const std::string& name) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::runtime_error("non-finite value in " + name + " at index " +
                                     std::to_string(i));
        }
    }
}

void check_finite(double value, const std::string& name) {
    if (!std::isfinite(value)) {
        throw std::runtime_error("non-finite value in " + name);
    }
}

double SeededRng::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform: lo >= hi (" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + ")");
    }
    // 53 uniform mantissa bits -> [0,1)
    const double unit = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

Vec SeededRng::sample_uniform(double lo, double hi, std::size_t count) {
    if (!(lo < hi)) {
        throw std::invalid_argument("sample_uniform: lo >= hi");
    }
    Vec out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(uniform(lo, hi));
    return out;
}

std::vector<std::size_t> SeededRng::permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen_() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    // splitmix64 finalizer over the xor of both halves
    std::uint64_t x = base ^ (salt + 0x9e3779b97f4a7c15ULL);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace fusionlab::numerics
