#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fusionlab::numerics {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. Everything in this project is small
// (largest dimension 2071), so no BLAS.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), v(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }

    double* row(std::size_t i) { return v.data() + i * cols; }
    const double* row(std::size_t i) const { return v.data() + i * cols; }

    Vec row_vec(std::size_t i) const {
        return Vec(row(i), row(i) + cols);
    }
};

// result[i] = sum_j m[i,j] * x[j]; throws on shape mismatch naming both shapes.
Vec matvec(const Matrix& m, const Vec& x);

double dot(const Vec& a, const Vec& b);

// Throws std::runtime_error carrying `name` if any value is NaN/Inf.
void check_finite(const Vec& values, const std::string& name);
void check_finite(double value, const std::string& name);

// Deterministic, platform-independent random stream. The raw mt19937_64
// sequence is fixed by the standard; uniform doubles are derived from the
// top 53 bits so the stream is bit-identical everywhere.
class SeededRng {
  public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return gen_(); }

    // One draw in [lo, hi); throws if lo >= hi.
    double uniform(double lo, double hi);

    Vec sample_uniform(double lo, double hi, std::size_t count);

    // Fisher-Yates over indices 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Stable mixing of a base seed with stream labels (fold, epoch, ...), so
// derived streams don't collide.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace fusionlab::numerics
