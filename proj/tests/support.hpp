#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "gw/geometry.hpp"
#include "gw/linalg.hpp"

namespace gw::testing {

// Seed from GW_SEED so failures can be replayed.
inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    std::uint64_t seed = 20261016;
    if (const char* env = std::getenv("GW_SEED")) seed = std::stoull(env);
    return std::mt19937_64(seed ^ (salt * 0x9e3779b97f4a7c15ULL));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = n(rng);
    return m;
}

inline SymMatrix random_sym(std::mt19937_64& rng, std::size_t d) {
    return SymMatrix(random_matrix(rng, d, d));
}

// Orthogonal matrix from modified Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::mt19937_64& rng, std::size_t d) {
    Matrix q = random_matrix(rng, d, d);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            double dot = 0.0;
            for (std::size_t r = 0; r < d; ++r) dot += q(r, c) * q(r, p);
            for (std::size_t r = 0; r < d; ++r) q(r, c) -= dot * q(r, p);
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < d; ++r) norm += q(r, c) * q(r, c);
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < d; ++r) q(r, c) /= norm;
    }
    return q;
}

// Eigenvalues drawn in [lo, hi] under a random rotation.
inline SpdMatrix random_spd(std::mt19937_64& rng, std::size_t d, double lo = 0.2, double hi = 5.0) {
    std::vector<double> lam(d);
    for (double& l : lam) l = uniform(rng, lo, hi);
    return SpdMatrix::from_eigen(random_orthogonal(rng, d), lam);
}

inline Gaussian random_gaussian(std::mt19937_64& rng, std::size_t d) {
    std::vector<double> mean(d);
    for (double& m : mean) m = uniform(rng, -2.0, 2.0);
    return Gaussian(std::move(mean), random_spd(rng, d));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace gw::testing
