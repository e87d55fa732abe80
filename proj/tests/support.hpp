#pragma once

#include "rotaprec/types.hpp"

#include <cstdint>
#include <random>

namespace test_support {

inline rotaprec::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    rotaprec::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = n(rng);
    return m;
}

inline rotaprec::Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    return scale * random_matrix(n, 1, rng);
}

// Haar-ish orthonormal matrix with det +1.
inline rotaprec::Matrix random_rotation(Eigen::Index n, std::mt19937_64& rng) {
    const Eigen::HouseholderQR<rotaprec::Matrix> qr(random_matrix(n, n, rng));
    rotaprec::Matrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

}  // namespace test_support
