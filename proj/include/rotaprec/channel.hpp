#pragma once

// Real-valued MIMOME wiretap channel: legitimate gain H (nr x nt) and
// eavesdropper gain G (ne x nt), plus the secrecy-rate evaluators.

#include "rotaprec/types.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace rotaprec {

class ChannelPair {
public:
    ChannelPair(Matrix h, Matrix g);

    const Matrix& legit() const { return h_; }
    const Matrix& eve() const { return g_; }
    Eigen::Index nt() const { return h_.cols(); }
    Eigen::Index nr() const { return h_.rows(); }
    Eigen::Index ne() const { return g_.rows(); }

    // Gram matrices H^T H and G^T G, precomputed once.
    const Matrix& legit_gram() const { return hth_; }
    const Matrix& eve_gram() const { return gtg_; }

private:
    Matrix h_;
    Matrix g_;
    Matrix hth_;
    Matrix gtg_;
};

struct PrecoderSolution {
    Matrix covariance;   // Q, nt x nt
    Matrix vectors;      // V
    Vector eigenvalues;  // lambda
    double rate = 0.0;   // bits/s/Hz
    int iterations = 0;
    bool converged = false;
};

// Standard normal generator with a platform-independent bit stream:
// std::mt19937_64 (fully specified by the standard) feeding a Marsaglia polar
// transform with a fixed 53-bit uniform mapping.
class GaussianSource {
public:
    static constexpr const char* kName = "mt19937_64-polar-v1";

    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    double uniform_pm1();  // uniform on (-1, 1)

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// H then G, each filled row-major from one GaussianSource(seed).
ChannelPair draw_channel(Eigen::Index nt, Eigen::Index nr, Eigen::Index ne, std::uint64_t seed);

// log det(A) for symmetric positive-definite A via Cholesky pivots.
double logdet_spd(const Matrix& a);

// 1/2 log2 det(I + L V^T H^T H V L) - 1/2 log2 det(I + L V^T G^T G V L),
// L = diag(sqrt(lambda)). Same value as the |I + V^T H^T H V Lambda| ratio by
// Sylvester's identity but with symmetric positive-definite arguments, each
// evaluated in min(nt, rows) dimensions.
double secrecy_rate(const ChannelPair& ch, const Matrix& v, const Vector& lambda);

// 1/2 log2 det(I + H Q H^T) - 1/2 log2 det(I + G Q G^T). Throws ArgumentError
// when Q is not symmetric or has an eigenvalue below -1e-6.
double secrecy_rate_q(const ChannelPair& ch, const Matrix& q);

// Matrix files. JSON: {"rows": r, "cols": c, "data": [row-major]} with every
// number written at 17 significant digits. CSV: one row per line.
Matrix read_matrix(const std::string& path);
Matrix parse_matrix_json(const std::string& text);
Matrix parse_matrix_csv(const std::string& text);
std::string matrix_to_json(const Matrix& m);
std::string matrix_to_csv(const Matrix& m);
void write_matrix(const std::string& path, const Matrix& m);

}  // namespace rotaprec
