#pragma once

// GSVD-based beamforming: a joint factorization H E = Psi_r C,
// G E = Psi_e D with C^T C + D^T D = I, followed by the per-subchannel
// closed-form per-subchannel power allocation. It serves both as a
// baseline precoder and as the starting point of the rotation-BFGS solver.

#include "rotaprec/channel.hpp"
#include "rotaprec/matlin.hpp"

namespace rotaprec {

struct GsvdFactors {
    Matrix e;        // nt x q precoder
    Matrix psi_r;    // nr x nr orthonormal
    Matrix psi_e;    // ne x ne orthonormal
    Matrix c_mat;    // nr x q, C^T C diagonal
    Matrix d_mat;    // ne x q, D^T D diagonal
    Vector c;        // diag(C^T C), descending
    Vector d;        // diag(D^T D)
    Vector e_norms;  // diag(E^T E)
};

struct GsvdPowerAllocation {
    Vector p;
    double mu = 0.0;
    bool active = false;  // false: no subchannel has c_i > d_i, p == 0
};

// q = min(nt, nr + ne) when [H; G] has full rank. A numerically
// rank-deficient stack (e.g. G == 0 with nt > nr) keeps only the rank-many
// columns whose singular value exceeds 1e-10 relative to the largest.
// Throws NumericalError when a residual of the defining relations exceeds
// 1e-8.
GsvdFactors gsvd_decompose(const ChannelPair& ch);

// p_i from the closed form at the multiplier mu that makes tr(E P E^T) = Pt,
// found by bisection in log(mu).
GsvdPowerAllocation gsvd_power_alloc(const GsvdFactors& f, double pt);

// Rotation coordinates of a precoder: eigenvalues lambda (length nt) and
// angles theta with Q = compose_rotation(theta) diag(lambda) (.)^T.
struct RotationParams {
    Vector lambda;
    GivensAngleSet theta;
};

struct GsvdStart {
    RotationParams params;
    PrecoderSolution solution;
};

// Q0 = E P E^T, eigendecomposed (descending), made proper by swapping the
// first two eigenpairs if needed, then converted to angles.
GsvdStart gsvd_init(const ChannelPair& ch, double pt);

// Rotation parameters of an arbitrary covariance matrix.
RotationParams rotation_params_of(const Matrix& q);

}  // namespace rotaprec
