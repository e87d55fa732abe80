#include "rotaprec/gsvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace rotaprec {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kResidualTol = 1e-8;

// Orthonormal basis whose leading columns span the given (mutually
// orthogonal) columns of `cols` ordered by decreasing norm; the rest is
// completed from the standard basis by Gram-Schmidt.
Matrix orthonormal_completion(const Matrix& cols) {
    const auto dim = cols.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(cols.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return cols.col(a).squaredNorm() > cols.col(b).squaredNorm();
    });

    Matrix basis(dim, dim);
    Eigen::Index filled = 0;
    auto try_add = [&](Vector v) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < filled; ++k) v -= basis.col(k).dot(v) * basis.col(k);
        const double norm = v.norm();
        if (norm <= 1e-7) return;
        basis.col(filled++) = v / norm;
    };
    for (const auto idx : order) {
        if (filled == dim) break;
        const Vector v = cols.col(idx);
        if (v.norm() <= 1e-7) break;
        try_add(v);
    }
    for (Eigen::Index k = 0; k < dim && filled < dim; ++k) try_add(Vector::Unit(dim, k));
    return basis;
}

std::string residual_message(const char* what, double value) {
    std::ostringstream os;
    os << "gsvd_decompose: " << what << " residual " << value << " exceeds " << kResidualTol;
    return os.str();
}

}  // namespace

GsvdFactors gsvd_decompose(const ChannelPair& ch) {
    const Matrix& h = ch.legit();
    const Matrix& g = ch.eve();
    const auto nr = ch.nr();
    const auto ne = ch.ne();
    const auto nt = ch.nt();

    Matrix stacked(nr + ne, nt);
    stacked << h, g;
    const Eigen::JacobiSVD<Matrix> spectrum(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = spectrum.singularValues();
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > kRankTol * sigma(0)) ++rank;

    GsvdFactors f;
    if (rank == 0) {
        // Both channels vanish: nothing to transmit through.
        f.e.resize(nt, 0);
        f.psi_r = Matrix::Identity(nr, nr);
        f.psi_e = Matrix::Identity(ne, ne);
        f.c_mat.resize(nr, 0);
        f.d_mat.resize(ne, 0);
        return f;
    }

    // Orthonormal factorization [H; G] = U T with U (nr+ne) x rank and T of
    // full row rank: unpivoted Householder QR when the stack has full rank,
    // the truncated SVD otherwise.
    Matrix u;
    Matrix t;
    if (rank == std::min(nr + ne, nt)) {
        const Eigen::HouseholderQR<Matrix> qr(stacked);
        u = qr.householderQ() * Matrix::Identity(nr + ne, rank);
        t = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    } else {
        u = spectrum.matrixU().leftCols(rank);
        t = sigma.head(rank).asDiagonal() * spectrum.matrixV().leftCols(rank).transpose();
    }
    const Matrix u1 = u.topRows(nr);
    const Matrix u2 = u.bottomRows(ne);

    // Cosine-sine step: the right singular vectors of the taller block
    // diagonalize both U1^T U1 and U2^T U2 = I - U1^T U1.
    const Matrix& taller = nr >= ne ? u1 : u2;
    const Eigen::JacobiSVD<Matrix> cs(taller, Eigen::ComputeFullV);
    Matrix z = cs.matrixV();
    {
        const Vector c_raw = (u1 * z).colwise().squaredNorm().transpose();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(rank));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return c_raw(a) > c_raw(b); });
        Matrix sorted(rank, rank);
        for (Eigen::Index k = 0; k < rank; ++k) sorted.col(k) = z.col(order[static_cast<std::size_t>(k)]);
        z = std::move(sorted);
    }

    // T E = Z with the minimum-norm E (E = T^{-1} Z when T is square).
    f.e = Eigen::CompleteOrthogonalDecomposition<Matrix>(t).solve(z);
    const Matrix hx = u1 * z;
    const Matrix gx = u2 * z;
    f.psi_r = orthonormal_completion(hx);
    f.psi_e = orthonormal_completion(gx);
    f.c_mat = f.psi_r.transpose() * hx;
    f.d_mat = f.psi_e.transpose() * gx;
    f.c = hx.colwise().squaredNorm().transpose();
    f.d = gx.colwise().squaredNorm().transpose();
    f.e_norms = f.e.colwise().squaredNorm().transpose();

    const double res_h = max_abs(h * f.e - f.psi_r * f.c_mat);
    const double res_g = max_abs(g * f.e - f.psi_e * f.d_mat);
    const double res_cd = (f.c + f.d - Vector::Ones(rank)).cwiseAbs().maxCoeff();
    if (res_h > kResidualTol) throw NumericalError(residual_message("H E - Psi_r C", res_h));
    if (res_g > kResidualTol) throw NumericalError(residual_message("G E - Psi_e D", res_g));
    if (res_cd > kResidualTol) throw NumericalError(residual_message("c + d - 1", res_cd));
    return f;
}

namespace {

double subchannel_power(double c, double d, double e, double mu) {
    if (!(c > d) || e <= 0.0) return 0.0;
    const double a = (c - d) / (mu * e);
    const double disc = 1.0 - 4.0 * c * d + 4.0 * a * c * d;
    if (disc < 0.0) return 0.0;
    return std::max(0.0, (2.0 * a - 2.0) / (1.0 + std::sqrt(disc)));
}

Vector powers_at(const GsvdFactors& f, double mu) {
    Vector p(f.c.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = subchannel_power(f.c(i), f.d(i), f.e_norms(i), mu);
    return p;
}

double trace_at(const GsvdFactors& f, double mu) { return powers_at(f, mu).dot(f.e_norms); }

}  // namespace

GsvdPowerAllocation gsvd_power_alloc(const GsvdFactors& f, double pt) {
    GsvdPowerAllocation out;
    out.p = Vector::Zero(f.c.size());
    bool any = false;
    for (Eigen::Index i = 0; i < f.c.size(); ++i) any = any || (f.c(i) > f.d(i) && f.e_norms(i) > 0.0);
    if (!any || pt <= 0.0) return out;

    double lo = 1e-12;
    double hi = 1e6;
    for (int k = 0; trace_at(f, lo) < pt; ++k) {
        if (k == 60) throw NumericalError("gsvd_power_alloc: no lower bracket for the multiplier");
        lo *= 0.1;
    }
    for (int k = 0; trace_at(f, hi) > pt; ++k) {
        if (k == 60) throw NumericalError("gsvd_power_alloc: no upper bracket for the multiplier");
        hi *= 10.0;
    }
    // Bisect log(mu); the trace is decreasing in mu.
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        const double t = trace_at(f, mid);
        if (t == pt) {
            lo = hi = mid;
            break;
        }
        (t > pt ? lo : hi) = mid;
    }
    const double t_lo = trace_at(f, lo);
    const double t_hi = trace_at(f, hi);
    out.mu = std::abs(t_lo - pt) <= std::abs(t_hi - pt) ? lo : hi;
    out.p = powers_at(f, out.mu);
    out.active = true;
    return out;
}

RotationParams rotation_params_of(const Matrix& q) {
    const SymEig eig = sym_eig(0.5 * (q + q.transpose()));
    const ImproperRepair proper = repair_improper(eig.vectors, eig.values, SwapPair::FirstTwo);
    RotationParams params{proper.values.cwiseMax(0.0), extract_angles(proper.vectors).angles};
    return params;
}

GsvdStart gsvd_init(const ChannelPair& ch, double pt) {
    const auto nt = ch.nt();
    Matrix q0 = Matrix::Zero(nt, nt);
    if (pt > 0.0) {
        const GsvdFactors f = gsvd_decompose(ch);
        const GsvdPowerAllocation alloc = gsvd_power_alloc(f, pt);
        if (alloc.active) {
            q0 = f.e * alloc.p.asDiagonal() * f.e.transpose();
            q0 = 0.5 * (q0 + q0.transpose());
        }
    }
    GsvdStart start;
    start.params = rotation_params_of(q0);
    start.solution.covariance = q0;
    start.solution.vectors = compose_rotation(start.params.theta);
    start.solution.eigenvalues = start.params.lambda;
    start.solution.rate = secrecy_rate_q(ch, q0);
    start.solution.iterations = 0;
    start.solution.converged = true;
    return start;
}

}  // namespace rotaprec
