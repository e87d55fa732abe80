#include "rotaprec/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace rotaprec {

GivensAngleSet::GivensAngleSet(std::size_t n) : n_(n), angles_(count_for(n), 0.0) {}

GivensAngleSet::GivensAngleSet(std::size_t n, std::vector<double> flat)
    : n_(n), angles_(std::move(flat)) {
    if (angles_.size() != count_for(n)) {
        std::ostringstream os;
        os << "angle vector of length " << angles_.size() << " does not match n=" << n
           << " (expected " << count_for(n) << ")";
        throw ArgumentError(os.str());
    }
}

std::size_t GivensAngleSet::flat_index(std::size_t n, std::size_t i, std::size_t j) {
    if (i >= j || j >= n) throw ArgumentError("angle index requires i < j < n");
    // Pairs before row i: sum_{r<i} (n-1-r); then offset inside row i.
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

double symmetry_error(const Matrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("matrix is not square");
    return max_abs(m - m.transpose());
}

double orthonormality_error(const Matrix& v) {
    if (v.rows() != v.cols()) throw ArgumentError("matrix is not square");
    return max_abs(v * v.transpose() - Matrix::Identity(v.rows(), v.cols()));
}

double determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("matrix is not square");
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

SymEig sym_eig(const Matrix& q, int max_sweeps, double threshold) {
    const auto n = q.rows();
    if (n != q.cols()) throw ArgumentError("sym_eig: matrix is not square");
    if (n < 1) throw ArgumentError("sym_eig: empty matrix");
    if (!q.allFinite()) throw ArgumentError("sym_eig: non-finite entries");
    const double scale = std::max(1.0, max_abs(q));
    if (symmetry_error(q) > 1e-10 * scale) {
        std::ostringstream os;
        os << "sym_eig: input is not symmetric (|Q-Q^T|max = " << symmetry_error(q) << ")";
        throw ContractViolation(os.str());
    }

    Matrix a = 0.5 * (q + q.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double total = a.norm();

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index r = p + 1; r < n; ++r) s += 2.0 * a(p, r) * a(p, r);
        return std::sqrt(s);
    };

    int sweep = 0;
    double off = off_norm();
    while (off > threshold * total && off > 0.0) {
        if (sweep == max_sweeps) {
            std::ostringstream os;
            os << "sym_eig: no convergence after " << max_sweeps
               << " sweeps (off-diagonal norm " << off << ", matrix norm " << total << ")";
            throw NumericalError(os.str());
        }
        ++sweep;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (apr == 0.0) continue;
                // Rutishauser's stable form of the 2x2 annihilation.
                const double tau = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                a(p, r) = a(r, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkr = v(k, r);
                    v(k, p) = c * vkp - s * vkr;
                    v(k, r) = s * vkp + c * vkr;
                }
            }
        }
        off = off_norm();
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    SymEig out;
    out.vectors.resize(n, n);
    out.values.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        out.vectors.col(k) = v.col(src);
    }
    out.sweeps = sweep;
    return out;
}

Matrix givens(std::size_t n, std::size_t i, std::size_t j, double theta) {
    if (i >= j || j >= n) throw ArgumentError("givens: requires i < j < n");
    Matrix g = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    g(ii, ii) = c;
    g(jj, jj) = c;
    g(ii, jj) = -s;
    g(jj, ii) = s;
    return g;
}

namespace {

// m <- m * V_ij(theta): only columns i and j change.
void rotate_columns(Matrix& m, Eigen::Index i, Eigen::Index j, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double mi = m(k, i);
        const double mj = m(k, j);
        m(k, i) = c * mi + s * mj;
        m(k, j) = -s * mi + c * mj;
    }
}

// m <- V_ij(theta)^T * m: only rows i and j change.
void unrotate_rows(Matrix& m, Eigen::Index i, Eigen::Index j, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double mi = m(i, k);
        const double mj = m(j, k);
        m(i, k) = c * mi + s * mj;
        m(j, k) = -s * mi + c * mj;
    }
}

}  // namespace

Matrix compose_rotation(const GivensAngleSet& angles) {
    const auto n = static_cast<Eigen::Index>(angles.dimension());
    Matrix v = Matrix::Identity(n, n);
    const auto flat = angles.flat();
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) rotate_columns(v, i, j, flat[idx++]);
    return v;
}

AngleExtraction extract_angles(Matrix v) {
    if (v.rows() != v.cols() || v.rows() < 1) throw ArgumentError("extract_angles: V must be square");
    if (!v.allFinite() || orthonormality_error(v) > 1e-8) {
        std::ostringstream os;
        os << "extract_angles: V is not orthonormal (|VV^T-I|max = " << orthonormality_error(v) << ")";
        throw ContractViolation(os.str());
    }
    const auto n = v.rows();
    AngleExtraction out{GivensAngleSet(static_cast<std::size_t>(n)), false};
    if (determinant(v) < 0.0) {
        if (n >= 2) v.col(0).swap(v.col(1));
        out.columns_swapped = true;
    }

    // Each step applies V_ij(theta)^T on the left to zero entry (j, i); after
    // the sweep V is the identity, so the product of the V_ij reproduces it.
    auto flat = out.angles.flat();
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double theta = -std::atan2(-v(j, i), v(i, i));
            if (theta == -M_PI) theta = M_PI;
            flat[idx++] = theta;
            unrotate_rows(v, i, j, theta);
        }
    }
    return out;
}

ImproperRepair repair_improper(const Matrix& v, const Vector& values, SwapPair pair) {
    if (v.rows() != v.cols() || v.rows() != values.size())
        throw ArgumentError("repair_improper: dimension mismatch");
    ImproperRepair out{v, values, false};
    if (determinant(v) > 0.0) return out;
    out.was_improper = true;
    const auto n = v.rows();
    if (n == 1) {
        out.vectors = -v;
        return out;
    }
    const Eigen::Index a = pair == SwapPair::FirstTwo ? 0 : n - 2;
    const Eigen::Index b = a + 1;
    out.vectors.col(a).swap(out.vectors.col(b));
    std::swap(out.values(a), out.values(b));
    return out;
}

}  // namespace rotaprec
