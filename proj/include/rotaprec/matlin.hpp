#pragma once

// Linear algebra for the rotation parameterization of a covariance matrix
// Q = V diag(lambda) V^T, where V is a product of Givens rotations.
//
// Indices are zero-based throughout: the pair (i, j) with 0 <= i < j < n
// names the plane spanned by basis vectors i and j.

#include "rotaprec/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rotaprec {

// Rotation angles theta_ij for all 0 <= i < j < n, flattened with i as the
// outer (ascending) and j as the inner (ascending) index. Any real value is
// admissible.
class GivensAngleSet {
public:
    GivensAngleSet() = default;
    explicit GivensAngleSet(std::size_t n);
    GivensAngleSet(std::size_t n, std::vector<double> flat);

    static std::size_t count_for(std::size_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }
    static std::size_t flat_index(std::size_t n, std::size_t i, std::size_t j);

    std::size_t dimension() const { return n_; }
    std::size_t size() const { return angles_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return angles_[flat_index(n_, i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return angles_[flat_index(n_, i, j)]; }

    std::span<const double> flat() const { return angles_; }
    std::span<double> flat() { return angles_; }

    bool operator==(const GivensAngleSet&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> angles_;
};

struct SymEig {
    Matrix vectors;  // orthonormal, column k pairs with values(k)
    Vector values;   // descending
    int sweeps = 0;
};

// Cyclic Jacobi eigensolver for a symmetric matrix. Throws ContractViolation
// if |Q - Q^T| exceeds 1e-10 (scaled by max(1, |Q|max)) and NumericalError
// if the off-diagonal mass is still above threshold after max_sweeps.
SymEig sym_eig(const Matrix& q, int max_sweeps = 50, double threshold = 1e-12);

// Identity except for the (i, j) plane block [[cos, -sin], [sin, cos]].
Matrix givens(std::size_t n, std::size_t i, std::size_t j, double theta);

// V = prod_i prod_j V_ij in canonical order (V_01 V_02 ... V_{n-2,n-1}).
Matrix compose_rotation(const GivensAngleSet& angles);

struct AngleExtraction {
    GivensAngleSet angles;
    bool columns_swapped = false;  // det(V) was -1; first two columns exchanged
};

// Recovers angles with compose_rotation(angles) == V (after the column swap
// when V is improper). Throws ContractViolation if V is not orthonormal to
// within 1e-8.
AngleExtraction extract_angles(Matrix v);

enum class SwapPair { FirstTwo, LastTwo };

struct ImproperRepair {
    Matrix vectors;
    Vector values;
    bool was_improper = false;  // false: input was already proper, returned unchanged
};

// Exchanges two eigenvector columns and the matching eigenvalues so that the
// returned V has det +1 while V diag(values) V^T is unchanged. For n == 1 the
// single column is negated instead.
ImproperRepair repair_improper(const Matrix& v, const Vector& values,
                               SwapPair pair = SwapPair::FirstTwo);

double determinant(const Matrix& m);
double orthonormality_error(const Matrix& v);  // |V V^T - I|max
double symmetry_error(const Matrix& m);        // |M - M^T|max

}  // namespace rotaprec
