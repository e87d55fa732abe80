#include "rotaprec/matlin.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rotaprec;
using test_support::random_rotation;

TEST_SUITE("matlin") {

TEST_CASE("angle set layout") {
    CHECK(GivensAngleSet::count_for(1) == 0);
    CHECK(GivensAngleSet::count_for(3) == 3);
    CHECK(GivensAngleSet::count_for(4) == 6);
    CHECK(GivensAngleSet::flat_index(4, 0, 1) == 0);
    CHECK(GivensAngleSet::flat_index(4, 0, 3) == 2);
    CHECK(GivensAngleSet::flat_index(4, 1, 2) == 3);
    CHECK(GivensAngleSet::flat_index(4, 2, 3) == 5);
    GivensAngleSet a(3, {0.1, 0.2, 0.3});
    CHECK(a(0, 2) == 0.2);
    CHECK(a(1, 2) == 0.3);
    CHECK_THROWS_AS(GivensAngleSet(3, {0.1}), ArgumentError);
}

TEST_CASE("sym_eig on small spectra") {
    SymEig e = sym_eig(Matrix::Identity(3, 3));
    CHECK(max_abs(e.values - Vector::Ones(3)) < 1e-14);
    CHECK(orthonormality_error(e.vectors) < 1e-14);

    Matrix d(2, 2);
    d << 1, 0, 0, 3;
    e = sym_eig(d);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

    Matrix q(2, 2);
    q << 2, 1, 1, 2;
    e = sym_eig(q);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(e.vectors(0, 0) * e.vectors(1, 0) > 0);
    CHECK(e.vectors(0, 1) * e.vectors(1, 1) < 0);
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 6; ++n) {
        const Matrix a = test_support::random_matrix(n, n, rng);
        const Matrix q = a + a.transpose();
        const SymEig e = sym_eig(q);
        CHECK(max_abs(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - q) < 1e-10);
        CHECK(orthonormality_error(e.vectors) < 1e-12);
        for (Eigen::Index k = 1; k < n; ++k) CHECK(e.values(k - 1) >= e.values(k));
    }
}

TEST_CASE("sym_eig rejects asymmetric input") {
    Matrix q(2, 2);
    q << 1, 2, 0, 1;
    CHECK_THROWS_AS(sym_eig(q), ContractViolation);
}

TEST_CASE("givens") {
    CHECK(max_abs(givens(3, 1, 2, 0.0) - Matrix::Identity(3, 3)) == 0.0);
    Matrix quarter(2, 2);
    quarter << 0, -1, 1, 0;
    CHECK(max_abs(givens(2, 0, 1, std::numbers::pi / 2) - quarter) < 1e-15);
    CHECK_THROWS_AS(givens(3, 2, 1, 0.1), ArgumentError);
    CHECK_THROWS_AS(givens(3, 1, 3, 0.1), ArgumentError);
    CHECK_THROWS_AS(givens(3, 1, 1, 0.1), ArgumentError);
}

TEST_CASE("compose_rotation") {
    CHECK(max_abs(compose_rotation(GivensAngleSet(4)) - Matrix::Identity(4, 4)) == 0.0);
    const double t = 0.37;
    Matrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    CHECK(max_abs(compose_rotation(GivensAngleSet(2, {t})) - r) < 1e-15);

    const GivensAngleSet a(3, {0.4, -1.3, 2.2});
    const Matrix v = compose_rotation(a);
    CHECK(orthonormality_error(v) < 1e-10);
    const Matrix direct = givens(3, 0, 1, 0.4) * givens(3, 0, 2, -1.3) * givens(3, 1, 2, 2.2);
    CHECK(max_abs(v - direct) < 1e-14);
}

TEST_CASE("extract_angles") {
    const AngleExtraction id = extract_angles(Matrix::Identity(3, 3));
    for (double a : id.angles.flat()) CHECK(a == 0.0);
    CHECK_FALSE(id.columns_swapped);

    const AngleExtraction one = extract_angles(givens(2, 0, 1, 0.7));
    CHECK(one.angles(0, 1) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_FALSE(one.columns_swapped);

    std::mt19937_64 rng(5);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            const Matrix v = random_rotation(n, rng);
            const AngleExtraction x = extract_angles(v);
            CHECK_FALSE(x.columns_swapped);
            CHECK(max_abs(compose_rotation(x.angles) - v) < 1e-8);
            for (double a : x.angles.flat()) CHECK(std::abs(a) <= std::numbers::pi);
        }
    }
}

TEST_CASE("extract_angles on an improper matrix swaps the first two columns") {
    std::mt19937_64 rng(8);
    Matrix v = random_rotation(3, rng);
    v.col(2) = -v.col(2);
    const AngleExtraction x = extract_angles(v);
    CHECK(x.columns_swapped);
    Matrix swapped = v;
    swapped.col(0).swap(swapped.col(1));
    CHECK(max_abs(compose_rotation(x.angles) - swapped) < 1e-8);
}

TEST_CASE("extract_angles rejects non-orthonormal input") {
    Matrix v = Matrix::Identity(3, 3);
    v(0, 1) = 0.1;
    CHECK_THROWS_AS(extract_angles(v), ContractViolation);
}

TEST_CASE("repair_improper") {
    Matrix v = Matrix::Identity(3, 3);
    v(2, 2) = -1;
    const Vector lam = Vector::LinSpaced(3, 3.0, 1.0);
    const Matrix q = v * lam.asDiagonal() * v.transpose();

    const ImproperRepair last = repair_improper(v, lam, SwapPair::LastTwo);
    CHECK(last.was_improper);
    CHECK(determinant(last.vectors) == doctest::Approx(1.0));
    CHECK(last.vectors.col(1) == v.col(2));
    CHECK(last.vectors.col(2) == v.col(1));
    CHECK(last.values(1) == lam(2));
    CHECK(max_abs(last.vectors * last.values.asDiagonal() * last.vectors.transpose() - q) < 1e-15);

    const ImproperRepair first = repair_improper(v, lam);
    CHECK(first.was_improper);
    CHECK(determinant(first.vectors) == doctest::Approx(1.0));
    CHECK(max_abs(first.vectors * first.values.asDiagonal() * first.vectors.transpose() - q) < 1e-15);

    const ImproperRepair noop = repair_improper(Matrix::Identity(3, 3), lam);
    CHECK_FALSE(noop.was_improper);
    CHECK(noop.vectors == Matrix::Identity(3, 3));

    const ImproperRepair scalar = repair_improper(-Matrix::Identity(1, 1), Vector::Constant(1, 2.0));
    CHECK(scalar.was_improper);
    CHECK(scalar.vectors(0, 0) == 1.0);
}

}
