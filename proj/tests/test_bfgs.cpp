#include "rotaprec/bfgs.hpp"
#include "rotaprec/rectifier.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace rotaprec;

TEST_SUITE("bfgs") {

TEST_CASE("gradient of a linear function is exact") {
    std::mt19937_64 rng(1);
    const Vector c = test_support::random_vector(6, rng);
    const ObjectiveFn f = [&](const Vector& x) { return c.dot(x); };
    const Vector x = test_support::random_vector(6, rng);
    CHECK(max_abs(numeric_gradient(f, x, f(x)) - c) < 1e-9);
}

TEST_CASE("forward-difference bias on a quadratic") {
    std::mt19937_64 rng(2);
    const ObjectiveFn f = [](const Vector& x) { return x.squaredNorm(); };
    const Vector x = test_support::random_vector(5, rng);
    const Vector g = numeric_gradient(f, x, f(x), 1e-4);
    CHECK(max_abs(g - (2 * x + Vector::Constant(5, 1e-4))) < 1e-9);
    CHECK(max_abs(g - 2 * x) <= 1.1e-4);
}

TEST_CASE("non-finite probes are reported") {
    const ObjectiveFn f = [](const Vector& x) {
        return x(1) > 0.5 ? std::numeric_limits<double>::infinity() : x.sum();
    };
    Vector x = Vector::Zero(3);
    x(1) = 0.5;
    CHECK_THROWS_WITH_AS(numeric_gradient(f, x, f(x)), doctest::Contains("coordinate 1"), NumericalError);
}

TEST_CASE("forward and central differences agree on the secrecy objective") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const ChannelPair ch = draw_channel(3, 2, 2, 50 + static_cast<std::uint64_t>(rep));
        const SecrecyObjective obj(ch, 10.0);
        const ObjectiveFn f = obj;
        Vector x = test_support::random_vector(5, rng, 2.0);
        x.head(2) = x.head(2).cwiseAbs() + Vector::Constant(2, 1.0);
        const Vector g = numeric_gradient(f, x, f(x));
        for (Eigen::Index i = 0; i < 5; ++i) {
            Vector p = x, m = x;
            p(i) += 1e-5;
            m(i) -= 1e-5;
            CHECK(std::abs(g(i) - (f(p) - f(m)) / 2e-5) <= 5e-3);
        }
    }
}

TEST_CASE("BFGS update") {
    const Vector v = Vector::LinSpaced(4, 1.0, 2.0);
    CHECK(max_abs(bfgs_update(Matrix::Identity(4, 4), v, v) - Matrix::Identity(4, 4)) < 1e-14);

    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix a = test_support::random_matrix(4, 4, rng);
        const Matrix m = a * a.transpose() + Matrix::Identity(4, 4);
        const Vector dx = test_support::random_vector(4, rng);
        Vector dg = test_support::random_vector(4, rng);
        if (dg.dot(dx) < 0.2 * dg.norm() * dx.norm()) dg = dx + 0.3 * dg;
        if (!curvature_ok(dx, dg)) continue;
        const Matrix next = bfgs_update(m, dx, dg);
        CHECK(max_abs(next * dg - dx) <= 1e-8);
        CHECK(symmetry_error(next) <= 1e-10);
    }
}

TEST_CASE("update is skipped without positive curvature") {
    const Matrix m = 2.0 * Matrix::Identity(2, 2);
    Vector dx(2), dg(2);
    dx << 1, 0;
    dg << -1, 0.5;
    CHECK_FALSE(curvature_ok(dx, dg));
    CHECK(bfgs_update(m, dx, dg) == m);
    dg << 0, 1;
    CHECK(bfgs_update(m, dx, dg) == m);
}

TEST_CASE("golden section locates a quadratic minimizer") {
    const ObjectiveFn f = [](const Vector& x) { return (x(0) - 2.0) * (x(0) - 2.0); };
    const Vector x = Vector::Zero(1);
    const Vector d = -Vector::Ones(1);
    LineSearchConfig cfg;
    cfg.bracket = BracketMode::Descent;
    cfg.eps_f = 1e-12;
    const LineSearchResult r = golden_section_search(f, x, d, f(x), cfg);
    CHECK(std::abs(r.alpha - 2.0) <= 5e-4);
    CHECK(r.expansions == 4);
    CHECK(r.evaluations < 60);
}

TEST_CASE("golden section with verbatim bracketing") {
    // f(x) < f(x - 0.1 d) at the start, so the bracket expands until the far
    // end is no longer worse than the start: 0.1, 0.3, 0.9, 2.7, 8.1.
    const ObjectiveFn f = [](const Vector& x) { return -std::exp(-(x(0) - 2.0) * (x(0) - 2.0)) + 0.5 * x(0); };
    const Vector x = Vector::Constant(1, 0.0);
    const Vector d = Vector::Constant(1, -1.0);
    LineSearchConfig cfg;
    cfg.eps_f = 1e-12;
    const LineSearchResult r = golden_section_search(f, x, d, f(x), cfg);
    CHECK(r.final_bracket > 0.1);
    CHECK(r.f_alpha <= f(x));
    CHECK(r.f_alpha == doctest::Approx(f(x - r.alpha * d)));
}

TEST_CASE("golden section degenerate cases") {
    const ObjectiveFn up = [](const Vector& x) { return x(0); };
    const Vector x = Vector::Zero(1);
    LineSearchConfig descent;
    descent.bracket = BracketMode::Descent;
    // Ascent direction: moving along -d increases f.
    CHECK(golden_section_search(up, x, -Vector::Ones(1), 0.0, descent).alpha == 0.0);
    CHECK(golden_section_search(up, x, -Vector::Ones(1), 0.0).alpha == 0.0);

    const ObjectiveFn flat = [](const Vector&) { return 1.0; };
    const LineSearchResult c = golden_section_search(flat, x, Vector::Ones(1), 1.0);
    CHECK(c.alpha == 0.0);
    CHECK(c.evaluations == 3);

    const LineSearchResult z = golden_section_search(up, x, Vector::Zero(1), 0.0);
    CHECK(z.alpha == 0.0);
    CHECK(z.evaluations == 0);
}

TEST_CASE("bfgs minimizes a convex quadratic") {
    Matrix a(3, 3);
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    Vector b(3);
    b << 1, -2, 0.5;
    const ObjectiveFn f = [&](const Vector& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
    BfgsConfig cfg;
    cfg.f_tolerance = 1e-12;
    cfg.line_search.eps_f = 1e-14;
    cfg.line_search.eps_alpha = 1e-8;
    cfg.line_search.bracket = BracketMode::Descent;
    cfg.grad_step = 1e-7;
    const BfgsResult r = bfgs_minimize(f, Vector::Zero(3), cfg);
    const Vector exact = a.ldlt().solve(b);
    CHECK(max_abs(r.x - exact) < 1e-3);
    CHECK(r.converged);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].f <= r.history[k - 1].f + 1e-12);
}

TEST_CASE("bfgs with no coordinates") {
    const ObjectiveFn f = [](const Vector&) { return 3.0; };
    const BfgsResult r = bfgs_minimize(f, Vector());
    CHECK(r.f == 3.0);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
}

}

TEST_SUITE("bfgs") {

TEST_CASE("line-search evaluation budget") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    int within_golden = 0, total = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const ChannelPair ch = draw_channel(3, 1 + rep % 3, 1 + rep % 2, static_cast<std::uint64_t>(rep));
        const ObjectiveFn f = SecrecyObjective(ch, 10.0);
        Vector x(5), d(5);
        for (int i = 0; i < 5; ++i) {
            x(i) = 3 * n(rng);
            d(i) = n(rng) * std::pow(10.0, n(rng));
        }
        for (const BracketMode mode : {BracketMode::Verbatim, BracketMode::Descent}) {
            LineSearchConfig cfg;
            cfg.bracket = mode;
            const LineSearchResult r = golden_section_search(f, x, d, f(x), cfg);
            const int shrinks = static_cast<int>(std::ceil(std::log(r.final_bracket / cfg.eps_alpha) / std::log(1 / cfg.upper_ratio)));
            // One probe at alpha_init, one per expansion, the two interior
            // points, then at most two probes per shrink.
            CHECK(r.evaluations <= 3 + r.expansions + 2 * shrinks);
            ++total;
            if (r.evaluations <= 3 + r.expansions + shrinks) ++within_golden;
        }
    }
    CHECK(within_golden >= total * 95 / 100);
}

}
