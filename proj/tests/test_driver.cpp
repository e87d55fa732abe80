#include "rotaprec/driver.hpp"

#include <doctest.h>

#include <cmath>

using namespace rotaprec;

namespace {

SolveConfig config(double pt) {
    SolveConfig c;
    c.pt = pt;
    return c;
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("single antenna: all power or nothing") {
    const ChannelPair good(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.0));
    const SolveOutput a = solve(good, config(3.0));
    CHECK_FALSE(a.zero_power);
    CHECK(a.solution.eigenvalues(0) == 3.0);
    CHECK(a.solution.rate == doctest::Approx(0.5 * std::log2(13.0 / 4.0)));

    const ChannelPair bad(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0));
    const SolveOutput b = solve(bad, config(3.0));
    CHECK(b.zero_power);
    CHECK(b.solution.rate == 0.0);
    CHECK(b.solution.covariance(0, 0) == 0.0);

    OracleConfig oc;
    CHECK(grid_oracle(good, 3.0, oc) == doctest::Approx(a.solution.rate));
    CHECK(grid_oracle(bad, 3.0, oc) == 0.0);
}

TEST_CASE("identical channels give no secrecy") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix h = draw_channel(3, 2, 1, s).legit();
        const SolveOutput out = solve(ChannelPair(h, h), config(10.0));
        CHECK(out.solution.rate >= 0.0);
        CHECK(out.solution.rate <= 1e-6);
    }
}

TEST_CASE("solution covariance is feasible") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const ChannelPair ch = draw_channel(3, 1 + s % 3, 1 + s % 2, s);
        const SolveOutput out = solve(ch, config(30.0));
        const Matrix& q = out.solution.covariance;
        CHECK(sym_eig(q).values.minCoeff() >= -1e-9);
        if (!out.zero_power) CHECK(std::abs(q.trace() - 30.0) <= 1e-9);
        CHECK(secrecy_rate_q(ch, q) == doctest::Approx(out.solution.rate).epsilon(1e-8));
    }
}

TEST_CASE("baseline rate is the first trace value") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const ChannelPair ch = draw_channel(3, 2, 1, s);
        const PrecoderSolution base = gsvd_baseline(ch, 30.0);
        const SolveOutput out = solve(ch, config(30.0));
        REQUIRE_FALSE(out.trace.records.empty());
        CHECK(std::abs(base.rate + out.trace.records.front().f) <= 1e-9);
    }
}

TEST_CASE("solve never ends below the GSVD start") {
    for (std::uint64_t s = 1; s <= 200; ++s) {
        const ChannelPair ch = draw_channel(3, 2, 1, s);
        const SolveOutput out = solve(ch, config(30.0));
        CHECK(out.solution.rate >= gsvd_baseline(ch, 30.0).rate);
        for (std::size_t k = 1; k < out.trace.records.size(); ++k)
            CHECK(out.trace.records[k].f <= out.trace.records[k - 1].f + 1e-4);
    }
}

TEST_CASE("solve is deterministic") {
    const ChannelPair ch = draw_channel(4, 2, 2, 77);
    const SolveOutput a = solve(ch, config(20.0));
    const SolveOutput b = solve(ch, config(20.0));
    CHECK(a.solution.covariance == b.solution.covariance);
    CHECK(a.solution.rate == b.solution.rate);
    CHECK(a.theta == b.theta);
}

TEST_CASE("identity start improves on its own starting rate") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ChannelPair ch = draw_channel(3, 2, 1, s);
        SolveConfig c = config(10.0);
        c.init = InitKind::Identity;
        const SolveOutput out = solve(ch, c);
        CHECK(out.trace.init_rate == doctest::Approx(-out.trace.records.front().f));
        CHECK(out.solution.rate >= std::max(0.0, out.trace.init_rate) - 1e-12);
    }
}

TEST_CASE("two-antenna solves match the grid oracle") {
    OracleConfig oc;
    oc.resolution = 400;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ChannelPair ch = draw_channel(2, 1 + s % 2, 1 + (s / 2) % 2, 300 + s);
        const double rate = solve(ch, config(10.0)).solution.rate;
        const double best = grid_oracle(ch, 10.0, oc);
        CHECK(rate >= best - 0.02);
        CHECK(best >= rate - 0.02);
    }
}

TEST_CASE("grid refinement never lowers the oracle") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ChannelPair ch = draw_channel(2, 1, 1, 40 + s);
        OracleConfig coarse, fine;
        coarse.resolution = 50;
        fine.resolution = 100;
        CHECK(grid_oracle(ch, 10.0, fine) >= grid_oracle(ch, 10.0, coarse));
    }
}

TEST_CASE("oracle is limited to three antennas") {
    CHECK_THROWS_AS(grid_oracle(draw_channel(4, 1, 1, 1), 1.0), ArgumentError);
}

TEST_CASE("configuration validation") {
    const ChannelPair ch = draw_channel(2, 1, 1, 1);
    CHECK_THROWS_AS(solve(ch, config(-1.0)), ArgumentError);
    SolveConfig c = config(1.0);
    c.eps2 = 0.0;
    CHECK_THROWS_AS(solve(ch, c), ArgumentError);
    c = config(1.0);
    c.init = InitKind::Explicit;
    CHECK_THROWS_AS(solve(ch, c), ArgumentError);
}

TEST_CASE("zero power budget") {
    const SolveOutput out = solve(draw_channel(3, 2, 1, 3), config(0.0));
    CHECK(out.solution.rate == 0.0);
    CHECK(max_abs(out.solution.covariance) == 0.0);
}

TEST_CASE("GSVD reference mean at nt=3, nr=1, ne=6") {
    double sum = 0.0;
    for (std::uint64_t t = 1; t <= 200; ++t) sum += gsvd_baseline(draw_channel(3, 1, 6, t), 30.0).rate;
    MESSAGE("GSVD mean over 200 seeds: " << sum / 200);
    CHECK(std::abs(sum / 200 - 0.23) <= 0.05);
}

}
