#include "rotaprec/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace rotaprec {

void SolveConfig::validate() const {
    if (!(pt >= 0.0) || !std::isfinite(pt)) throw ArgumentError("solve: Pt must be a finite non-negative number");
    if (!(eps1 > 0.0) || !(eps2 > 0.0) || !(eps3 > 0.0)) throw ArgumentError("solve: tolerances must be positive");
    if (max_iters < 0) throw ArgumentError("solve: max_iters must be non-negative");
    if (init == InitKind::Explicit && !explicit_start) throw ArgumentError("solve: explicit init requires a start point");
}

namespace {

RotationParams identity_start(Eigen::Index nt, double pt) {
    return {Vector::Constant(nt, pt / static_cast<double>(nt)), GivensAngleSet(static_cast<std::size_t>(nt))};
}

PrecoderSolution zero_power_solution(Eigen::Index nt) {
    PrecoderSolution s;
    s.covariance = Matrix::Zero(nt, nt);
    s.vectors = Matrix::Identity(nt, nt);
    s.eigenvalues = Vector::Zero(nt);
    s.rate = 0.0;
    return s;
}

}  // namespace

SolveOutput solve(const ChannelPair& ch, const SolveConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto nt = ch.nt();

    SolveOutput out;
    RotationParams start;
    switch (cfg.init) {
        case InitKind::Gsvd: {
            GsvdStart g = gsvd_init(ch, cfg.pt);
            start = std::move(g.params);
            out.trace.init_rate = g.solution.rate;
            break;
        }
        case InitKind::Identity:
            start = identity_start(nt, cfg.pt);
            out.trace.init_rate = secrecy_rate(ch, Matrix::Identity(nt, nt), start.lambda);
            break;
        case InitKind::Explicit:
            start = *cfg.explicit_start;
            if (start.lambda.size() != nt || static_cast<Eigen::Index>(start.theta.dimension()) != nt)
                throw ArgumentError("solve: explicit start does not match nt");
            out.trace.init_rate = secrecy_rate(ch, compose_rotation(start.theta), rectify(start.lambda.head(nt - 1), cfg.pt));
            break;
    }

    BfgsConfig bcfg;
    bcfg.grad_step = cfg.eps1;
    bcfg.f_tolerance = cfg.eps2;
    bcfg.max_iters = cfg.max_iters;
    bcfg.line_search.eps_f = cfg.eps2;
    bcfg.line_search.eps_alpha = cfg.eps3;
    bcfg.line_search.bracket = cfg.bracket;

    const SecrecyObjective f(ch, cfg.pt);
    const BfgsResult r = bfgs_minimize(f, coordinates_of(start.lambda, start.theta), bcfg,
                                       [&](const BfgsIteration& it, const Vector&, const Matrix&) {
                                           out.trace.records.push_back({it.k, it.f, -it.f, it.alpha, it.grad_norm});
                                       });
    out.trace.evaluations = r.evaluations;

    const Unpacked u = unpack(r.x, nt);
    out.theta = u.angles;
    PrecoderSolution& s = out.solution;
    s.vectors = compose_rotation(u.angles);
    s.eigenvalues = rectify(u.free_eigenvalues, cfg.pt);
    s.covariance = s.vectors * s.eigenvalues.asDiagonal() * s.vectors.transpose();
    s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
    s.rate = -r.f;
    s.iterations = r.iterations;
    s.converged = r.converged;

    if (s.rate < 0.0) {
        PrecoderSolution zero = zero_power_solution(nt);
        zero.iterations = s.iterations;
        zero.converged = s.converged;
        s = std::move(zero);
        out.theta = GivensAngleSet(static_cast<std::size_t>(nt));
        out.zero_power = true;
    }
    out.trace.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return out;
}

PrecoderSolution gsvd_baseline(const ChannelPair& ch, double pt) { return gsvd_init(ch, pt).solution; }

namespace {

// Fixed-size evaluation with plain determinants: a route independent of the
// Cholesky-based secrecy_rate used by the solver.
template <int N>
double fixed_rate(const Eigen::Matrix<double, N, N>& hth, const Eigen::Matrix<double, N, N>& gtg,
                  const Eigen::Matrix<double, N, N>& v, const Eigen::Matrix<double, N, 1>& lambda) {
    using M = Eigen::Matrix<double, N, N>;
    const M w = v * lambda.cwiseSqrt().asDiagonal();
    const M id = M::Identity();
    const double num = (id + w.transpose() * hth * w).determinant();
    const double den = (id + w.transpose() * gtg * w).determinant();
    return 0.5 * std::log2(num / den);
}

Eigen::Matrix3d rotation3(double t01, double t02, double t12) {
    auto plane = [](int i, int j, double t) {
        Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
        g(i, i) = g(j, j) = std::cos(t);
        g(i, j) = -std::sin(t);
        g(j, i) = std::sin(t);
        return g;
    };
    return plane(0, 1, t01) * plane(0, 2, t02) * plane(1, 2, t12);
}

unsigned worker_count(unsigned requested) {
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

double oracle_2(const ChannelPair& ch, double pt, const OracleConfig& cfg) {
    const Eigen::Matrix2d hth = ch.legit_gram();
    const Eigen::Matrix2d gtg = ch.eve_gram();
    const int res = cfg.resolution;
    double best = 0.0;
    for (int k = 0; k < res; ++k) {
        const double theta = M_PI * k / res;
        Eigen::Matrix2d v;
        v << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        for (int i = 0; i <= res; ++i) {
            const double l1 = pt * i / res;
            const Eigen::Vector2d lambda(l1, std::max(0.0, pt - l1));
            best = std::max(best, fixed_rate<2>(hth, gtg, v, lambda));
        }
    }
    return best;
}

double oracle_3(const ChannelPair& ch, double pt, const OracleConfig& cfg) {
    constexpr long kChunk = 20'000;
    const Eigen::Matrix3d hth = ch.legit_gram();
    const Eigen::Matrix3d gtg = ch.eve_gram();
    const long chunks = (cfg.random_samples + kChunk - 1) / kChunk;

    std::atomic<long> next{0};
    std::mutex merge;
    double best = 0.0;
    auto work = [&] {
        double local = 0.0;
        for (long c = next++; c < chunks; c = next++) {
            // Every chunk owns its stream, so the sample set does not depend
            // on how chunks are spread over threads.
            std::mt19937_64 eng(cfg.seed + static_cast<std::uint64_t>(c));
            auto uniform = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
            const long count = std::min(kChunk, cfg.random_samples - c * kChunk);
            for (long s = 0; s < count; ++s) {
                double u1 = uniform();
                double u2 = uniform();
                if (u1 > u2) std::swap(u1, u2);
                const Eigen::Vector3d lambda(pt * u1, pt * (u2 - u1), pt * (1.0 - u2));
                const Eigen::Matrix3d v =
                    rotation3(2.0 * M_PI * uniform(), 2.0 * M_PI * uniform(), 2.0 * M_PI * uniform());
                local = std::max(local, fixed_rate<3>(hth, gtg, v, lambda));
            }
        }
        std::lock_guard lock(merge);
        best = std::max(best, local);
    };

    const unsigned workers = std::min<unsigned>(worker_count(cfg.threads), static_cast<unsigned>(std::max(1L, chunks)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return best;
}

}  // namespace

double grid_oracle(const ChannelPair& ch, double pt, const OracleConfig& cfg) {
    if (cfg.resolution < 1 || cfg.random_samples < 1) throw ArgumentError("grid_oracle: resolution must be >= 1");
    switch (ch.nt()) {
        case 1: {
            const Eigen::Matrix<double, 1, 1> v = Eigen::Matrix<double, 1, 1>::Identity();
            const Eigen::Matrix<double, 1, 1> lambda(pt);
            return std::max(0.0, fixed_rate<1>(ch.legit_gram(), ch.eve_gram(), v, lambda));
        }
        case 2:
            return oracle_2(ch, pt, cfg);
        case 3:
            return oracle_3(ch, pt, cfg);
        default:
            throw ArgumentError("grid_oracle: only nt <= 3 is supported");
    }
}

}  // namespace rotaprec
