#pragma once

// End-to-end rotation-BFGS solve: GSVD start, BFGS over rectified rotation
// coordinates, and a brute-force oracle for small antenna counts.

#include "rotaprec/bfgs.hpp"
#include "rotaprec/channel.hpp"
#include "rotaprec/gsvd.hpp"
#include "rotaprec/rectifier.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rotaprec {

enum class InitKind { Gsvd, Identity, Explicit };

struct SolveConfig {
    double pt = 1.0;
    double eps1 = 1e-4;  // gradient step
    double eps2 = 1e-4;  // function tolerance (termination and line search)
    double eps3 = 5e-4;  // line-search bracket tolerance
    int max_iters = 500;
    InitKind init = InitKind::Gsvd;
    std::optional<RotationParams> explicit_start;
    BracketMode bracket = BracketMode::Verbatim;

    void validate() const;  // throws ArgumentError
};

struct TraceRecord {
    int k = 0;
    double f = 0.0;
    double rate = 0.0;
    double alpha = 0.0;
    double grad_norm = 0.0;
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    double init_rate = 0.0;  // rate of the initial precoder (GSVD: its own rate)
    long evaluations = 0;
    double wall_ms = 0.0;
};

struct SolveOutput {
    PrecoderSolution solution;
    GivensAngleSet theta;
    SolveTrace trace;
    bool zero_power = false;  // every full-power point was worse than sending nothing
};

// The optimizer always spends the full budget. When its best full-power rate
// is negative (zero secrecy capacity) the zero-power solution, rate 0, is
// returned instead with zero_power = true.
SolveOutput solve(const ChannelPair& ch, const SolveConfig& cfg);

PrecoderSolution gsvd_baseline(const ChannelPair& ch, double pt);

struct OracleConfig {
    int resolution = 200;             // grid points per coordinate (nt == 2)
    long random_samples = 1'000'000;  // nt == 3
    std::uint64_t seed = 12345;
    unsigned threads = 1;
};

// Best rate over a grid of the eigenvalue simplex and angles in [0, pi)
// (nt == 2), or over uniform random samples of the simplex and angles in
// [0, 2 pi)^3 (nt == 3). nt == 1 is max(rate(Pt), 0). The zero-power point
// is always included. Throws ArgumentError for nt > 3.
double grid_oracle(const ChannelPair& ch, double pt, const OracleConfig& cfg = {});

}  // namespace rotaprec
