#pragma once

// Monte Carlo runner: seeded channel ensembles, per-method mean rates and
// the relative improvement of rotation-BFGS over GSVD.

#include "rotaprec/driver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rotaprec {

enum class Method { RotationBfgs, Gsvd, Oracle };

std::string to_string(Method m);
Method method_from_string(const std::string& s);  // throws ArgumentError

struct ExperimentSpec {
    std::vector<int> nt{3};
    std::vector<int> nr{1};
    std::vector<int> ne{1};
    std::vector<double> pt{30.0};
    int trials = 1000;
    std::uint64_t seed = 1;  // trial t draws its channel from seed + t
    std::vector<Method> methods{Method::RotationBfgs, Method::Gsvd};
    SolveConfig solver;      // pt is overwritten per cell
    OracleConfig oracle;
    unsigned threads = 0;    // 0: hardware concurrency
    bool timing = false;     // record wall-clock (non-deterministic output)
    bool keep_trials = false;

    void validate() const;  // throws ArgumentError
};

struct CellResult {
    int nt = 0, nr = 0, ne = 0;
    double pt = 0.0;
    Method method = Method::RotationBfgs;
    int trials = 0;
    int failures = 0;
    double mean_rate = 0.0;
    double std_error = 0.0;  // sample std / sqrt(successful trials)
    double mean_iters = 0.0;
    std::optional<double> mean_ms;
    std::vector<double> rates;  // per trial (NaN for failures), when kept

    bool operator==(const CellResult&) const;
};

struct Improvement {
    int nt = 0, nr = 0, ne = 0;
    double pt = 0.0;
    std::optional<double> eta_g;  // (R_bfgs - R_gsvd) / R_gsvd * 100
    std::optional<double> eta_a;  // AOWF baseline slot, never filled

    bool operator==(const Improvement&) const = default;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<Improvement> improvements;
    std::string rng = GaussianSource::kName;

    const CellResult* find(int nt, int nr, int ne, double pt, Method m) const;
    bool operator==(const ExperimentResult&) const = default;
};

class FailureThresholdExceeded : public NumericalError {
public:
    FailureThresholdExceeded(std::string what, ExperimentResult partial)
        : NumericalError(std::move(what)), result(std::move(partial)) {}
    ExperimentResult result;
};

// Cells ordered by (nt, nr, ne, pt, method). Throws FailureThresholdExceeded
// when more than 1% of the trials of any cell fail.
ExperimentResult run_table(const ExperimentSpec& spec);

struct PowerSweepResult {
    ExperimentResult result;  // cells ordered by (nt, nr, ne, method, pt)
    // (nt, nr, ne, method) series whose mean drops between consecutive Pt by
    // more than two combined standard errors.
    std::vector<std::string> noisy_series;
};
PowerSweepResult run_power_sweep(const ExperimentSpec& spec);

enum class OutputFormat { Csv, Json, Table };
OutputFormat format_from_string(const std::string& s);

std::string to_csv(const ExperimentResult& r);
std::string to_json(const ExperimentResult& r);
std::string to_table(const ExperimentResult& r);
ExperimentResult result_from_json(const std::string& text);

// Writes to `path` ("-" for stdout). Throws IoError.
void emit(const ExperimentResult& r, OutputFormat format, const std::string& path);

// ROTAPREC_THREADS if set and positive, otherwise 0 (hardware concurrency).
unsigned threads_from_env();

}  // namespace rotaprec
