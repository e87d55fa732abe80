// rotaprec: secrecy-rate precoding from the command line.
//
//   rotaprec solve --h H.json --g G.json --pt 30
//   rotaprec montecarlo --nt 3 --nr 1..3 --ne 1..3 --pt 30 --trials 1000 --seed 1 --out table.csv
//   rotaprec oracle --h H.json --g G.json --pt 10 --resolution 400
//
// Exit codes: 0 success, 2 argument error, 3 numerical failure, 4 IO error.

#include "rotaprec/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace rotaprec;

enum ExitCode { kOk = 0, kArgument = 2, kNumerical = 3, kIo = 4 };

std::vector<int> parse_range(const std::string& text) {
    std::vector<int> out;
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse antenna count '" + s + "'");
        }
    };
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(part));
            continue;
        }
        const int a = to_int(part.substr(0, dots));
        const int b = to_int(part.substr(dots + 2));
        if (b < a) throw ArgumentError("empty range '" + part + "'");
        for (int v = a; v <= b; ++v) out.push_back(v);
    }
    if (out.empty()) throw ArgumentError("empty antenna list");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse number '" + part + "'");
        }
    }
    if (out.empty()) throw ArgumentError("empty power list");
    return out;
}

nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

BracketMode bracket_from(const std::string& s) {
    if (s == "verbatim") return BracketMode::Verbatim;
    if (s == "descent") return BracketMode::Descent;
    throw ArgumentError("unknown bracket mode '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secrecy-rate precoding for MIMOME wiretap channels"};
    app.require_subcommand(1);

    std::string h_path, g_path, out = "-", init = "gsvd", bracket = "verbatim";
    double pt = 0.0;
    SolveConfig solver;

    auto* solve_cmd = app.add_subcommand("solve", "Rotation-BFGS precoder for one channel pair");
    solve_cmd->set_help_flag("--help", "Print this help message and exit");
    solve_cmd->add_option("--h", h_path, "Legitimate channel H (JSON or CSV)")->required();
    solve_cmd->add_option("--g", g_path, "Eavesdropper channel G (JSON or CSV)")->required();
    solve_cmd->add_option("--pt", pt, "Total transmit power (W)")->required();
    solve_cmd->add_option("--init", init, "Start point: gsvd or identity")->check(CLI::IsMember({"gsvd", "identity"}));
    solve_cmd->add_option("--eps1", solver.eps1, "Gradient step");
    solve_cmd->add_option("--eps2", solver.eps2, "Objective tolerance");
    solve_cmd->add_option("--max-iters", solver.max_iters, "Iteration cap");
    solve_cmd->add_option("--bracket", bracket, "Line-search bracketing: verbatim or descent")
        ->check(CLI::IsMember({"verbatim", "descent"}));
    solve_cmd->add_option("--out", out, "Output path, '-' for stdout");

    std::string nt_list = "3", nr_list = "1", ne_list = "1", pt_list = "30", methods = "rotation-bfgs,gsvd",
                format = "csv";
    int trials = 1000;
    std::uint64_t seed = 1;
    bool timing = false;
    OracleConfig oracle_cfg;
    auto* mc_cmd = app.add_subcommand("montecarlo", "Average rates over seeded Gaussian channels");
    mc_cmd->add_option("--nt", nt_list, "Transmit antennas (N, A..B or list)");
    mc_cmd->add_option("--nr", nr_list, "Receiver antennas (N, A..B or list)");
    mc_cmd->add_option("--ne", ne_list, "Eavesdropper antennas (N, A..B or list)");
    mc_cmd->add_option("--pt", pt_list, "Comma-separated transmit powers (W)");
    mc_cmd->add_option("--trials", trials, "Channel realizations per cell");
    mc_cmd->add_option("--seed", seed, "Base seed; trial t uses seed + t");
    mc_cmd->add_option("--methods", methods, "Comma-separated: rotation-bfgs, gsvd, oracle");
    mc_cmd->add_option("--out", out, "Output path, '-' for stdout");
    mc_cmd->add_option("--format", format, "csv, json or table")->check(CLI::IsMember({"csv", "json", "table"}));
    mc_cmd->add_option("--eps1", solver.eps1, "Gradient step");
    mc_cmd->add_option("--eps2", solver.eps2, "Objective tolerance");
    mc_cmd->add_option("--max-iters", solver.max_iters, "Iteration cap");
    mc_cmd->add_option("--bracket", bracket, "Line-search bracketing: verbatim or descent")
        ->check(CLI::IsMember({"verbatim", "descent"}));
    mc_cmd->add_option("--oracle-resolution", oracle_cfg.resolution, "Oracle grid points per coordinate (nt=2)");
    mc_cmd->add_option("--oracle-samples", oracle_cfg.random_samples, "Oracle random samples (nt=3)");
    mc_cmd->add_flag("--timing", timing, "Record mean wall-clock per solve (output is then not reproducible)");

    int resolution = 400;
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force secrecy rate for nt <= 3");
    oracle_cmd->set_help_flag("--help", "Print this help message and exit");
    oracle_cmd->add_option("--h", h_path, "Legitimate channel H (JSON or CSV)")->required();
    oracle_cmd->add_option("--g", g_path, "Eavesdropper channel G (JSON or CSV)")->required();
    oracle_cmd->add_option("--pt", pt, "Total transmit power (W)")->required();
    oracle_cmd->add_option("--resolution", resolution, "Grid points per coordinate (nt=2)");
    oracle_cmd->add_option("--samples", oracle_cfg.random_samples, "Random samples (nt=3)");
    oracle_cmd->add_option("--seed", oracle_cfg.seed, "Sampling seed (nt=3)");
    oracle_cmd->add_option("--out", out, "Output path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kArgument;
    }

    try {
        solver.bracket = bracket_from(bracket);
        const unsigned threads = threads_from_env();

        if (*solve_cmd) {
            const ChannelPair ch(read_matrix(h_path), read_matrix(g_path));
            solver.pt = pt;
            solver.init = init == "identity" ? InitKind::Identity : InitKind::Gsvd;
            const SolveOutput s = solve(ch, solver);
            std::vector<double> lambda(s.solution.eigenvalues.data(),
                                       s.solution.eigenvalues.data() + s.solution.eigenvalues.size());
            std::vector<double> theta(s.theta.flat().begin(), s.theta.flat().end());
            const nlohmann::json j{{"Q", matrix_json(s.solution.covariance)},
                                   {"V", matrix_json(s.solution.vectors)},
                                   {"lambda", lambda},
                                   {"theta", theta},
                                   {"rate", s.solution.rate},
                                   {"iterations", s.solution.iterations},
                                   {"converged", s.solution.converged},
                                   {"zero_power", s.zero_power}};
            write_text(out, j.dump(2) + "\n");
        } else if (*mc_cmd) {
            ExperimentSpec spec;
            spec.nt = parse_range(nt_list);
            spec.nr = parse_range(nr_list);
            spec.ne = parse_range(ne_list);
            spec.pt = parse_doubles(pt_list);
            spec.trials = trials;
            spec.seed = seed;
            spec.methods.clear();
            std::stringstream ms(methods);
            for (std::string m; std::getline(ms, m, ',');) spec.methods.push_back(method_from_string(m));
            spec.solver = solver;
            spec.oracle = oracle_cfg;
            spec.threads = threads;
            spec.timing = timing;
            const OutputFormat fmt = format_from_string(format);
            try {
                if (spec.pt.size() > 1) {
                    const PowerSweepResult sweep = run_power_sweep(spec);
                    for (const auto& s : sweep.noisy_series) std::cerr << "warning: rate drops with Pt: " << s << "\n";
                    emit(sweep.result, fmt, out);
                } else {
                    emit(run_table(spec), fmt, out);
                }
            } catch (const FailureThresholdExceeded& e) {
                emit(e.result, fmt, out);
                throw;
            }
        } else if (*oracle_cmd) {
            const ChannelPair ch(read_matrix(h_path), read_matrix(g_path));
            oracle_cfg.resolution = resolution;
            oracle_cfg.threads = threads;
            const double rate = grid_oracle(ch, pt, oracle_cfg);
            const nlohmann::json j{{"rate", rate},
                                   {"nt", ch.nt()},
                                   {"search", ch.nt() == 3 ? "random" : "grid"},
                                   {"resolution", resolution},
                                   {"samples", oracle_cfg.random_samples}};
            write_text(out, j.dump(2) + "\n");
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kArgument;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
