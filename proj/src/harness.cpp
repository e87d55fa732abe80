#include "rotaprec/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace rotaprec {

std::string to_string(Method m) {
    switch (m) {
        case Method::RotationBfgs: return "rotation-bfgs";
        case Method::Gsvd: return "gsvd";
        case Method::Oracle: return "oracle";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "rotation-bfgs") return Method::RotationBfgs;
    if (s == "gsvd") return Method::Gsvd;
    if (s == "oracle") return Method::Oracle;
    throw ArgumentError("unknown method '" + s + "' (expected rotation-bfgs, gsvd or oracle)");
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    if (s == "table") return OutputFormat::Table;
    throw ArgumentError("unknown format '" + s + "' (expected csv, json or table)");
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw ArgumentError("experiment: trials must be >= 1");
    if (nt.empty() || nr.empty() || ne.empty() || pt.empty() || methods.empty())
        throw ArgumentError("experiment: nt, nr, ne, pt and methods must be non-empty");
    for (const auto* list : {&nt, &nr, &ne})
        for (int v : *list)
            if (v < 1) throw ArgumentError("experiment: antenna counts must be >= 1");
    for (double p : pt)
        if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("experiment: Pt values must be finite and >= 0");
    if (std::find(methods.begin(), methods.end(), Method::Oracle) != methods.end())
        for (int v : nt)
            if (v > 3) throw ArgumentError("experiment: the oracle method supports nt <= 3 only");
}

bool CellResult::operator==(const CellResult& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    if (std::tie(nt, nr, ne, pt, method, trials, failures, mean_rate, std_error, mean_iters, mean_ms) !=
        std::tie(o.nt, o.nr, o.ne, o.pt, o.method, o.trials, o.failures, o.mean_rate, o.std_error, o.mean_iters,
                 o.mean_ms))
        return false;
    if (rates.size() != o.rates.size()) return false;
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (!same(rates[i], o.rates[i])) return false;
    return true;
}

const CellResult* ExperimentResult::find(int nt, int nr, int ne, double pt, Method m) const {
    for (const auto& c : cells)
        if (c.nt == nt && c.nr == nr && c.ne == ne && c.pt == pt && c.method == m) return &c;
    return nullptr;
}

unsigned threads_from_env() {
    const char* env = std::getenv("ROTAPREC_THREADS");
    if (!env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 0;
    return static_cast<unsigned>(v);
}

namespace {

struct Outcome {
    bool ok = false;
    double rate = 0.0;
    int iterations = 0;
    double ms = 0.0;
};

struct Job {
    int nt, nr, ne, trial;
};

struct Accumulator {
    int trials = 0;
    int failures = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double iters = 0.0;
    double ms = 0.0;
    std::vector<double> rates;
};

Outcome run_method(Method m, const ChannelPair& ch, double pt, const ExperimentSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    switch (m) {
        case Method::RotationBfgs: {
            SolveConfig cfg = spec.solver;
            cfg.pt = pt;
            const SolveOutput s = solve(ch, cfg);
            o.rate = s.solution.rate;
            o.iterations = s.solution.iterations;
            break;
        }
        case Method::Gsvd:
            o.rate = gsvd_baseline(ch, pt).rate;
            break;
        case Method::Oracle: {
            OracleConfig oc = spec.oracle;
            oc.threads = 1;
            o.rate = grid_oracle(ch, pt, oc);
            break;
        }
    }
    o.ok = std::isfinite(o.rate);
    o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

// Runs every (cell, trial) and aggregates in a fixed order, so the result
// does not depend on the number of workers.
ExperimentResult run_cells(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<Job> jobs;
    for (int nt : spec.nt)
        for (int nr : spec.nr)
            for (int ne : spec.ne)
                for (int t = 0; t < spec.trials; ++t) jobs.push_back({nt, nr, ne, t});

    const std::size_t per_job = spec.pt.size() * spec.methods.size();
    std::vector<Outcome> outcomes(jobs.size() * per_job);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const Job& job = jobs[j];
            Outcome* slot = &outcomes[j * per_job];
            try {
                const ChannelPair ch =
                    draw_channel(job.nt, job.nr, job.ne, spec.seed + static_cast<std::uint64_t>(job.trial));
                for (double pt : spec.pt)
                    for (Method m : spec.methods) {
                        try {
                            *slot = run_method(m, ch, pt, spec);
                        } catch (const std::exception&) {
                            *slot = Outcome{};
                        }
                        ++slot;
                    }
            } catch (const std::exception&) {
                // Channel draw failed: every method of this trial counts as a failure.
            }
        }
    };
    unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    using Key = std::tuple<int, int, int, std::size_t, std::size_t>;  // nt, nr, ne, pt index, method index
    std::map<Key, Accumulator> acc;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        for (std::size_t p = 0; p < spec.pt.size(); ++p)
            for (std::size_t m = 0; m < spec.methods.size(); ++m) {
                const Outcome& o = outcomes[j * per_job + p * spec.methods.size() + m];
                Accumulator& a = acc[{job.nt, job.nr, job.ne, p, m}];
                ++a.trials;
                if (spec.keep_trials) a.rates.push_back(o.ok ? o.rate : std::nan(""));
                if (!o.ok) {
                    ++a.failures;
                    continue;
                }
                a.sum += o.rate;
                a.sum_sq += o.rate * o.rate;
                a.iters += o.iterations;
                a.ms += o.ms;
            }
    }

    ExperimentResult result;
    for (auto& [key, a] : acc) {
        const auto& [nt, nr, ne, p, m] = key;
        CellResult c;
        c.nt = nt;
        c.nr = nr;
        c.ne = ne;
        c.pt = spec.pt[p];
        c.method = spec.methods[m];
        c.trials = a.trials;
        c.failures = a.failures;
        const int ok = a.trials - a.failures;
        if (ok > 0) {
            c.mean_rate = a.sum / ok;
            c.mean_iters = a.iters / ok;
            if (spec.timing) c.mean_ms = a.ms / ok;
            if (ok > 1) {
                const double var = std::max(0.0, (a.sum_sq - ok * c.mean_rate * c.mean_rate) / (ok - 1));
                c.std_error = std::sqrt(var / ok);
            }
        } else {
            c.mean_rate = std::nan("");
        }
        c.rates = std::move(a.rates);
        result.cells.push_back(std::move(c));
    }

    std::sort(result.cells.begin(), result.cells.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.nt, a.nr, a.ne, a.pt, a.method) < std::tie(b.nt, b.nr, b.ne, b.pt, b.method);
    });

    for (const auto& c : result.cells) {
        if (c.method != Method::RotationBfgs) continue;
        const CellResult* g = result.find(c.nt, c.nr, c.ne, c.pt, Method::Gsvd);
        Improvement imp{c.nt, c.nr, c.ne, c.pt, std::nullopt, std::nullopt};
        if (g && g->mean_rate != 0.0 && std::isfinite(g->mean_rate) && std::isfinite(c.mean_rate))
            imp.eta_g = (c.mean_rate - g->mean_rate) / g->mean_rate * 100.0;
        result.improvements.push_back(imp);
    }

    for (const auto& c : result.cells) {
        if (c.failures * 100 > c.trials) {
            std::ostringstream os;
            os << c.failures << " of " << c.trials << " trials failed for " << to_string(c.method) << " at nt=" << c.nt
               << " nr=" << c.nr << " ne=" << c.ne << " Pt=" << c.pt;
            throw FailureThresholdExceeded(os.str(), result);
        }
    }
    return result;
}

}  // namespace

ExperimentResult run_table(const ExperimentSpec& spec) { return run_cells(spec); }

PowerSweepResult run_power_sweep(const ExperimentSpec& spec) {
    PowerSweepResult out{run_cells(spec), {}};
    auto& cells = out.result.cells;
    std::stable_sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.nt, a.nr, a.ne, a.method, a.pt) < std::tie(b.nt, b.nr, b.ne, b.method, b.pt);
    });
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const CellResult& a = cells[i - 1];
        const CellResult& b = cells[i];
        if (std::tie(a.nt, a.nr, a.ne, a.method) != std::tie(b.nt, b.nr, b.ne, b.method)) continue;
        const double noise = 2.0 * std::hypot(a.std_error, b.std_error);
        if (b.mean_rate < a.mean_rate - noise) {
            std::ostringstream os;
            os << "nt=" << b.nt << " nr=" << b.nr << " ne=" << b.ne << " " << to_string(b.method) << " Pt=" << b.pt;
            out.noisy_series.push_back(os.str());
        }
    }
    return out;
}

namespace {

std::string num17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

}  // namespace

std::string to_csv(const ExperimentResult& r) {
    std::string s = "nt,nr,ne,Pt,method,mean_rate,stderr,mean_iters,mean_ms,failures\n";
    for (const auto& c : r.cells) {
        s += std::to_string(c.nt) + ',' + std::to_string(c.nr) + ',' + std::to_string(c.ne) + ',' + num17(c.pt) + ',' +
             to_string(c.method) + ',' + num17(c.mean_rate) + ',' + num17(c.std_error) + ',' + num17(c.mean_iters) +
             ',' + (c.mean_ms ? num17(*c.mean_ms) : std::string()) + ',' + std::to_string(c.failures) + '\n';
    }
    return s;
}

std::string to_json(const ExperimentResult& r) {
    nlohmann::json j;
    j["rng"] = r.rng;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells) {
        nlohmann::json cj{{"nt", c.nt},
                          {"nr", c.nr},
                          {"ne", c.ne},
                          {"Pt", c.pt},
                          {"method", to_string(c.method)},
                          {"trials", c.trials},
                          {"failures", c.failures},
                          {"mean_rate", number_or_null(c.mean_rate)},
                          {"stderr", c.std_error},
                          {"mean_iters", c.mean_iters},
                          {"mean_ms", c.mean_ms ? nlohmann::json(*c.mean_ms) : nlohmann::json(nullptr)}};
        if (!c.rates.empty()) {
            cj["rates"] = nlohmann::json::array();
            for (double x : c.rates) cj["rates"].push_back(number_or_null(x));
        }
        j["cells"].push_back(std::move(cj));
    }
    j["improvements"] = nlohmann::json::array();
    for (const auto& i : r.improvements) {
        j["improvements"].push_back({{"nt", i.nt},
                                     {"nr", i.nr},
                                     {"ne", i.ne},
                                     {"Pt", i.pt},
                                     {"eta_g", i.eta_g ? nlohmann::json(*i.eta_g) : nlohmann::json(nullptr)},
                                     {"eta_a", nullptr}});
    }
    return j.dump(2) + "\n";
}

ExperimentResult result_from_json(const std::string& text) {
    ExperimentResult r;
    try {
        const auto j = nlohmann::json::parse(text);
        r.rng = j.at("rng").get<std::string>();
        for (const auto& cj : j.at("cells")) {
            CellResult c;
            c.nt = cj.at("nt").get<int>();
            c.nr = cj.at("nr").get<int>();
            c.ne = cj.at("ne").get<int>();
            c.pt = cj.at("Pt").get<double>();
            c.method = method_from_string(cj.at("method").get<std::string>());
            c.trials = cj.at("trials").get<int>();
            c.failures = cj.at("failures").get<int>();
            c.mean_rate = number_from(cj.at("mean_rate"));
            c.std_error = cj.at("stderr").get<double>();
            c.mean_iters = cj.at("mean_iters").get<double>();
            if (!cj.at("mean_ms").is_null()) c.mean_ms = cj.at("mean_ms").get<double>();
            if (cj.contains("rates"))
                for (const auto& x : cj.at("rates")) c.rates.push_back(number_from(x));
            r.cells.push_back(std::move(c));
        }
        for (const auto& ij : j.at("improvements")) {
            Improvement i;
            i.nt = ij.at("nt").get<int>();
            i.nr = ij.at("nr").get<int>();
            i.ne = ij.at("ne").get<int>();
            i.pt = ij.at("Pt").get<double>();
            if (!ij.at("eta_g").is_null()) i.eta_g = ij.at("eta_g").get<double>();
            r.improvements.push_back(i);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("experiment json: ") + e.what());
    }
    return r;
}

std::string to_table(const ExperimentResult& r) {
    std::ostringstream os;
    char buf[64];
    std::map<std::tuple<int, double>, std::pair<std::vector<int>, std::vector<int>>> blocks;
    for (const auto& c : r.cells) {
        auto& [nrs, nes] = blocks[{c.nt, c.pt}];
        if (std::find(nrs.begin(), nrs.end(), c.nr) == nrs.end()) nrs.push_back(c.nr);
        if (std::find(nes.begin(), nes.end(), c.ne) == nes.end()) nes.push_back(c.ne);
    }
    for (auto& [key, axes] : blocks) {
        const auto& [nt, pt] = key;
        auto& [nrs, nes] = axes;
        std::sort(nrs.begin(), nrs.end());
        std::sort(nes.begin(), nes.end());
        std::snprintf(buf, sizeof buf, "%g", pt);
        os << "Achievable rate (in bps/Hz) of each method for nt = " << nt << " and Pt = " << buf << "W\n";
        for (Method m : {Method::RotationBfgs, Method::Gsvd, Method::Oracle}) {
            bool present = false;
            for (const auto& c : r.cells) present = present || (c.nt == nt && c.pt == pt && c.method == m);
            if (!present) continue;
            os << "\n" << to_string(m) << "\n" << "nr\\ne";
            for (int ne : nes) {
                std::snprintf(buf, sizeof buf, "%8d", ne);
                os << buf;
            }
            os << "\n";
            for (int nr : nrs) {
                std::snprintf(buf, sizeof buf, "%5d", nr);
                os << buf;
                for (int ne : nes) {
                    const CellResult* c = r.find(nt, nr, ne, pt, m);
                    if (c) std::snprintf(buf, sizeof buf, "%8.2f", c->mean_rate);
                    else std::snprintf(buf, sizeof buf, "%8s", "-");
                    os << buf;
                }
                os << "\n";
            }
        }
        bool any_eta = false;
        for (const auto& i : r.improvements) any_eta = any_eta || (i.nt == nt && i.pt == pt && i.eta_g);
        if (any_eta) {
            os << "\neta_g (%)\nnr\\ne";
            for (int ne : nes) {
                std::snprintf(buf, sizeof buf, "%8d", ne);
                os << buf;
            }
            os << "\n";
            for (int nr : nrs) {
                std::snprintf(buf, sizeof buf, "%5d", nr);
                os << buf;
                for (int ne : nes) {
                    const Improvement* found = nullptr;
                    for (const auto& i : r.improvements)
                        if (i.nt == nt && i.nr == nr && i.ne == ne && i.pt == pt) found = &i;
                    if (found && found->eta_g) std::snprintf(buf, sizeof buf, "%8.2f", *found->eta_g);
                    else std::snprintf(buf, sizeof buf, "%8s", "-");
                    os << buf;
                }
                os << "\n";
            }
        }
        os << "\n";
    }
    return os.str();
}

void emit(const ExperimentResult& r, OutputFormat format, const std::string& path) {
    std::string text;
    switch (format) {
        case OutputFormat::Csv: text = to_csv(r); break;
        case OutputFormat::Json: text = to_json(r); break;
        case OutputFormat::Table: text = to_table(r); break;
    }
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rotaprec
