#ifndef QTOMO_HARNESS_HPP
#define QTOMO_HARNESS_HPP

// Experiment orchestration: config-driven Monte Carlo sweeps over
// (n, r, m, noise), median aggregation, table output and plot-data CSVs.

#include "baselines.hpp"
#include "io.hpp"

#include <map>

namespace qtomo {

enum class MRule { c_sam, log_rule, explicit_m };

struct ExperimentConfig {
    std::vector<int> n_list;
    std::vector<Index> r_list;
    MRule m_rule = MRule::c_sam;
    double c_sam = 3.0;
    Index m_explicit = 0;
    NoiseKind noise_kind = NoiseKind::none;
    double noise_param = 0;
    std::vector<std::string> algorithms{"projfgd"};
    Index trials = 1;
    std::uint64_t base_seed = 0;
    std::string out_dir = "results";
    // state generation
    StateKind state_kind = StateKind::pure;
    double tail_decay = 0.5;
    double tail_mass = 0.05;
    // solver overrides
    double tol = 5e-6;
    Index max_iters = 10000;
    Index sas_max_iters = 10000;  // separate cap: Frank-Wolfe never meets the tol rule
    StepKind step_kind = StepKind::practical;
    InitKind init_kind = InitKind::projected_gradient_at_zero;
    Index log_every = 1;
    int dense_cap = 10;
    bool save_traces = true;
};

struct TrialResult {
    std::uint64_t seed = 0;
    double rel_frob_error = 0;
    double infidelity = std::numeric_limits<double>::quiet_NaN();
    double wall_clock_seconds = 0;
    Index iterations = 0;
    std::uint64_t dataset_hash = 0;
};

struct RunRecord {
    int n = 0;
    Index r = 0;
    Index m = 0;
    std::string algorithm;
    std::vector<TrialResult> trials;
    double median_error = 0;
    double median_time = 0;
    std::vector<TraceLog> traces;  // one per trial (kept when save_traces)
};

inline Index resolve_m(const ExperimentConfig& cfg, int n, Index r) {
    const Index d = Index(1) << n;
    Index m;
    switch (cfg.m_rule) {
        case MRule::c_sam: m = Index(std::ceil(cfg.c_sam * double(r) * double(d))); break;
        case MRule::log_rule:
            m = Index(std::ceil((7.0 / 3.0) * double(r) * double(d) * std::log(double(d))));
            break;
        default: m = cfg.m_explicit;
    }
    const double total = std::pow(4.0, n);
    // derived rules saturate at the complete basis; an explicit m must fit
    if (cfg.m_rule != MRule::explicit_m && double(m) > total) m = Index(total);
    if (m < 1 || double(m) > total)
        throw std::invalid_argument("resolve_m: m=" + std::to_string(m) + " infeasible at n=" +
                                    std::to_string(n));
    return m;
}

namespace detail {

inline double median_lower(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

inline std::uint64_t fnv1a(const void* data, size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t dataset_hash(const SensingEnsemble& ens, const MeasurementSet& meas) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const PauliString& p : ens.paulis) {
        h = fnv1a(&p.x_mask, sizeof p.x_mask, h);
        h = fnv1a(&p.z_mask, sizeof p.z_mask, h);
    }
    h = fnv1a(meas.y.data(), size_t(meas.y.size()) * sizeof(double), h);
    return h;
}

}  // namespace detail

inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials >= 1 required");
    std::vector<RunRecord> records;
    for (int n : cfg.n_list) {
        for (Index r : cfg.r_list) {
            const Index m = resolve_m(cfg, n, r);
            for (const std::string& algo : cfg.algorithms) {
                if (algo != "projfgd" && n > cfg.dense_cap)
                    throw std::invalid_argument("run_experiment: baseline '" + algo +
                                                "' needs a dense iterate; n=" + std::to_string(n) +
                                                " exceeds the dense cap " + std::to_string(cfg.dense_cap));
            }

            std::map<std::string, RunRecord> cell;
            for (const std::string& algo : cfg.algorithms) {
                RunRecord rec;
                rec.n = n;
                rec.r = r;
                rec.m = m;
                rec.algorithm = algo;
                cell[algo] = rec;
            }

            for (Index trial = 0; trial < cfg.trials; ++trial) {
                const std::uint64_t seed = cfg.base_seed + std::uint64_t(trial);
                StateSpec sspec;
                sspec.n_qubits = n;
                sspec.rank = int(r);
                sspec.kind = cfg.state_kind;
                sspec.tail_decay = cfg.tail_decay;
                sspec.tail_mass = cfg.tail_mass;
                sspec.seed = seed * 3 + 1;
                GroundTruth gt = random_state(sspec);
                SensingEnsemble ens = sample_ensemble(n, m, seed * 3 + 2);
                MeasurementSet meas =
                    (cfg.state_kind == StateKind::near_low_rank)
                        ? generate_measurements(ens, gt.rho, cfg.noise_kind, cfg.noise_param, seed * 3)
                        : generate_measurements(ens, gt.factor, cfg.noise_kind, cfg.noise_param,
                                                seed * 3);
                const std::uint64_t dhash = detail::dataset_hash(ens, meas);
                const bool want_infid = n <= 10;
                TruthRef truth{&gt.factor, &gt.rho};

                for (const std::string& algo : cfg.algorithms) {
                    TrialResult tr;
                    tr.seed = seed;
                    tr.dataset_hash = dhash;
                    TraceLog log;
                    DensityMatrix est;
                    if (algo == "projfgd") {
                        SolverConfig scfg;
                        scfg.rank = r;
                        scfg.max_iters = cfg.max_iters;
                        scfg.tol = cfg.tol;
                        scfg.init_kind = cfg.init_kind;
                        scfg.step_kind = cfg.step_kind;
                        scfg.seed = seed;
                        scfg.log_every = cfg.log_every;
                        scfg.dense_cap = std::min(cfg.dense_cap, 8);
                        auto [A, l] = run(scfg, ens, meas, truth);
                        log = std::move(l);
                        est = A.to_dense();
                    } else if (algo == "rsvp" || algo == "sparse_approx_sdp") {
                        BaselineConfig bcfg;
                        bcfg.rank = r;
                        bcfg.max_iters = (algo == "rsvp") ? cfg.max_iters : cfg.sas_max_iters;
                        bcfg.tol = cfg.tol;
                        bcfg.seed = seed;
                        bcfg.log_every = cfg.log_every;
                        bcfg.dense_cap = cfg.dense_cap;
                        auto [rho, l] = (algo == "rsvp")
                                            ? run_rsvp(bcfg, ens, meas, truth)
                                            : run_sparse_approx_sdp(bcfg, ens, meas, truth);
                        log = std::move(l);
                        est = std::move(rho);
                    } else {
                        throw std::invalid_argument("run_experiment: unknown algorithm '" + algo + "'");
                    }
                    tr.rel_frob_error = frobenius_rel_error(est, gt.rho);
                    if (want_infid) tr.infidelity = infidelity(est, gt.rho);
                    tr.wall_clock_seconds = log.rows.empty() ? 0 : log.rows.back().time_s;
                    tr.iterations = log.rows.empty() ? 0 : log.rows.back().iter;
                    RunRecord& rec = cell[algo];
                    rec.trials.push_back(tr);
                    if (cfg.save_traces) rec.traces.push_back(std::move(log));
                }
            }

            for (const std::string& algo : cfg.algorithms) {
                RunRecord& rec = cell[algo];
                std::vector<double> errs, times;
                for (const TrialResult& t : rec.trials) {
                    errs.push_back(t.rel_frob_error);
                    times.push_back(t.wall_clock_seconds);
                }
                rec.median_error = detail::median_lower(errs);
                rec.median_time = detail::median_lower(times);
                records.push_back(std::move(rec));
            }
        }
    }
    // keep config order: records were appended per (n, r) cell, algorithms in config order
    std::vector<RunRecord> ordered;
    ordered.reserve(records.size());
    for (int n : cfg.n_list)
        for (Index r : cfg.r_list)
            for (const std::string& algo : cfg.algorithms)
                for (RunRecord& rec : records)
                    if (rec.n == n && rec.r == r && rec.algorithm == algo)
                        ordered.push_back(std::move(rec));
    return ordered;
}

// Aligned text table plus a full-precision CSV twin.
inline std::string emit_table(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_table: no records");
    std::ostringstream os;
    os << std::left << std::setw(4) << "n" << std::setw(5) << "r" << std::setw(8) << "m"
       << std::setw(18) << "algorithm" << std::setw(14) << "error" << std::setw(12) << "time_s"
       << std::setw(14) << "infidelity" << "\n";
    for (const RunRecord& r : records) {
        std::vector<double> inf;
        for (const TrialResult& t : r.trials) inf.push_back(t.infidelity);
        const double med_inf = detail::median_lower(inf);
        os << std::left << std::setw(4) << r.n << std::setw(5) << r.r << std::setw(8) << r.m
           << std::setw(18) << r.algorithm << std::setw(14) << std::setprecision(5) << r.median_error
           << std::setw(12) << std::setprecision(4) << r.median_time << std::setw(14)
           << std::setprecision(5) << med_inf << "\n";
    }
    return os.str();
}

inline std::string emit_table_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "n,r,m,algorithm,trial,seed,rel_frob_error,infidelity,wall_clock_seconds,iterations,"
          "dataset_hash,median_error,median_time\n";
    for (const RunRecord& r : records)
        for (size_t t = 0; t < r.trials.size(); ++t) {
            const TrialResult& tr = r.trials[t];
            os << r.n << "," << r.r << "," << r.m << "," << r.algorithm << "," << t << "," << tr.seed
               << "," << tr.rel_frob_error << "," << tr.infidelity << "," << tr.wall_clock_seconds
               << "," << tr.iterations << "," << tr.dataset_hash << "," << r.median_error << ","
               << r.median_time << "\n";
        }
    return os.str();
}

// One CSV per trace and axis flavor (iteration or cumulative seconds vs error).
inline void emit_plotdata(const std::vector<RunRecord>& records, const std::string& dir) {
    if (records.empty()) throw std::invalid_argument("emit_plotdata: no records");
    std::filesystem::create_directories(dir);
    for (const RunRecord& rec : records)
        for (size_t t = 0; t < rec.traces.size(); ++t) {
            const std::string stem = dir + "/" + rec.algorithm + "_n" + std::to_string(rec.n) + "_r" +
                                     std::to_string(rec.r) + "_trial" + std::to_string(t);
            auto fi = detail::open_out(stem + "_vs_iter.csv");
            auto ft = detail::open_out(stem + "_vs_time.csv");
            fi << "iter,rel_frob_error\n";
            ft << "time_s,rel_frob_error\n";
            for (const TraceRecord& row : rec.traces[t].rows) {
                if (!std::isfinite(row.rel_frob_error)) continue;
                fi << row.iter << "," << row.rel_frob_error << "\n";
                ft << row.time_s << "," << row.rel_frob_error << "\n";
            }
        }
}

inline nlohmann::json records_json(const std::vector<RunRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RunRecord& r : records) {
        nlohmann::json trials = nlohmann::json::array();
        for (const TrialResult& t : r.trials)
            trials.push_back({{"seed", t.seed},
                              {"rel_frob_error", t.rel_frob_error},
                              {"infidelity", t.infidelity},
                              {"wall_clock_seconds", t.wall_clock_seconds},
                              {"iterations", t.iterations},
                              {"dataset_hash", t.dataset_hash}});
        arr.push_back({{"n", r.n},
                       {"r", r.r},
                       {"m", r.m},
                       {"algorithm", r.algorithm},
                       {"trials", trials},
                       {"median_error", r.median_error},
                       {"median_time", r.median_time}});
    }
    return arr;
}

// ---- flat key = value config files ----------------------------------------

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            size_t a = cur.find_first_not_of(" \t");
            size_t b = cur.find_last_not_of(" \t");
            if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.n_list.clear();
    cfg.r_list.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            const size_t b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n") {
                for (const auto& s : split_list(val)) cfg.n_list.push_back(std::stoi(s));
            } else if (key == "r") {
                for (const auto& s : split_list(val)) cfg.r_list.push_back(std::stol(s));
            } else if (key == "m_rule") {
                auto parts = split_list(val);  // "c_sam 3" | "log_rule" | "explicit 128"
                std::istringstream ss(parts.at(0));
                std::string rule;
                ss >> rule;
                if (rule == "c_sam") { cfg.m_rule = MRule::c_sam; ss >> cfg.c_sam; }
                else if (rule == "log_rule") cfg.m_rule = MRule::log_rule;
                else if (rule == "explicit") { cfg.m_rule = MRule::explicit_m; ss >> cfg.m_explicit; }
                else throw std::invalid_argument("unknown m_rule '" + rule + "'");
            } else if (key == "noise") {
                std::istringstream ss(val);
                std::string kind;
                ss >> kind;
                if (kind == "none") cfg.noise_kind = NoiseKind::none;
                else { cfg.noise_kind = noise_kind_from(kind); ss >> cfg.noise_param; }
            } else if (key == "algorithms") {
                cfg.algorithms = split_list(val);
            } else if (key == "trials") cfg.trials = std::stol(val);
            else if (key == "base_seed") cfg.base_seed = std::stoull(val);
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "state") {
                if (val == "pure") cfg.state_kind = StateKind::pure;
                else if (val == "low_rank") cfg.state_kind = StateKind::low_rank;
                else if (val == "near_low_rank") cfg.state_kind = StateKind::near_low_rank;
                else throw std::invalid_argument("unknown state kind '" + val + "'");
            } else if (key == "tail_decay") cfg.tail_decay = std::stod(val);
            else if (key == "tail_mass") cfg.tail_mass = std::stod(val);
            else if (key == "tol") cfg.tol = std::stod(val);
            else if (key == "max_iters") cfg.max_iters = std::stol(val);
            else if (key == "sas_max_iters") cfg.sas_max_iters = std::stol(val);
            else if (key == "step") {
                if (val == "theory") cfg.step_kind = StepKind::theory;
                else if (val == "practical") cfg.step_kind = StepKind::practical;
                else throw std::invalid_argument("unknown step kind '" + val + "'");
            } else if (key == "init") {
                if (val == "random") cfg.init_kind = InitKind::random;
                else if (val == "pgd" || val == "projected_gradient_at_zero")
                    cfg.init_kind = InitKind::projected_gradient_at_zero;
                else if (val == "psd" || val == "psd_truncation") cfg.init_kind = InitKind::psd_truncation;
                else throw std::invalid_argument("unknown init kind '" + val + "'");
            } else if (key == "log_every") cfg.log_every = std::stol(val);
            else if (key == "dense_cap") cfg.dense_cap = std::stoi(val);
            else if (key == "save_traces") cfg.save_traces = (val == "true" || val == "1");
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (cfg.n_list.empty() || cfg.r_list.empty())
        throw std::invalid_argument("config: 'n' and 'r' are required");
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    auto f = detail::open_in(path);
    return parse_experiment_config(f);
}

}  // namespace qtomo

#endif
