// Command-line front end: generate datasets, run single solves, execute
// benchmark configs, run the theory-verification suite, render reports.
// Exit codes: 0 success, 1 usage/runtime error, 2 check violations.

#include <qtomo/harness.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace qtomo;

NoiseKind parse_noise(const std::string& spec, double& param) {
    // "none" | "gaussian:0.05" | "fixed_norm:1e-3"
    const size_t colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    param = (colon == std::string::npos) ? 0.0 : std::stod(spec.substr(colon + 1));
    if (kind == "none") return NoiseKind::none;
    if (kind == "gaussian" || kind == "gaussian_sigma") return NoiseKind::gaussian_sigma;
    if (kind == "fixed_norm") return NoiseKind::fixed_norm;
    throw CLI::ValidationError("--noise", "unknown noise kind '" + kind + "'");
}

int cmd_generate(int n, Index r, Index m, double c_sam, const std::string& noise,
                 const std::string& state, double tail_decay, double tail_mass,
                 std::uint64_t seed, const std::string& out) {
    const Index d = Index(1) << n;
    if (m == 0) m = Index(std::ceil(c_sam * double(r) * double(d)));
    StateSpec sspec;
    sspec.n_qubits = n;
    sspec.rank = int(r);
    sspec.kind = (state == "pure") ? StateKind::pure
                 : (state == "low_rank") ? StateKind::low_rank
                                         : StateKind::near_low_rank;
    sspec.tail_decay = tail_decay;
    sspec.tail_mass = tail_mass;
    sspec.seed = seed;
    GroundTruth gt = random_state(sspec);
    Dataset ds;
    ds.ensemble = sample_ensemble(n, m, seed + 1);
    double noise_param = 0;
    const NoiseKind nk = parse_noise(noise, noise_param);
    ds.measurements = (sspec.kind == StateKind::near_low_rank)
                          ? generate_measurements(ds.ensemble, gt.rho, nk, noise_param, seed + 2)
                          : generate_measurements(ds.ensemble, gt.factor, nk, noise_param, seed + 2);
    std::filesystem::create_directories(out);
    save_dataset(out + "/dataset.txt", ds);
    save_factor(out + "/truth_factor.txt", gt.factor);
    std::cout << "wrote " << out << "/dataset.txt (n=" << n << " m=" << m << ") and truth_factor.txt\n";
    return 0;
}

int cmd_run(const std::string& data, const std::string& algo, Index rank, const std::string& step,
            const std::string& init, double tol, Index max_iters, std::uint64_t seed,
            const std::string& truth_path, const std::string& trace_out,
            const std::string& factor_out) {
    Dataset ds = load_dataset(data);
    Factor truth_factor;
    DensityMatrix truth_rho;
    TruthRef truth;
    if (!truth_path.empty()) {
        truth_factor = load_factor(truth_path);
        truth_rho = truth_factor.to_dense();
        truth.factor = &truth_factor;
        truth.rho = &truth_rho;
    }
    TraceLog log;
    double final_err = std::numeric_limits<double>::quiet_NaN();
    if (algo == "projfgd") {
        SolverConfig cfg;
        cfg.rank = rank;
        cfg.tol = tol;
        cfg.max_iters = max_iters;
        cfg.seed = seed;
        cfg.step_kind = (step == "theory") ? StepKind::theory : StepKind::practical;
        cfg.init_kind = (init == "random") ? InitKind::random
                        : (init == "psd") ? InitKind::psd_truncation
                                          : InitKind::projected_gradient_at_zero;
        auto [A, l] = run(cfg, ds.ensemble, ds.measurements, truth);
        log = std::move(l);
        if (truth.factor) final_err = frobenius_rel_error(A, truth_rho);
        if (!factor_out.empty()) save_factor(factor_out, A);
    } else if (algo == "rsvp" || algo == "sparse_approx_sdp") {
        BaselineConfig cfg;
        cfg.rank = rank;
        cfg.tol = tol;
        cfg.max_iters = max_iters;
        cfg.seed = seed;
        auto [rho, l] = (algo == "rsvp") ? run_rsvp(cfg, ds.ensemble, ds.measurements, truth)
                                         : run_sparse_approx_sdp(cfg, ds.ensemble, ds.measurements, truth);
        log = std::move(l);
        if (truth.factor) final_err = frobenius_rel_error(rho, truth_rho);
        if (!factor_out.empty()) save_factor(factor_out, factor_from_dense(rho, rank));
    } else {
        throw CLI::ValidationError("--algo", "unknown algorithm '" + algo + "'");
    }
    if (!trace_out.empty()) save_trace_csv(trace_out, log);
    std::cout << "iters=" << (log.rows.empty() ? 0 : log.rows.back().iter)
              << " objective=" << (log.rows.empty() ? 0.0 : log.rows.back().objective);
    if (truth.factor) std::cout << " rel_frob_error=" << final_err;
    std::cout << "\n";
    return 0;
}

int cmd_bench(const std::string& config_path, std::string out) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (!out.empty()) cfg.out_dir = out;
    std::vector<RunRecord> records = run_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    {
        auto f = detail::open_out(cfg.out_dir + "/results.json");
        f << records_json(records).dump(2) << "\n";
    }
    {
        auto f = detail::open_out(cfg.out_dir + "/table.txt");
        f << emit_table(records);
    }
    {
        auto f = detail::open_out(cfg.out_dir + "/table.csv");
        f << emit_table_csv(records);
    }
    if (cfg.save_traces) {
        emit_plotdata(records, cfg.out_dir + "/plots");
        std::filesystem::create_directories(cfg.out_dir + "/traces");
        for (const RunRecord& rec : records)
            for (size_t t = 0; t < rec.traces.size(); ++t)
                save_trace_csv(cfg.out_dir + "/traces/" + rec.algorithm + "_n" + std::to_string(rec.n) +
                                   "_r" + std::to_string(rec.r) + "_trial" + std::to_string(t) + ".csv",
                               rec.traces[t]);
    }
    std::cout << emit_table(records);
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
    std::vector<CheckReport> reports;
    auto want = [&suite](const char* name) { return suite == "all" || suite == name; };

    if (want("rip")) {
        SensingEnsemble complete = sample_ensemble(2, 16, seed);
        auto [p1, r1] = rip_probe(complete, 1, 50, seed + 1);
        r1.name = "rip_complete_basis";
        if (p1.delta_4r > 1e-10) ++r1.violations;  // exact isometry expected at m = 4^n
        reports.push_back(r1);
        SensingEnsemble ens = sample_ensemble(4, 3 * 16, seed + 2);
        auto [p2, r2] = rip_probe(ens, 1, 100, seed + 3);
        reports.push_back(r2);
    }
    if (want("lemma17")) reports.push_back(check_lemma17(1000, 16, 3, seed + 10));
    if (want("xi")) {
        StateSpec sspec;
        sspec.n_qubits = 4;
        sspec.seed = seed + 20;
        GroundTruth gt = random_state(sspec);
        SensingEnsemble ens = sample_ensemble(4, 48, seed + 21);
        MeasurementSet meas = generate_measurements(ens, gt.factor, NoiseKind::none, 0.0, seed + 22);
        SolverConfig cfg;
        cfg.step_kind = StepKind::theory;
        cfg.max_iters = 500;
        cfg.seed = seed + 23;
        auto [A, log] = run(cfg, ens, meas, TruthRef{&gt.factor, &gt.rho});
        reports.push_back(check_xi_bound(log, StepKind::theory));
    }
    if (want("contraction")) {
        for (int k = 0; k < 5; ++k) {
            CheckReport rep = run_basin_contraction(5, 1, seed + 30 + std::uint64_t(k) * 7);
            rep.name += "_seed" + std::to_string(k);
            reports.push_back(rep);
        }
    }
    if (want("init")) {
        Index ok = 0;
        CheckReport agg;
        agg.name = "init_radius_20_seeds";
        agg.worst_margin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 20; ++k) {
            const std::uint64_t s = seed + 50 + std::uint64_t(k) * 11;
            StateSpec sspec;
            sspec.n_qubits = 4;
            sspec.seed = s;
            GroundTruth gt = random_state(sspec);
            SensingEnsemble ens = sample_ensemble(4, 3 * 16, s + 1);
            MeasurementSet meas = generate_measurements(ens, gt.factor, NoiseKind::none, 0.0, s + 2);
            auto [params, prep] = rip_probe(ens, 1, 50, s + 3);
            SolverConfig cfg;
            cfg.seed = s + 4;
            CheckReport rep = check_init_radius(cfg, ens, meas, gt, params.delta_4r);
            agg.trials += 1;
            agg.violations += rep.violations;
            agg.worst_margin = std::min(agg.worst_margin, rep.worst_margin);
            if (rep.violations == 0) ++ok;
        }
        agg.details = std::to_string(ok) + "/20 seeds satisfy the Lemma 6 bound";
        reports.push_back(agg);
    }
    if (want("obtuse")) reports.push_back(check_projection_obtuse(1000, seed + 90));

    if (reports.empty()) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return 1;
    }
    Index violations = 0;
    for (const CheckReport& r : reports) {
        std::cout << check_report_text(r) << "\n";
        violations += r.violations;
    }
    if (!out.empty()) save_check_reports(out, reports);
    return violations == 0 ? 0 : 2;
}

int cmd_report(const std::string& results_dir) {
    auto f = detail::open_in(results_dir + "/results.json");
    nlohmann::json arr = nlohmann::json::parse(f);
    std::vector<RunRecord> records;
    for (const auto& j : arr) {
        RunRecord r;
        r.n = j.at("n").get<int>();
        r.r = j.at("r").get<Index>();
        r.m = j.at("m").get<Index>();
        r.algorithm = j.at("algorithm").get<std::string>();
        for (const auto& t : j.at("trials")) {
            TrialResult tr;
            tr.seed = t.at("seed").get<std::uint64_t>();
            tr.rel_frob_error = t.at("rel_frob_error").get<double>();
            tr.infidelity = t.at("infidelity").is_number() ? t.at("infidelity").get<double>()
                                                           : std::numeric_limits<double>::quiet_NaN();
            tr.wall_clock_seconds = t.at("wall_clock_seconds").get<double>();
            tr.iterations = t.at("iterations").get<Index>();
            tr.dataset_hash = t.at("dataset_hash").get<std::uint64_t>();
            r.trials.push_back(tr);
        }
        r.median_error = j.at("median_error").get<double>();
        r.median_time = j.at("median_time").get<double>();
        records.push_back(std::move(r));
    }
    std::cout << emit_table(records);
    auto ft = detail::open_out(results_dir + "/table.txt");
    ft << emit_table(records);
    auto fc = detail::open_out(results_dir + "/table.csv");
    fc << emit_table_csv(records);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank quantum state tomography via projected factored gradient descent"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a ground truth + measurement dataset");
    int g_n = 4;
    Index g_r = 1, g_m = 0;
    double g_csam = 3.0, g_tdecay = 0.5, g_tmass = 0.05;
    std::string g_noise = "none", g_state = "pure", g_out = "data";
    std::uint64_t g_seed = 0;
    gen->add_option("--n", g_n, "number of qubits")->required();
    gen->add_option("--r", g_r, "truth rank");
    gen->add_option("--m", g_m, "number of Pauli strings (overrides --c-sam)");
    gen->add_option("--c-sam", g_csam, "sampling ratio, m = ceil(C_sam * r * d)");
    gen->add_option("--noise", g_noise, "none | gaussian:<sigma> | fixed_norm:<norm>");
    gen->add_option("--state", g_state, "pure | low_rank | near_low_rank");
    gen->add_option("--tail-decay", g_tdecay, "near-low-rank tail eigenvalue decay");
    gen->add_option("--tail-mass", g_tmass, "near-low-rank tail Frobenius mass");
    gen->add_option("--seed", g_seed, "RNG seed");
    gen->add_option("--out", g_out, "output directory");

    // run
    auto* runc = app.add_subcommand("run", "solve one instance from a dataset file");
    std::string r_data, r_algo = "projfgd", r_step = "practical", r_init = "pgd";
    std::string r_truth, r_trace, r_factor;
    Index r_rank = 1, r_maxit = 10000;
    double r_tol = 5e-6;
    std::uint64_t r_seed = 0;
    runc->add_option("--data", r_data, "measurement dataset file")->required();
    runc->add_option("--algo", r_algo, "projfgd | rsvp | sparse_approx_sdp");
    runc->add_option("--rank", r_rank, "solver rank");
    runc->add_option("--step", r_step, "practical | theory");
    runc->add_option("--init", r_init, "pgd | psd | random");
    runc->add_option("--tol", r_tol, "relative-change stopping tolerance");
    runc->add_option("--max-iters", r_maxit, "iteration cap");
    runc->add_option("--seed", r_seed, "RNG seed");
    runc->add_option("--truth", r_truth, "truth factor file (enables error metrics)");
    runc->add_option("--trace-out", r_trace, "TraceLog CSV output path");
    runc->add_option("--factor-out", r_factor, "final factor output path");

    // bench
    auto* bench = app.add_subcommand("bench", "execute an experiment config file");
    std::string b_config, b_out;
    bench->add_option("--config", b_config, "experiment config file")->required();
    bench->add_option("--out", b_out, "output directory (overrides config out_dir)");

    // verify
    auto* ver = app.add_subcommand("verify", "run the theory-verification suite");
    std::string v_suite = "all", v_out;
    std::uint64_t v_seed = 1;
    ver->add_option("--suite", v_suite, "all | rip | lemma17 | xi | contraction | init | obtuse");
    ver->add_option("--seed", v_seed, "RNG seed");
    ver->add_option("--out", v_out, "machine-readable report file (JSON)");

    // report
    auto* rep = app.add_subcommand("report", "render tables from a results directory");
    std::string p_dir;
    rep->add_option("--results", p_dir, "directory containing results.json")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed())
            return cmd_generate(g_n, g_r, g_m, g_csam, g_noise, g_state, g_tdecay, g_tmass, g_seed,
                                g_out);
        if (runc->parsed())
            return cmd_run(r_data, r_algo, r_rank, r_step, r_init, r_tol, r_maxit, r_seed, r_truth,
                           r_trace, r_factor);
        if (bench->parsed()) return cmd_bench(b_config, b_out);
        if (ver->parsed()) return cmd_verify(v_suite, v_seed, v_out);
        if (rep->parsed()) return cmd_report(p_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
