#ifndef QTOMO_IO_HPP
#define QTOMO_IO_HPP

// File formats: measurement dataset, factor files, TraceLog CSV and the
// machine-readable check-report output. All text, full double precision
// (17 significant digits), bit-exact round trips on y and factor entries.

#include "pauli.hpp"
#include "projfgd.hpp"
#include "verify.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include <nlohmann/json.hpp>

namespace qtomo {

struct Dataset {
    SensingEnsemble ensemble;
    MeasurementSet measurements;
};

inline const char* noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::gaussian_sigma: return "gaussian_sigma";
        default: return "fixed_norm";
    }
}

inline NoiseKind noise_kind_from(const std::string& s) {
    if (s == "none") return NoiseKind::none;
    if (s == "gaussian_sigma") return NoiseKind::gaussian_sigma;
    if (s == "fixed_norm") return NoiseKind::fixed_norm;
    throw std::invalid_argument("unknown noise kind: " + s);
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << std::setprecision(17);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return f;
}

inline void expect_tag(std::istream& in, const std::string& tag, const std::string& path) {
    std::string got;
    if (!(in >> got) || got != tag)
        throw std::runtime_error(path + ": expected '" + tag + "', got '" + got + "'");
}

}  // namespace detail

inline void save_dataset(const std::string& path, const Dataset& ds) {
    auto f = detail::open_out(path);
    f << "# pauli measurement dataset v1\n";
    f << "n " << ds.ensemble.n_qubits << "\n";
    f << "m " << ds.ensemble.m() << "\n";
    f << "seed " << ds.ensemble.seed << "\n";
    f << "normalization " << ds.ensemble.normalization << "\n";
    f << "noise " << noise_kind_name(ds.measurements.noise_kind) << " " << ds.measurements.noise_param
      << " " << ds.measurements.seed << "\n";
    f << "paulis\n";
    for (const PauliString& p : ds.ensemble.paulis) f << p.x_mask << " " << p.z_mask << "\n";
    f << "y\n";
    for (Index i = 0; i < ds.measurements.y.size(); ++i) f << ds.measurements.y[i] << "\n";
}

inline Dataset load_dataset(const std::string& path) {
    auto f = detail::open_in(path);
    std::string header;
    std::getline(f, header);
    if (header.rfind("# pauli measurement dataset", 0) != 0)
        throw std::runtime_error(path + ": not a measurement dataset file");
    Dataset ds;
    Index m = 0;
    detail::expect_tag(f, "n", path);
    f >> ds.ensemble.n_qubits;
    detail::expect_tag(f, "m", path);
    f >> m;
    detail::expect_tag(f, "seed", path);
    f >> ds.ensemble.seed;
    detail::expect_tag(f, "normalization", path);
    f >> ds.ensemble.normalization;
    detail::expect_tag(f, "noise", path);
    std::string kind;
    f >> kind >> ds.measurements.noise_param >> ds.measurements.seed;
    ds.measurements.noise_kind = noise_kind_from(kind);
    detail::expect_tag(f, "paulis", path);
    ds.ensemble.paulis.resize(size_t(m));
    for (Index i = 0; i < m; ++i) {
        auto& p = ds.ensemble.paulis[size_t(i)];
        p.n_qubits = ds.ensemble.n_qubits;
        f >> p.x_mask >> p.z_mask;
    }
    detail::expect_tag(f, "y", path);
    ds.measurements.y.resize(m);
    for (Index i = 0; i < m; ++i) f >> ds.measurements.y[i];
    if (!f) throw std::runtime_error(path + ": truncated dataset");
    const double expected = ensemble_normalization(ds.ensemble.n_qubits, m);
    if (std::abs(ds.ensemble.normalization - expected) > 1e-12 * expected)
        throw std::runtime_error(path + ": normalization inconsistent with (n, m)");
    return ds;
}

inline void save_factor(const std::string& path, const Factor& A) {
    auto f = detail::open_out(path);
    f << "# factor v1\n";
    f << A.dim() << " " << A.rank() << "\n";
    for (Index i = 0; i < A.dim(); ++i)
        for (Index j = 0; j < A.rank(); ++j)
            f << A.data(i, j).real() << " " << A.data(i, j).imag() << "\n";
}

inline Factor load_factor(const std::string& path) {
    auto f = detail::open_in(path);
    std::string header;
    std::getline(f, header);
    if (header.rfind("# factor", 0) != 0) throw std::runtime_error(path + ": not a factor file");
    Index d = 0, r = 0;
    f >> d >> r;
    Factor A;
    A.data.resize(d, r);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < r; ++j) {
            double re, im;
            f >> re >> im;
            A.data(i, j) = Complex(re, im);
        }
    if (!f) throw std::runtime_error(path + ": truncated factor file");
    return A;
}

inline void save_trace_csv(const std::string& path, const TraceLog& log) {
    auto f = detail::open_out(path);
    f << "iter, time_s, objective, rel_frob_error, dist, xi, eta\n";
    for (const TraceRecord& r : log.rows)
        f << r.iter << ", " << r.time_s << ", " << r.objective << ", " << r.rel_frob_error << ", "
          << r.dist << ", " << r.xi << ", " << r.eta << "\n";
}

inline nlohmann::json check_report_json(const CheckReport& rep) {
    return nlohmann::json{{"name", rep.name},
                          {"trials", rep.trials},
                          {"violations", rep.violations},
                          {"worst_margin", rep.worst_margin},
                          {"details", rep.details}};
}

inline void save_check_reports(const std::string& path, const std::vector<CheckReport>& reps) {
    auto f = detail::open_out(path);
    nlohmann::json arr = nlohmann::json::array();
    for (const CheckReport& r : reps) arr.push_back(check_report_json(r));
    f << arr.dump(2) << "\n";
}

inline std::string check_report_text(const CheckReport& rep) {
    std::ostringstream os;
    os << (rep.violations == 0 ? "[ok]  " : "[FAIL] ") << rep.name << ": trials=" << rep.trials
       << " violations=" << rep.violations << " worst_margin=" << rep.worst_margin << " — "
       << rep.details;
    return os.str();
}

}  // namespace qtomo

#endif
