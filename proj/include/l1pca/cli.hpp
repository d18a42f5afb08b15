#pragma once

// Command-line front end. Every verb builds a JSON run report whose "config"
// block can be fed back through --config to reproduce the run exactly.
//
//   l1pca   exact or baseline components of a samples-as-rows CSV
//   oracle  brute-force objective values for cross-checking
//   exp-dr  outlier-robust dimensionality-reduction study
//   exp-doa L1/L2 MUSIC direction-of-arrival study

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1pca/baselines.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/experiments.hpp"
#include "l1pca/io.hpp"
#include "l1pca/l1_multi.hpp"
#include "l1pca/l1_single.hpp"

namespace l1pca::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kCapExceeded = 3 };

// ---------------------------------------------------------------------------
// JSON conversions

inline json vector_json(const RealVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline RealVector vector_from_json(const json& j) {
    RealVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

/// Columns of a matrix as a list of arrays.
inline json columns_json(const RealMatrix& M) {
    json a = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) a.push_back(vector_json(M.col(k)));
    return a;
}

inline json matrix_rows_json(const RealMatrix& M) { return columns_json(M.transpose()); }

inline RealMatrix matrix_from_rows_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
    const std::size_t cols = j.at(0).size();
    RealMatrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j.at(r).size() != cols) throw InvalidArgument("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j.at(r).at(c).get<double>();
    }
    return M;
}

inline json to_json(const DrConfig& c) {
    json outliers = json::array();
    for (const auto& o : c.outliers) outliers.push_back(vector_json(o));
    return {{"n_train", c.n_train}, {"mean", vector_json(c.mean)},  {"cov", matrix_rows_json(c.cov)},
            {"outliers", outliers}, {"n_eval", c.n_eval},           {"seed", c.seed}};
}

inline DrConfig dr_config_from_json(const json& j, DrConfig c = {}) {
    if (j.contains("n_train")) c.n_train = j.at("n_train").get<int>();
    if (j.contains("mean")) c.mean = vector_from_json(j.at("mean"));
    if (j.contains("cov")) c.cov = matrix_from_rows_json(j.at("cov"));
    if (j.contains("outliers")) {
        c.outliers.clear();
        for (const auto& o : j.at("outliers")) c.outliers.push_back(vector_from_json(o));
    }
    if (j.contains("n_eval")) c.n_eval = j.at("n_eval").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

inline json to_json(const DoaConfig& c) {
    return {{"n_elements", c.n_elements},
            {"n_snapshots", c.n_snapshots},
            {"thetas", c.thetas},
            {"snrs_db", c.snrs_db},
            {"jammer", c.jammer},
            {"jammer_theta", c.jammer_theta},
            {"jammer_snr_db", c.jammer_snr_db},
            {"corrupt_index", c.corrupt_index ? json(*c.corrupt_index) : json(nullptr)},
            {"noise_var", c.noise_var},
            {"grid_step", c.grid_step},
            {"random_phase", c.random_phase},
            {"K", c.K},
            {"success_window", c.success_window},
            {"peak_separation", c.peak_separation},
            {"jammer_window", c.jammer_window},
            {"seed", c.seed}};
}

inline DoaConfig doa_config_from_json(const json& j, DoaConfig c = {}) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_elements", c.n_elements);
    get("n_snapshots", c.n_snapshots);
    get("thetas", c.thetas);
    get("snrs_db", c.snrs_db);
    get("jammer", c.jammer);
    get("jammer_theta", c.jammer_theta);
    get("jammer_snr_db", c.jammer_snr_db);
    if (j.contains("corrupt_index")) {
        const auto& v = j.at("corrupt_index");
        c.corrupt_index = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
    }
    get("noise_var", c.noise_var);
    get("grid_step", c.grid_step);
    get("random_phase", c.random_phase);
    get("K", c.K);
    get("success_window", c.success_window);
    get("peak_separation", c.peak_separation);
    get("jammer_window", c.jammer_window);
    get("seed", c.seed);
    return c;
}

inline json base_report(const std::string& command, json config) {
    return {{"command", command}, {"version", kVersion}, {"seed", config.value("seed", std::uint64_t{0})},
            {"config", std::move(config)}};
}

// ---------------------------------------------------------------------------
// Commands

struct L1pcaConfig {
    std::string input;
    int K = 1;
    std::string method = "optimal";  // optimal | greedy | fixedpoint | l2
    std::uint64_t seed = 0;
    int exhaustive_cap = kDefaultExhaustiveCap;
    int multi_cap = kDefaultMultiCap;
    int restarts = kDefaultRestarts;
};

inline json to_json(const L1pcaConfig& c) {
    return {{"input", c.input},         {"K", c.K},
            {"method", c.method},       {"seed", c.seed},
            {"exhaustive_cap", c.exhaustive_cap}, {"multi_cap", c.multi_cap},
            {"restarts", c.restarts}};
}

inline L1pcaConfig l1pca_config_from_json(const json& j, L1pcaConfig c = {}) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("input", c.input);
    get("K", c.K);
    get("method", c.method);
    get("seed", c.seed);
    get("exhaustive_cap", c.exhaustive_cap);
    get("multi_cap", c.multi_cap);
    get("restarts", c.restarts);
    return c;
}

/// Runs one solver on X (D x N) and reports components and objectives.
inline json cmd_l1pca(const RealMatrix& X, const L1pcaConfig& c) {
    require_finite(X, "X");
    if (c.K < 1 || c.K > X.rows())
        throw InvalidArgument("K must satisfy 1 <= K <= D (D=" + std::to_string(X.rows()) + ")");

    json results;
    RealMatrix R;
    SolverOptions solver;
    solver.exhaustive_cap = c.exhaustive_cap;

    if (c.method == "optimal") {
        if (c.K == 1) {
            const L1Result r = l1pc_optimal(X, solver);
            R = r.component;
            results["algorithm"] = to_string(r.algorithm);
            results["sign_vector"] = r.sign_vector.to_string();
            results["rank"] = r.rank;
            results["evaluated"] = r.evaluated;
            results["elapsed_seconds"] = r.elapsed;
        } else {
            MultiOptions mo;
            mo.multi_cap = c.multi_cap;
            const MultiResult r = l1_multi_optimal(X, c.K, mo);
            R = r.basis.R;
            json cols = json::array();
            for (std::size_t k = 0; k < r.sign_matrix.cols(); ++k) cols.push_back(r.sign_matrix.col(k).to_string());
            results["algorithm"] = "nuclear_exhaustive";
            results["sign_matrix_columns"] = cols;
            results["nuclear_norm"] = r.nuclear;
            results["rank_deficient_completion"] = r.basis.rank_deficient_completion;
            results["elapsed_seconds"] = r.elapsed;
        }
    } else if (c.method == "greedy") {
        DeflationOptions d;
        d.solver = solver;
        R = greedy_deflation_l1(X, c.K, d).R;
        results["algorithm"] = "greedy_deflation";
    } else if (c.method == "fixedpoint") {
        if (c.K == 1) {
            const MultistartResult ms = fixed_point_multistart(X, c.restarts, c.seed);
            R = component_from_signs(X, ms.best.sign_vector);
            results["algorithm"] = "fixed_point";
            results["sign_vector"] = ms.best.sign_vector.to_string();
            results["converged"] = ms.best.converged;
            results["iterations"] = ms.best.iterations;
        } else {
            DeflationOptions d;
            d.stage = DeflationStage::fixed_point;
            d.restarts = c.restarts;
            d.seed = c.seed;
            R = greedy_deflation_l1(X, c.K, d).R;
            results["algorithm"] = "fixed_point_deflation";
        }
    } else if (c.method == "l2") {
        R = l2_subspace(X, c.K).R;
        results["algorithm"] = "l2";
    } else {
        throw InvalidArgument("unknown method '" + c.method + "'");
    }

    results["D"] = X.rows();
    results["N"] = X.cols();
    results["components"] = columns_json(R);
    results["objective_l1"] = l1_projection(R, X);
    results["objective_l2"] = l2_projection(R, X);

    json report = base_report("l1pca", to_json(c));
    report["results"] = std::move(results);
    return report;
}

/// Brute-force objective values: max ||X b||_2 (K = 1) or max ||X B||_* (K > 1).
inline json cmd_oracle(const RealMatrix& X, const L1pcaConfig& c) {
    require_finite(X, "X");
    if (c.K < 1 || c.K > X.rows())
        throw InvalidArgument("K must satisfy 1 <= K <= D (D=" + std::to_string(X.rows()) + ")");
    json results{{"D", X.rows()}, {"N", X.cols()}};
    if (c.K == 1) {
        auto [b, value] = solve_exhaustive(X, c.exhaustive_cap);
        results["objective"] = value;
        results["sign_vector"] = b.to_string();
    } else {
        MultiOptions mo;
        mo.multi_cap = c.multi_cap;
        auto [B, value] = solve_b_opt_exhaustive(X, c.K, mo);
        results["objective"] = value;
        json cols = json::array();
        for (std::size_t k = 0; k < B.cols(); ++k) cols.push_back(B.col(k).to_string());
        results["sign_matrix_columns"] = cols;
    }
    json cfg = to_json(c);
    cfg.erase("method");
    cfg.erase("restarts");
    json report = base_report("oracle", std::move(cfg));
    report["results"] = std::move(results);
    return report;
}

inline json cmd_experiment_dr(const DrConfig& c, int trials, unsigned threads = 1) {
    const DrSummary s = run_dr_experiment(c, trials, threads);
    json per_trial = json::array();
    for (std::size_t t = 0; t < s.trials.size(); ++t) {
        const DrTrial& d = s.trials[t];
        per_trial.push_back({{"trial", t},
                             {"err_l2_clean", d.err_l2_clean},
                             {"err_l1_clean", d.err_l1_clean},
                             {"err_l2_corrupt", d.err_l2_corrupt},
                             {"err_l1_corrupt", d.err_l1_corrupt},
                             {"r_l2_clean", vector_json(d.r_l2_clean)},
                             {"r_l1_clean", vector_json(d.r_l1_clean)},
                             {"r_l2_corrupt", vector_json(d.r_l2_corrupt)},
                             {"r_l1_corrupt", vector_json(d.r_l1_corrupt)}});
    }
    auto agg = [](const MeanStderr& m) { return json{{"mean", m.mean}, {"stderr", m.stderr_}}; };
    json cfg = to_json(c);
    cfg["trials"] = trials;
    json report = base_report("exp-dr", std::move(cfg));
    report["results"] = {{"trials", per_trial},
                         {"aggregate",
                          {{"err_l2_clean", agg(s.l2_clean)},
                           {"err_l1_clean", agg(s.l1_clean)},
                           {"err_l2_corrupt", agg(s.l2_corrupt)},
                           {"err_l1_corrupt", agg(s.l1_corrupt)},
                           {"l1_wins_corrupt", s.l1_wins_corrupt}}}};
    return report;
}

inline std::string dr_trials_csv(const json& report) {
    std::ostringstream out;
    out << std::setprecision(17) << "trial,err_l2_clean,err_l1_clean,err_l2_corrupt,err_l1_corrupt\n";
    for (const auto& t : report.at("results").at("trials"))
        out << t.at("trial").get<int>() << "," << t.at("err_l2_clean").get<double>() << ","
            << t.at("err_l1_clean").get<double>() << "," << t.at("err_l2_corrupt").get<double>() << ","
            << t.at("err_l1_corrupt").get<double>() << "\n";
    return out.str();
}

inline std::string spectrum_csv(const Spectrum& sp) {
    std::ostringstream out;
    out << "angle_deg,power\n";
    for (std::size_t i = 0; i < sp.angles.size(); ++i)
        out << std::setprecision(10) << sp.angles[i] << "," << std::setprecision(17) << sp.power[i] << "\n";
    return out.str();
}

struct DoaRun {
    json report;
    DoaSummary summary;
};

inline DoaRun cmd_experiment_doa(const DoaConfig& c, int trials, const MultiOptions& opts = {},
                                 unsigned threads = 1) {
    DoaRun run;
    run.summary = run_doa_experiment(c, trials, opts, threads);
    json per_trial = json::array();
    for (std::size_t t = 0; t < run.summary.trials.size(); ++t) {
        const DoaTrial& d = run.summary.trials[t];
        per_trial.push_back({{"trial", t},
                             {"corrupt_column", d.corrupt_column},
                             {"peaks_l2", d.peaks_l2},
                             {"peaks_l1", d.peaks_l1},
                             {"success_l2", d.success_l2},
                             {"success_l1", d.success_l1},
                             {"jammer_power_l2", d.jammer_power_l2},
                             {"jammer_power_l1", d.jammer_power_l1},
                             {"objective_l1", d.objective_l1},
                             {"l1_rank_deficient_completion", d.l1_rank_deficient}});
    }
    json cfg = to_json(c);
    cfg["trials"] = trials;
    cfg["multi_cap"] = opts.multi_cap;
    run.report = base_report("exp-doa", std::move(cfg));
    run.report["results"] = {
        {"trials", per_trial},
        {"aggregate",
         {{"success_rate_l2", run.summary.success_rate_l2},
          {"success_rate_l1", run.summary.success_rate_l1},
          {"jammer_power_l2", {{"mean", run.summary.jammer_power_l2.mean}, {"stderr", run.summary.jammer_power_l2.stderr_}}},
          {"jammer_power_l1", {{"mean", run.summary.jammer_power_l1.mean}, {"stderr", run.summary.jammer_power_l1.stderr_}}}}}};
    return run;
}

// ---------------------------------------------------------------------------
// Argument handling

/// Reads a JSON config file. A full run report is accepted too: its "config"
/// block is used.
inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io::ParseError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io::ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    if (j.contains("config") && j.at("config").is_object()) return j.at("config");
    return j;
}

inline void emit(const json& report, const std::string& out_dir, std::ostream& out) {
    if (!out_dir.empty()) io::write_file_atomic(std::filesystem::path(out_dir) / "report.json", report.dump(2) + "\n");
    else out << report.dump(2) << "\n";
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Exact L1-norm principal component analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::uint64_t seed = 0;
    int trials = 1;
    std::string out_dir, format = "json", config_path, input;
    int K = 1;
    std::string method = "optimal";
    int exhaustive_cap = kDefaultExhaustiveCap, multi_cap = kDefaultMultiCap, restarts = kDefaultRestarts;
    unsigned threads = 1;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--out", out_dir, "Output directory for report and artifacts");
        sub->add_option("--format", format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--config", config_path, "JSON config or earlier run report");
        sub->add_option("--exhaustive-cap", exhaustive_cap, "Max N for the 2^(N-1) search");
        sub->add_option("--multi-cap", multi_cap, "Max (N-1)*K for the sign-matrix search");
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    };

    CLI::App* l1 = app.add_subcommand("l1pca", "Compute principal components of a CSV matrix");
    common(l1);
    l1->add_option("input", input, "Samples-as-rows CSV");
    l1->add_option("-K,--components", K, "Number of components");
    l1->add_option("--method", method, "optimal | greedy | fixedpoint | l2")
        ->check(CLI::IsMember({"optimal", "greedy", "fixedpoint", "l2"}));
    l1->add_option("--restarts", restarts, "Random restarts for the fixed-point baseline");

    CLI::App* oracle = app.add_subcommand("oracle", "Brute-force objective values for a CSV matrix");
    common(oracle);
    oracle->add_option("input", input, "Samples-as-rows CSV");
    oracle->add_option("-K,--components", K, "Number of components");

    int n_train = 0, n_eval = 0;
    CLI::App* dr = app.add_subcommand("exp-dr", "Dimensionality-reduction study with outliers");
    common(dr);
    dr->add_option("--trials", trials, "Monte-Carlo trials");
    dr->add_option("--n-train", n_train, "Training samples");
    dr->add_option("--n-eval", n_eval, "Evaluation samples");
    bool no_outliers = false;
    dr->add_flag("--no-outliers", no_outliers, "Run without outliers");

    CLI::App* doa = app.add_subcommand("exp-doa", "L1/L2 MUSIC direction-of-arrival study");
    common(doa);
    doa->add_option("--trials", trials, "Monte-Carlo trials");
    double noise_var = 1.0;
    int corrupt_index = 0;
    bool no_jammer = false, random_phase = false;
    doa->add_option("-K,--components", K, "Subspace dimension");
    doa->add_option("--noise-var", noise_var, "Noise variance");
    doa->add_option("--corrupt-index", corrupt_index, "Jammed snapshot (1-based)");
    doa->add_flag("--no-jammer", no_jammer, "Disable the jammer");
    doa->add_flag("--random-phase", random_phase, "Random source phase per snapshot");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    }

    auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };

    try {
        if (l1->parsed() || oracle->parsed()) {
            CLI::App* sub = l1->parsed() ? l1 : oracle;
            L1pcaConfig c;
            if (!config_path.empty()) c = l1pca_config_from_json(load_config(config_path));
            if (given(sub, "input")) c.input = input;
            if (given(sub, "-K")) c.K = K;
            if (l1->parsed() && given(sub, "--method")) c.method = method;
            if (l1->parsed() && given(sub, "--restarts")) c.restarts = restarts;
            if (given(sub, "--seed")) c.seed = seed;
            if (given(sub, "--exhaustive-cap")) c.exhaustive_cap = exhaustive_cap;
            if (given(sub, "--multi-cap")) c.multi_cap = multi_cap;
            if (c.input.empty()) throw io::ParseError("no input file given");

            const RealMatrix X = io::read_matrix_csv(std::filesystem::path(c.input));
            const json report = l1->parsed() ? cmd_l1pca(X, c) : cmd_oracle(X, c);
            if (format == "csv" && l1->parsed()) {
                const RealMatrix R = [&] {
                    const auto& comps = report.at("results").at("components");
                    RealMatrix M(X.rows(), static_cast<Eigen::Index>(comps.size()));
                    for (std::size_t k = 0; k < comps.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = vector_from_json(comps[k]);
                    return M;
                }();
                io::write_matrix_csv(out, R);
                if (!out_dir.empty()) emit(report, out_dir, out);
            } else {
                emit(report, out_dir, out);
            }
            return kOk;
        }

        if (dr->parsed()) {
            json cfg = config_path.empty() ? json::object() : load_config(config_path);
            DrConfig c = dr_config_from_json(cfg);
            int n = cfg.value("trials", 1);
            if (given(dr, "--trials")) n = trials;
            if (given(dr, "--seed")) c.seed = seed;
            if (given(dr, "--n-train")) c.n_train = n_train;
            if (given(dr, "--n-eval")) c.n_eval = n_eval;
            if (no_outliers) c.outliers.clear();
            const json report = cmd_experiment_dr(c, n, threads);
            if (!out_dir.empty()) io::write_file_atomic(std::filesystem::path(out_dir) / "trials.csv", dr_trials_csv(report));
            if (format == "csv") {
                out << dr_trials_csv(report);
                if (!out_dir.empty()) emit(report, out_dir, out);
            } else {
                emit(report, out_dir, out);
            }
            return kOk;
        }

        if (doa->parsed()) {
            json cfg = config_path.empty() ? json::object() : load_config(config_path);
            DoaConfig c = doa_config_from_json(cfg);
            int n = cfg.value("trials", 1);
            MultiOptions mo;
            mo.multi_cap = cfg.value("multi_cap", kDefaultMultiCap);
            if (given(doa, "--trials")) n = trials;
            if (given(doa, "--seed")) c.seed = seed;
            if (given(doa, "-K")) c.K = K;
            if (given(doa, "--noise-var")) c.noise_var = noise_var;
            if (given(doa, "--corrupt-index")) c.corrupt_index = corrupt_index;
            if (given(doa, "--multi-cap")) mo.multi_cap = multi_cap;
            if (no_jammer) c.jammer = false;
            if (random_phase) c.random_phase = true;
            mo.threads = 1;
            const DoaRun run = cmd_experiment_doa(c, n, mo, threads);
            if (!out_dir.empty()) {
                const std::filesystem::path dir(out_dir);
                for (std::size_t t = 0; t < run.summary.trials.size(); ++t) {
                    io::write_file_atomic(dir / ("spectrum_l2_trial" + std::to_string(t) + ".csv"),
                                          spectrum_csv(run.summary.trials[t].l2));
                    io::write_file_atomic(dir / ("spectrum_l1_trial" + std::to_string(t) + ".csv"),
                                          spectrum_csv(run.summary.trials[t].l1));
                }
            }
            if (format == "csv") {
                out << "trial,success_l2,success_l1,jammer_power_l2,jammer_power_l1\n" << std::setprecision(17);
                for (const auto& t : run.report.at("results").at("trials"))
                    out << t.at("trial").get<int>() << "," << t.at("success_l2").get<bool>() << ","
                        << t.at("success_l1").get<bool>() << "," << t.at("jammer_power_l2").get<double>() << ","
                        << t.at("jammer_power_l1").get<double>() << "\n";
                if (!out_dir.empty()) emit(run.report, out_dir, out);
            } else {
                emit(run.report, out_dir, out);
            }
            return kOk;
        }
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kCapExceeded;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const DimensionMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const ZeroMatrix& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const json::exception& e) {
        err << "error: bad config value: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace l1pca::cli
