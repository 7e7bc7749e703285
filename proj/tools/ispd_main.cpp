// Command-line front end: fitting, index adjustment, the simulation study,
// and direct evaluation of the distribution functions.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ispd/betoidal.hpp"
#include "ispd/errors.hpp"
#include "ispd/estimation.hpp"
#include "ispd/indices.hpp"
#include "ispd/io.hpp"
#include "ispd/simstudy.hpp"
#include "ispd/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ispd;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitInfeasible = 4;

ModelTheta parse_theta(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        throw InputError("--theta expects 'alpha,beta'");
    }
    try {
        return {std::stod(spec.substr(0, comma)),
                std::stod(spec.substr(comma + 1))};
    } catch (const std::exception&) {
        throw InputError("--theta expects 'alpha,beta'");
    }
}

std::vector<ModelTheta> parse_starts(const std::string& spec) {
    std::vector<ModelTheta> starts;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto semi = spec.find(';', pos);
        const std::string part =
            spec.substr(pos, semi == std::string::npos ? std::string::npos
                                                       : semi - pos);
        if (!part.empty()) starts.push_back(parse_theta(part));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    if (starts.empty()) throw InputError("--starts parsed to nothing");
    return starts;
}

std::string round4(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

json summary_json(const SummaryRow& s) {
    return {{"min", s.min}, {"q1", s.q1},   {"q2", s.q2},
            {"mean", s.mean}, {"q3", s.q3}, {"max", s.max}};
}

json lrt_json(const LrtResult& l) {
    return {{"stat", l.stat}, {"df", l.df}, {"p", l.p}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

// ------------------------------------------------------------------ fit

struct FitOptions {
    std::string input, mode = "micro", model = "fcm", starts, out;
    int n_max = 0;
    double trunc = 73.0;
};

int run_fit(const FitOptions& opt, const std::vector<std::string>& argv) {
    Cohort cohort = read_cohort_csv(opt.input);
    if (opt.n_max > 0) {
        if (opt.n_max < cohort.n_max) {
            throw InputError("--n-max is below the largest department size");
        }
        cohort.n_max = opt.n_max;
    }

    LikelihoodKind lik;
    if (opt.mode == "micro") {
        lik = LikelihoodKind::Scaled;
    } else if (opt.mode == "coarse") {
        lik = LikelihoodKind::Coarse;
    } else if (opt.mode == "coarse-trunc") {
        lik = LikelihoodKind::CoarseTruncated;
        cohort.truncation = opt.trunc;
    } else {
        throw InputError("--mode must be micro, coarse or coarse-trunc");
    }
    const ObsKind expected =
        lik == LikelihoodKind::Scaled ? ObsKind::Scaled : ObsKind::Cell;
    if (cohort.kind() != expected) {
        throw InputError("input column does not match --mode " + opt.mode);
    }
    cohort.validate();

    CorrelationModelKind kind;
    if (opt.model == "fcm") {
        kind = CorrelationModelKind::Fcm;
    } else if (opt.model == "ccm") {
        kind = CorrelationModelKind::Ccm;
    } else if (opt.model == "ncm") {
        kind = CorrelationModelKind::Ncm;
    } else {
        throw InputError("--model must be fcm, ccm or ncm");
    }

    FitConfig cfg;
    if (!opt.starts.empty()) cfg.starts = parse_starts(opt.starts);

    const FitResult res = fit(cohort, kind, lik, cfg);

    json report;
    report["model"] = opt.model;
    report["mode"] = opt.mode;
    report["n_departments"] = cohort.records.size();
    report["n_max"] = cohort.n_max;
    if (cohort.truncation) report["truncation"] = *cohort.truncation;
    report["alpha"] = res.theta_hat.alpha;
    report["beta"] = res.theta_hat.beta;
    report["loglik"] = res.loglik;
    report["converged"] = res.converged;
    report["iterations"] = res.iterations;
    report["n_starts"] = res.n_starts;
    report["n_underflow_cells"] = res.n_underflow_cells;

    const bool has_se_a = res.std_errors[0] > 0.0;
    const bool has_se_b = res.std_errors[1] > 0.0;
    report["se_alpha"] = has_se_a ? json(res.std_errors[0]) : json();
    report["se_beta"] = has_se_b ? json(res.std_errors[1]) : json();
    report["p_alpha"] =
        has_se_a
            ? json(wald_test(res, Param::Alpha, 0.0, Sidedness::TwoSided).p)
            : json();
    report["p_beta"] =
        has_se_b
            ? json(wald_test(res, Param::Beta, 0.0, Sidedness::TwoSided).p)
            : json();

    // Six-number summaries of the fitted correlations and
    // standard deviations.
    std::vector<double> rhos, sigmas;
    for (const auto& r : cohort.records) {
        rhos.push_back(rho_d(res.theta_hat, cohort.ctx(r)));
        sigmas.push_back(sigma_d(res.theta_hat, cohort.ctx(r)));
    }
    report["rho_summary"] = summary_json(summarize(rhos));
    report["sigma_summary"] = summary_json(summarize(sigmas));

    report["lrt_vs_ncm"] = json();
    report["lrt_vs_ccm"] = json();
    if (kind != CorrelationModelKind::Ncm) {
        const FitResult ncm =
            fit(cohort, CorrelationModelKind::Ncm, lik, cfg);
        report["lrt_vs_ncm"] = lrt_json(lrt(res, ncm));
        if (kind == CorrelationModelKind::Fcm) {
            const FitResult ccm =
                fit(cohort, CorrelationModelKind::Ccm, lik, cfg);
            report["lrt_vs_ccm"] = lrt_json(lrt(res, ccm));
            report["ccm_alpha"] = ccm.theta_hat.alpha;
            report["ccm_se_alpha"] = ccm.std_errors[0];
        }
    }

    std::cout << report.dump(2) << '\n';

    // Compact 4-decimal rendering on stderr.
    std::cerr << "model " << opt.model << "  loglik "
              << round4(res.loglik) << "\n"
              << "alpha " << round4(res.theta_hat.alpha) << " (se "
              << round4(res.std_errors[0]) << ")  beta "
              << round4(res.theta_hat.beta) << " (se "
              << round4(res.std_errors[1]) << ")\n";

    if (!opt.out.empty()) {
        const fs::path dir(opt.out);
        ensure_dir(dir);
        write_text(dir / "report.json", report.dump(2) + "\n");
        json cfg_json = {{"input", opt.input},   {"mode", opt.mode},
                         {"model", opt.model},   {"n_max", cohort.n_max},
                         {"starts", opt.starts}};
        if (cohort.truncation) cfg_json["trunc"] = *cohort.truncation;
        write_manifest(dir, "fit", argv, cfg_json,
                       {{opt.input, file_digest(opt.input)}});
    }
    return 0;
}

// --------------------------------------------------------------- adjust

struct AdjustOptions {
    std::string input, theta, out;
    int n_max = 0;
};

int run_adjust(const AdjustOptions& opt,
               const std::vector<std::string>& argv) {
    Cohort cohort = read_cohort_csv(opt.input);
    if (cohort.kind() != ObsKind::Scaled) {
        throw InputError("adjust requires a scaled_avg column");
    }
    if (opt.n_max > 0) {
        if (opt.n_max < cohort.n_max) {
            throw InputError("--n-max is below the largest department size");
        }
        cohort.n_max = opt.n_max;
    }
    cohort.validate();
    const ModelTheta theta = parse_theta(opt.theta);
    if (!std::isfinite(theta.alpha) || !std::isfinite(theta.beta)) {
        throw InputError("--theta must be finite");
    }

    const fs::path dir(opt.out);
    ensure_dir(dir);
    std::ofstream csv(dir / "adjusted.csv");
    if (!csv) throw InputError("cannot write adjusted.csv");
    csv << "dept_id,n_products,ispd_original,ispd_fcm,rho_hat,sigma_hat\n";
    for (const auto& r : cohort.records) {
        const double z = std::get<ScaledAvg>(r.obs).value;
        const SizeContext ctx = cohort.ctx(r);
        csv << r.id << ',' << r.size << ','
            << format_full(ispd_original(z)) << ','
            << format_full(ispd_fcm(z, ctx, theta)) << ','
            << format_full(rho_d(theta, ctx)) << ','
            << format_full(sigma_d(theta, ctx)) << '\n';
    }
    csv.close();

    write_manifest(dir, "adjust", argv,
                   {{"input", opt.input},
                    {"theta", {theta.alpha, theta.beta}},
                    {"n_max", cohort.n_max}},
                   {{opt.input, file_digest(opt.input)}});
    return 0;
}

// ------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string scenario = "null", sizes_file, theta = "3.752,-0.00376", out;
    int reps = 1;
    std::uint64_t seed = 0;
    int n_max = 0;
    int departments = 766;
    int threads = 0;
};

int run_simulate(const SimulateOptions& opt,
                 const std::vector<std::string>& argv) {
    ScenarioConfig cfg;
    cfg.perturbation = perturbation_from_name(opt.scenario);
    cfg.replications = opt.reps;
    cfg.seed = opt.seed;
    cfg.theta0 = parse_theta(opt.theta);
    cfg.score_dist = ScoreDist::vqr_2010_2014();
    cfg.threads = opt.threads;

    std::vector<ManifestInput> inputs;
    if (!opt.sizes_file.empty()) {
        cfg.sizes = read_sizes_file(opt.sizes_file);
        cfg.n_max = opt.n_max > 0
                        ? opt.n_max
                        : *std::max_element(cfg.sizes.begin(),
                                            cfg.sizes.end());
        inputs.push_back({opt.sizes_file, file_digest(opt.sizes_file)});
    } else {
        // Sizes drawn once from the published six-number summary.
        RngStream rng = RngStream::substream(cfg.seed, 0x53495a45u);  // "SIZE"
        cfg.sizes = sample_sizes(anvur_2017_sizes(), opt.departments, rng);
        cfg.n_max = opt.n_max > 0 ? opt.n_max : 464;
    }

    const ScenarioResult result = run_scenario(cfg);

    const fs::path dir(opt.out);
    ensure_dir(dir);
    const auto write_csv = [&](const char* name, auto writer) {
        std::ofstream os(dir / name);
        if (!os) throw InputError(std::string("cannot write ") + name);
        writer(os);
    };
    write_csv("replications.csv", [&](std::ostream& os) {
        write_replications_csv(os, result);
    });
    write_csv("summary.csv", [&](std::ostream& os) {
        write_summary_csv(os, result);
    });
    write_csv("hist_ispd_original.csv", [&](std::ostream& os) {
        write_grid_histogram_csv(os, result.hist_original);
    });
    write_csv("hist_ispd_fcm.csv", [&](std::ostream& os) {
        write_grid_histogram_csv(os, result.hist_fcm);
    });
    write_csv("hist_scaled_std_min.csv", [&](std::ostream& os) {
        write_binned_histogram_csv(os, result.hist_std_min_size);
    });
    write_csv("hist_scaled_std_max.csv", [&](std::ostream& os) {
        write_binned_histogram_csv(os, result.hist_std_max_size);
    });

    write_manifest(dir, "simulate", argv,
                   {{"scenario", opt.scenario},
                    {"replications", opt.reps},
                    {"seed", opt.seed},
                    {"theta0", {cfg.theta0.alpha, cfg.theta0.beta}},
                    {"n_max", cfg.n_max},
                    {"departments", cfg.sizes.size()},
                    {"sizes_file", opt.sizes_file}},
                   inputs);
    if (result.n_fit_failures > 0) {
        std::cerr << result.n_fit_failures
                  << " replication(s) flagged: model refit did not "
                     "converge\n";
    }
    return 0;
}

// ----------------------------------------------------------------- dist

struct DistOptions {
    std::string what, at;
    double sigma = 1.0;
    double trunc = -1.0;
    bool trunc_given = false;
};

int run_dist(const DistOptions& opt) {
    if (!(opt.sigma > 0.0)) throw InputError("--sigma must be positive");
    const bool truncated = opt.trunc_given;
    const betoidal::LTBetoidalParam lt{opt.sigma,
                                       truncated ? opt.trunc : 0.0};
    const betoidal::BetoidalParam p{opt.sigma};

    if (opt.what == "var") {
        if (truncated) {
            throw InfeasibleError(
                "variance of the truncated distribution is not provided");
        }
        std::cout << "sigma,variance\n"
                  << format_full(opt.sigma) << ','
                  << format_full(betoidal::variance(p)) << '\n';
        return 0;
    }

    if (opt.at.empty()) throw InputError("--at is required");
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= opt.at.size()) {
        const auto comma = opt.at.find(',', pos);
        const std::string part = opt.at.substr(
            pos, comma == std::string::npos ? std::string::npos
                                            : comma - pos);
        if (!part.empty()) {
            try {
                values.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw InputError("--at: cannot parse '" + part + "'");
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (values.empty()) throw InputError("--at parsed to nothing");

    const auto eval = [&](double x) {
        try {
            if (opt.what == "pdf") {
                return truncated ? betoidal::lt_pdf(x, lt)
                                 : betoidal::pdf(x, p);
            }
            if (opt.what == "cdf") {
                return truncated ? betoidal::lt_cdf(x, lt)
                                 : betoidal::cdf(x, p);
            }
            if (opt.what == "quantile") {
                return truncated ? betoidal::lt_quantile(x, lt)
                                 : betoidal::quantile(x, p);
            }
            throw InputError("dist expects pdf, cdf, quantile or var");
        } catch (const std::domain_error& e) {
            throw InputError(e.what());
        }
    };

    std::cout << "at,value\n";
    for (double x : values) {
        std::cout << format_full(x) << ',' << format_full(eval(x)) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Department performance index modeling and adjustment"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    FitOptions fit_opt;
    auto* fit_cmd = app.add_subcommand(
        "fit", "Fit the correlation model to a cohort CSV");
    fit_cmd->add_option("--input", fit_opt.input, "cohort CSV")->required();
    fit_cmd->add_option("--mode", fit_opt.mode,
                        "micro | coarse | coarse-trunc");
    fit_cmd->add_option("--model", fit_opt.model, "fcm | ccm | ncm");
    fit_cmd->add_option("--n-max", fit_opt.n_max,
                        "cohort maximum size override");
    fit_cmd->add_option("--trunc", fit_opt.trunc,
                        "truncation grid value (coarse-trunc only)");
    fit_cmd->add_option("--starts", fit_opt.starts,
                        "start points 'a,b;a,b;...'");
    fit_cmd->add_option("--out", fit_opt.out, "output directory");

    AdjustOptions adj_opt;
    auto* adj_cmd = app.add_subcommand(
        "adjust", "Adjust indices with a fitted parameter vector");
    adj_cmd->add_option("--input", adj_opt.input, "cohort CSV (scaled_avg)")
        ->required();
    adj_cmd->add_option("--theta", adj_opt.theta, "alpha,beta")->required();
    adj_cmd->add_option("--n-max", adj_opt.n_max,
                        "cohort maximum size override");
    adj_cmd->add_option("--out", adj_opt.out, "output directory")
        ->required();

    SimulateOptions sim_opt;
    auto* sim_cmd =
        app.add_subcommand("simulate", "Run the simulation study");
    sim_cmd->add_option("--scenario", sim_opt.scenario,
                        "null | small | medium | large");
    sim_cmd->add_option("--reps", sim_opt.reps, "replications")->required();
    sim_cmd->add_option("--seed", sim_opt.seed, "master seed")->required();
    sim_cmd->add_option("--sizes", sim_opt.sizes_file,
                        "department sizes file (one per line)");
    sim_cmd->add_option("--theta", sim_opt.theta, "alpha,beta");
    sim_cmd->add_option("--n-max", sim_opt.n_max,
                        "cohort maximum size override");
    sim_cmd->add_option("--departments", sim_opt.departments,
                        "department count when sampling sizes");
    sim_cmd->add_option("--threads", sim_opt.threads, "worker threads");
    sim_cmd->add_option("--out", sim_opt.out, "output directory")
        ->required();

    DistOptions dist_opt;
    auto* dist_cmd = app.add_subcommand(
        "dist", "Evaluate the distribution functions");
    dist_cmd->add_option("what", dist_opt.what, "pdf | cdf | quantile | var")
        ->required();
    dist_cmd->add_option("--sigma", dist_opt.sigma, "sigma")->required();
    dist_cmd
        ->add_option("--trunc", dist_opt.trunc, "lower truncation point")
        ->each([&](const std::string&) { dist_opt.trunc_given = true; });
    dist_cmd->add_option("--at", dist_opt.at, "comma-separated inputs");

    std::vector<std::string> raw_args(argv, argv + argc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*fit_cmd) return run_fit(fit_opt, raw_args);
        if (*adj_cmd) return run_adjust(adj_opt, raw_args);
        if (*sim_cmd) return run_simulate(sim_opt, raw_args);
        if (*dist_cmd) return run_dist(dist_opt);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible configuration: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
