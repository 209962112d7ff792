#include "gck/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gck/errors.hpp"
#include "gck/estimate.hpp"
#include "gck/experiments.hpp"
#include "gck/predict.hpp"
#include "gck/simulate.hpp"

namespace gck {

namespace {

struct DataSet {
    LocationSet locs;
    Eigen::VectorXd z;
};

// CSV with a header x1[,x2[,x3]],z as written by `gck simulate`.
DataSet read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read data file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("data file " + path + " is empty");
    const int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    const int d = cols - 1;
    if (d < 1 || d > 3) throw ValidationError("data file needs 2 to 4 columns (coordinates then z)");
    std::vector<double> coords, z;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        for (int c = 0; c < cols; ++c) {
            if (!std::getline(ss, tok, ','))
                throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) + " fields");
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (tok.empty() || *end != '\0') throw ValidationError(path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
            (c < d ? coords : z).push_back(v);
        }
    }
    if (z.empty()) throw ValidationError("data file " + path + " has no rows");
    return {LocationSet(d, std::move(coords)), Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()))};
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit(const std::string& csv, const std::string& path, std::ostream& out, const nlohmann::json& meta) {
    if (path.empty()) {
        out << csv;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << csv;
    if (!f) throw std::runtime_error("failed writing " + path);
    std::ofstream m(path + ".meta.json");
    if (!m) throw std::runtime_error("cannot write " + path + ".meta.json");
    m << meta.dump(2) << '\n';
}

}  // namespace

int cli_main(int argc, char** argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized Cauchy covariance: estimation, prediction and equivalence experiments", "gck"};
    app.set_config("--config", "", "INI or TOML file; [section] names match subcommands, flags override it");
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out_path;
    unsigned threads = 0;
    std::uint64_t seed = 42;
    auto common = [&](CLI::App* s) {
        s->fallthrough();
        s->add_option("--out", out_path, "CSV output path (default: standard output)");
        s->add_option("--seed", seed, "Master seed")->capture_default_str();
        s->add_option("--threads", threads, "Worker threads (default: GCK_THREADS or all cores)");
    };

    ExperimentConfig t1 = ExperimentConfig::defaults(ExperimentKind::Table1);
    bool no_fit = false;
    auto* c1 = app.add_subcommand("table1", "Distribution of the normalized microergodic statistic");
    common(c1);
    c1->add_option("--replicates", t1.replicates)->capture_default_str();
    c1->add_option("--n", t1.n_list, "Sample sizes")->delimiter(',')->capture_default_str();
    c1->add_option("--ranges", t1.ranges, "Practical ranges")->delimiter(',')->capture_default_str();
    c1->add_option("--delta", t1.delta)->capture_default_str();
    c1->add_option("--lambda", t1.lambda)->capture_default_str();
    c1->add_option("--sigma2", t1.sigma2)->capture_default_str();
    c1->add_option("--pool", t1.pool_size, "Size of the uniform location pool on [0,1]")->capture_default_str();
    c1->add_option("--eps", t1.eps, "Lower end of the scale search")->capture_default_str();
    c1->add_option("--upper-factor", t1.upper_factor, "Upper end of the scale search, in units of gamma0")->capture_default_str();
    c1->add_option("--factors", t1.factors, "Fixed scales x = factor * gamma0")->delimiter(',')->capture_default_str();
    c1->add_flag("--no-fit", no_fit, "Skip the maximum likelihood row");

    ExperimentConfig t2 = ExperimentConfig::defaults(ExperimentKind::Table2);
    auto* c2 = app.add_subcommand("table2", "Prediction efficiency of a compatible GW model under a GC truth");
    common(c2);
    c2->add_option("--replicates", t2.replicates)->capture_default_str();
    c2->add_option("--n", t2.n_list)->delimiter(',')->capture_default_str();
    c2->add_option("--ranges", t2.ranges)->delimiter(',')->capture_default_str();
    c2->add_option("--deltas", t2.deltas)->delimiter(',')->capture_default_str();
    c2->add_option("--lambda1", t2.lambda1)->capture_default_str();
    c2->add_option("--sigma2", t2.sigma2)->capture_default_str();
    c2->add_option("--sigma3", t2.sigma3_2, "GW variance")->capture_default_str();
    c2->add_option("--pool", t2.pool_size)->capture_default_str();
    c2->add_option("--factors", t2.factors, "GW supports as multiples of beta1*; the first must be 1")
        ->delimiter(',')
        ->capture_default_str();
    std::vector<double> target{0.26, 0.48};
    c2->add_option("--target", target, "Prediction site")->delimiter(',')->expected(2)->capture_default_str();

    std::string true_spec, working_spec;
    int dim = 1;
    auto* ce = app.add_subcommand("equiv", "Compatibility verdict for two covariance models");
    common(ce);
    ce->add_option("--true", true_spec, "e.g. gc:1,1.2,5,0.2875")->required();
    ce->add_option("--working", working_spec, "e.g. gw:1,0.1,2.1,0.2047")->required();
    ce->add_option("--dim", dim)->capture_default_str();

    std::string model_spec;
    std::size_t n = 100, pool = 4000;
    auto* cs = app.add_subcommand("simulate", "Simulate a Gaussian field on random locations");
    common(cs);
    cs->add_option("--model", model_spec)->required();
    cs->add_option("--n", n)->capture_default_str();
    cs->add_option("--dim", dim)->capture_default_str();
    cs->add_option("--pool", pool)->capture_default_str();

    std::string data_path;
    double f_delta = 0.75, f_lambda = 1.5, lo = 1e-12, hi = 1.0, level = 0.95;
    auto* cf = app.add_subcommand("fit", "Profile likelihood fit of the GC scale with delta and lambda fixed");
    common(cf);
    cf->add_option("--data", data_path, "CSV x1[,x2,x3],z");
    cf->add_option("--model", model_spec, "Simulate from this model instead of reading --data");
    cf->add_option("--n", n)->capture_default_str();
    cf->add_option("--dim", dim)->capture_default_str();
    cf->add_option("--pool", pool)->capture_default_str();
    cf->add_option("--delta", f_delta)->capture_default_str();
    cf->add_option("--lambda", f_lambda)->capture_default_str();
    cf->add_option("--lo", lo)->capture_default_str();
    cf->add_option("--hi", hi)->capture_default_str();
    cf->add_option("--level", level, "Confidence level of the microergodic interval")->capture_default_str();

    std::vector<double> at;
    auto* cp = app.add_subcommand("predict", "Kriging prediction with a working model, assessed under a true model");
    common(cp);
    cp->add_option("--data", data_path, "CSV x1[,x2,x3],z");
    cp->add_option("--working", working_spec)->required();
    cp->add_option("--true", true_spec, "Defaults to the working model");
    cp->add_option("--at", at, "Prediction site")->delimiter(',')->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const auto start = std::chrono::steady_clock::now();
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["seed"] = seed;
    meta["timestamp"] = utc_now();
    std::vector<std::string> args(argv, argv + argc);
    meta["argv"] = args;
    auto finish = [&](const std::string& csv) {
        meta["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(csv, out_path, out, meta);
    };

    try {
        if (c1->parsed()) {
            t1.seed = seed;
            t1.threads = threads;
            t1.fit = !no_fit;
            meta["experiment"] = "table1";
            meta["replicates"] = t1.replicates;
            meta["threads"] = resolve_threads(threads);
            finish(table1_report(run_table1(t1)).to_csv());
        } else if (c2->parsed()) {
            t2.seed = seed;
            t2.threads = threads;
            t2.target = {target[0], target[1]};
            meta["experiment"] = "table2";
            meta["replicates"] = t2.replicates;
            meta["threads"] = resolve_threads(threads);
            finish(table2_report(run_table2(t2)).to_csv());
        } else if (ce->parsed()) {
            meta["experiment"] = "equiv";
            auto a = parse_model_spec(true_spec, dim), b = parse_model_spec(working_spec, dim);
            finish(equiv_report(run_equiv(a, b)).to_csv());
        } else if (cs->parsed()) {
            meta["experiment"] = "simulate";
            auto m = parse_model_spec(model_spec, dim);
            auto s = simulate_gp(sample_uniform_locations(n, dim, seed, pool), m, seed);
            ExperimentReport r;
            for (int k = 1; k <= dim; ++k) r.columns.push_back("x" + std::to_string(k));
            r.columns.push_back("z");
            for (std::size_t i = 0; i < s.locations.size(); ++i) {
                std::vector<std::string> row;
                for (int k = 0; k < dim; ++k) row.push_back(format_number(s.locations.point(i)[k]));
                row.push_back(format_number(s.values[static_cast<Eigen::Index>(i)]));
                r.rows.push_back(std::move(row));
            }
            meta["model"] = m.describe();
            finish(r.to_csv());
        } else if (cf->parsed()) {
            meta["experiment"] = "fit";
            DataSet ds;
            if (!data_path.empty()) {
                ds = read_data_csv(data_path);
            } else if (!model_spec.empty()) {
                auto m = parse_model_spec(model_spec, dim);
                auto s = simulate_gp(sample_uniform_locations(n, dim, seed, pool), m, seed);
                ds = {s.locations, s.values};
            } else {
                throw ValidationError("fit needs --data or --model");
            }
            ProfileLikelihood pl(ds.z, ds.locs, CovarianceModel::gc(1.0, f_delta, f_lambda, 1.0, ds.locs.dim()));
            MLFit f = fit_scale(pl, lo, hi);
            ExperimentReport r;
            r.columns = {"key", "value"};
            r.rows = {{"n", std::to_string(pl.size())},
                      {"gamma_hat", format_number(f.gamma_hat)},
                      {"sigma2_hat", format_number(f.sigma2_hat)},
                      {"profile_loglik", format_number(f.profile_loglik)},
                      {"evaluations", std::to_string(f.iterations)},
                      {"at_boundary", f.at_boundary ? "1" : "0"}};
            if (!f.degenerate) {
                Interval ci = microergodic_ci(f, f_delta, f_lambda, pl.size(), level);
                r.rows.push_back({"microergodic", format_number(ci.estimate)});
                r.rows.push_back({"ci_lo", format_number(ci.lo)});
                r.rows.push_back({"ci_hi", format_number(ci.hi)});
            } else {
                r.rows.push_back({"degenerate", "1"});
            }
            finish(r.to_csv());
        } else if (cp->parsed()) {
            meta["experiment"] = "predict";
            if (data_path.empty()) throw ValidationError("predict needs --data");
            DataSet ds = read_data_csv(data_path);
            const int d = ds.locs.dim();
            if (at.size() != static_cast<std::size_t>(d)) throw ValidationError("--at must have one coordinate per dimension");
            auto w = parse_model_spec(working_spec, d);
            auto t = true_spec.empty() ? w : parse_model_spec(true_spec, d);
            auto a = assess_prediction(t, w, ds.locs, ds.z, at.data());
            ExperimentReport r;
            r.columns = {"key", "value"};
            r.rows = {{"prediction", format_number(a.prediction)},
                      {"mse_working", format_number(a.mse_under.at("working"))},
                      {"mse_true", format_number(a.mse_under.at("truth"))},
                      {"u1", format_number(*a.u1)},
                      {"u2", format_number(*a.u2)}};
            finish(r.to_csv());
        }
    } catch (const ValidationError& e) {
        err << "gck: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "gck: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "gck: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace gck
