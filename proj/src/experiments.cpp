#include "gck/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "gck/errors.hpp"
#include "gck/estimate.hpp"
#include "gck/predict.hpp"
#include "gck/rng.hpp"
#include "gck/simulate.hpp"
#include "gck/specfun.hpp"

namespace gck {

std::string experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Table1: return "table1";
        case ExperimentKind::Table2: return "table2";
        case ExperimentKind::Equiv: return "equiv";
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Fit: return "fit";
        case ExperimentKind::Predict: return "predict";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind k) {
    ExperimentConfig c;
    c.experiment = k;
    if (k == ExperimentKind::Table2) {
        c.replicates = 100;
        c.n_list = {50, 100, 500, 1000};
        c.pool_size = 5000;
        c.factors = {1.0, 0.5, 2.0};
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (replicates < 1) throw ValidationError("replicates must be at least 1");
    if (n_list.empty()) throw ValidationError("n list is empty");
    if (ranges.empty()) throw ValidationError("practical range list is empty");
    for (std::size_t n : n_list) {
        if (n < 1) throw ValidationError("sample sizes must be at least 1");
        if (n > pool_size) throw ValidationError("sample size " + std::to_string(n) + " exceeds the pool size");
    }
    for (double r : ranges)
        if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("practical ranges must be positive");
    for (double f : factors)
        if (!(f > 0.0) || !std::isfinite(f)) throw ValidationError("scale factors must be positive");
    if (experiment == ExperimentKind::Table1) {
        CovarianceModel::gc(sigma2, delta, lambda, 1.0, 1).validate();
        if (!(eps > 0.0) || !(upper_factor > 0.0)) throw ValidationError("search interval must be positive");
    }
    if (experiment == ExperimentKind::Table2) {
        if (deltas.empty()) throw ValidationError("delta list is empty");
        if (factors.empty() || factors.front() != 1.0)
            throw ValidationError("table2 support factors must start with 1 (U2 is taken at beta1*)");
        for (double d : deltas) CovarianceModel::gc(sigma2, d, lambda1, 1.0, 2).validate();
        if (!(sigma3_2 > 0.0)) throw ValidationError("GW variance must be positive");
        for (double t : target)
            if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("prediction target must lie in [0,1]^2");
    }
}

// ---------------------------------------------------------------------------

double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

// Pairwise sum: error grows like log m and the result depends only on the order of the input.
double pairwise_sum(const double* x, std::size_t m) {
    if (m <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += x[i];
        return s;
    }
    const std::size_t h = m / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, m - h);
}

}  // namespace

SummaryStats summarize(std::vector<double> v) {
    SummaryStats s;
    const std::size_t m = v.size();
    if (m == 0) {
        s.q.fill(std::numeric_limits<double>::quiet_NaN());
        s.mean = s.var = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    std::sort(v.begin(), v.end());
    for (std::size_t k = 0; k < kQuantileLevels.size(); ++k) s.q[k] = quantile_type7(v, kQuantileLevels[k]);
    s.mean = pairwise_sum(v.data(), m) / static_cast<double>(m);
    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) d2[i] = (v[i] - s.mean) * (v[i] - s.mean);
    s.var = m > 1 ? pairwise_sum(d2.data(), m) / static_cast<double>(m - 1) : 0.0;
    return s;
}

SummaryStats standard_normal_summary() {
    SummaryStats s;
    for (std::size_t k = 0; k < kQuantileLevels.size(); ++k) s.q[k] = normal_quantile(kQuantileLevels[k]);
    s.q[2] = 0.0;
    s.mean = 0.0;
    s.var = 1.0;
    return s;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string factor_label(double f, const char* base) {
    return (f == 1.0 ? std::string() : format_number(f)) + base;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += ',';
            out += csv_field(f[i]);
        }
        out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
}

// ---------------------------------------------------------------------------

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* e = std::getenv("GCK_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end != e && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
        throw ValidationError(std::string("GCK_THREADS must be a positive integer, got '") + e + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                stop = true;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
}

std::uint64_t replicate_stream(std::size_t cell, std::size_t rep, unsigned purpose) {
    if (cell >= (1u << 23) || rep >= (std::uint64_t{1} << 36) || purpose >= 16)
        throw ValidationError("replicate stream index out of range");
    return (static_cast<std::uint64_t>(cell + 1) << 40) | (static_cast<std::uint64_t>(rep) << 4) | purpose;
}

// ---------------------------------------------------------------------------

namespace {

struct Replicate {
    bool ok = false;
    bool boundary = false;
    std::vector<double> values;  // one per x (table1) or per ratio (table2)
};

bool flag_failures(std::size_t failures, std::size_t reps) { return 100 * failures > reps; }

}  // namespace

Table1Result run_table1(const ExperimentConfig& cfg) {
    cfg.validate();
    Table1Result res;
    res.config = cfg;
    const unsigned threads = resolve_threads(cfg.threads);
    const LocationSet pool = uniform_pool(cfg.pool_size, 1, cfg.seed);
    const auto shape = CovarianceModel::gc(1.0, cfg.delta, cfg.lambda, 1.0, 1);

    // x order: gamma_hat (optional), gamma0, factors
    std::vector<std::string> labels;
    if (cfg.fit) labels.push_back("gamma_hat");
    labels.push_back("gamma0");
    for (double f : cfg.factors) labels.push_back(factor_label(f, "gamma0"));

    const std::size_t cells = cfg.ranges.size() * cfg.n_list.size();
    std::vector<Replicate> out(cells * cfg.replicates);
    parallel_for(out.size(), threads, [&](std::size_t task) {
        const std::size_t cell = task / cfg.replicates, rep = task % cfg.replicates;
        const double range = cfg.ranges[cell / cfg.n_list.size()];
        const std::size_t n = cfg.n_list[cell % cfg.n_list.size()];
        Replicate& r = out[task];
        try {
            const double g0 = practical_range_to_scale(shape, range);
            RandomStream sel(cfg.seed, replicate_stream(cell, rep, 0));
            LocationSet locs = n == cfg.pool_size ? pool : select_without_replacement(pool, n, sel);
            auto z = simulate_gp(locs, CovarianceModel::gc(cfg.sigma2, cfg.delta, cfg.lambda, g0, 1), cfg.seed,
                                 replicate_stream(cell, rep, 1))
                         .values;
            ProfileLikelihood pl(std::move(z), locs, shape);
            if (cfg.fit) {
                MLFit f = fit_scale(pl, cfg.eps, cfg.upper_factor * g0);
                r.values.push_back(normalized_stat(f.sigma2_hat, f.gamma_hat, g0, cfg.sigma2, cfg.delta, n));
                r.boundary = f.at_boundary;
            }
            std::vector<double> xs{g0};
            for (double f : cfg.factors) xs.push_back(f * g0);
            for (double x : xs) {
                ProfilePoint p = pl.evaluate(x);
                if (!p.factorized) throw NotPositiveDefinite(0);
                r.values.push_back(normalized_stat(p.sigma2, x, g0, cfg.sigma2, cfg.delta, n));
            }
            r.ok = true;
        } catch (const std::runtime_error&) {
            r.ok = false;
        }
    });

    for (std::size_t ri = 0; ri < cfg.ranges.size(); ++ri)
        for (std::size_t xi = 0; xi < labels.size(); ++xi)
            for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
                const std::size_t cell = ri * cfg.n_list.size() + ni;
                Table1Cell c;
                c.range = cfg.ranges[ri];
                c.x = labels[xi];
                c.n = cfg.n_list[ni];
                c.replicates = cfg.replicates;
                std::vector<double> v;
                for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                    const Replicate& r = out[cell * cfg.replicates + rep];
                    if (!r.ok) {
                        ++c.failures;
                        continue;
                    }
                    v.push_back(r.values[xi]);
                    if (labels[xi] == "gamma_hat" && r.boundary) ++c.boundary;
                }
                c.flagged = flag_failures(c.failures, c.replicates);
                c.stats = summarize(std::move(v));
                res.cells.push_back(std::move(c));
            }
    return res;
}

ExperimentReport table1_report(const Table1Result& r) {
    ExperimentReport rep;
    rep.columns = {"range", "x", "n", "replicates", "failures", "flagged", "boundary",
                   "q05", "q25", "q50", "q75", "q95", "mean", "var"};
    auto stats = [](std::vector<std::string>& row, const SummaryStats& s) {
        for (double q : s.q) row.push_back(format_number(q));
        row.push_back(format_number(s.mean));
        row.push_back(format_number(s.var));
    };
    for (const auto& c : r.cells) {
        std::vector<std::string> row{format_number(c.range), c.x, std::to_string(c.n), std::to_string(c.replicates),
                                     std::to_string(c.failures), c.flagged ? "1" : "0", std::to_string(c.boundary)};
        stats(row, c.stats);
        rep.rows.push_back(std::move(row));
    }
    std::vector<std::string> ref{"", "N(0,1)", "", "", "", "", ""};
    stats(ref, r.reference);
    rep.rows.push_back(std::move(ref));
    return rep;
}

Table2Result run_table2(const ExperimentConfig& cfg) {
    cfg.validate();
    Table2Result res;
    res.config = cfg;
    const unsigned threads = resolve_threads(cfg.threads);
    const LocationSet pool = uniform_pool(cfg.pool_size, 2, cfg.seed);
    const std::size_t nf = cfg.factors.size();

    struct Setting {
        CovarianceModel gc;
        double beta = 0.0;
        double kappa = 0.0;
        double mu = 0.0;
    };
    std::vector<Setting> settings;
    for (double delta : cfg.deltas)
        for (double range : cfg.ranges) {
            Setting s;
            auto shape = CovarianceModel::gc(cfg.sigma2, delta, cfg.lambda1, 1.0, 2);
            s.gc = shape.with_scale(practical_range_to_scale(shape, range));
            s.kappa = (delta - 1.0) / 2.0;
            s.mu = 2.0 + s.kappa;
            s.beta = equivalent_gw_support(s.gc, s.kappa, s.mu, cfg.sigma3_2, 2).beta;
            settings.push_back(s);
        }

    const std::size_t cells = settings.size() * cfg.n_list.size();
    std::vector<Replicate> out(cells * cfg.replicates);
    parallel_for(out.size(), threads, [&](std::size_t task) {
        const std::size_t cell = task / cfg.replicates, rep = task % cfg.replicates;
        const Setting& s = settings[cell / cfg.n_list.size()];
        const std::size_t n = cfg.n_list[cell % cfg.n_list.size()];
        Replicate& r = out[task];
        try {
            RandomStream sel(cfg.seed, replicate_stream(cell, rep, 0));
            LocationSet locs = n == cfg.pool_size ? pool : select_without_replacement(pool, n, sel);
            KrigingSystem truth(s.gc, locs);
            const double* s0 = cfg.target.data();
            for (std::size_t k = 0; k < nf; ++k) {
                KrigingSystem working(CovarianceModel::gw(cfg.sigma3_2, s.kappa, s.mu, cfg.factors[k] * s.beta, 2), locs);
                r.values.push_back(ratio_u1(truth, working, s0));
                if (k == 0) r.values.push_back(ratio_u2(truth, working, s0));
            }
            r.ok = true;
        } catch (const std::runtime_error&) {
            r.ok = false;
        }
    });

    for (std::size_t si = 0; si < settings.size(); ++si)
        for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
            const std::size_t cell = si * cfg.n_list.size() + ni;
            const Setting& s = settings[si];
            Table2Cell c;
            c.delta = s.gc.delta();
            c.range = cfg.ranges[si % cfg.ranges.size()];
            c.gamma1 = s.gc.scale;
            c.beta_star = s.beta;
            c.n = cfg.n_list[ni];
            c.replicates = cfg.replicates;
            // values: u1(f0), u2, u1(f1), u1(f2), ...
            std::vector<std::vector<double>> cols(nf + 1);
            for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                const Replicate& r = out[cell * cfg.replicates + rep];
                if (!r.ok) {
                    ++c.failures;
                    continue;
                }
                for (std::size_t k = 0; k <= nf; ++k) cols[k].push_back(r.values[k]);
            }
            c.flagged = flag_failures(c.failures, c.replicates);
            c.u1.push_back(summarize(cols[0]).mean);
            c.u2 = summarize(cols[1]).mean;
            for (std::size_t k = 1; k < nf; ++k) c.u1.push_back(summarize(cols[k + 1]).mean);
            res.cells.push_back(std::move(c));
        }
    return res;
}

ExperimentReport table2_report(const Table2Result& r) {
    ExperimentReport rep;
    rep.columns = {"delta", "range", "gamma1", "beta_star", "n", "replicates", "failures", "flagged"};
    for (double f : r.config.factors) rep.columns.push_back("u1_" + factor_label(f, "beta_star"));
    rep.columns.push_back("u2");
    for (const auto& c : r.cells) {
        std::vector<std::string> row{format_number(c.delta), format_number(c.range), format_number(c.gamma1),
                                     format_number(c.beta_star), std::to_string(c.n), std::to_string(c.replicates),
                                     std::to_string(c.failures), c.flagged ? "1" : "0"};
        for (double u : c.u1) row.push_back(format_number(u));
        row.push_back(format_number(c.u2));
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------

CovarianceModel parse_model_spec(const std::string& spec, int d) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ValidationError("model spec '" + spec + "' must look like family:p1,p2,...");
    std::string fam = spec.substr(0, colon);
    std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char c) { return std::tolower(c); });
    std::vector<double> p;
    std::stringstream ss(spec.substr(colon + 1));
    for (std::string tok; std::getline(ss, tok, ',');) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0') throw ValidationError("model spec '" + spec + "': bad number '" + tok + "'");
        p.push_back(v);
    }
    auto need = [&](std::size_t k, const char* form) {
        if (p.size() != k) throw ValidationError("model spec '" + spec + "': expected " + form);
    };
    if (fam == "gc") {
        need(4, "gc:sigma2,delta,lambda,gamma");
        return CovarianceModel::gc(p[0], p[1], p[2], p[3], d);
    }
    if (fam == "mt") {
        need(3, "mt:sigma2,nu,alpha");
        return CovarianceModel::mt(p[0], p[1], p[2], d);
    }
    if (fam == "gw") {
        need(4, "gw:sigma2,kappa,mu,beta");
        return CovarianceModel::gw(p[0], p[1], p[2], p[3], d);
    }
    if (fam == "sqexp") {
        need(2, "sqexp:sigma2,alpha");
        return CovarianceModel::sqexp(p[0], p[1], d);
    }
    throw ValidationError("model spec '" + spec + "': unknown family '" + fam + "'");
}

EquivalenceReport run_equiv(const CovarianceModel& truth, const CovarianceModel& working) {
    if (truth.dim != working.dim) throw ValidationError("true and working models have different dimensions");
    EquivalenceReport r;
    r.verdict = compatible(truth, working, truth.dim);
    if (truth.family != Family::SqExp) r.micro_true = microergodic(truth);
    if (working.family != Family::SqExp) r.micro_working = microergodic(working);
    if (truth.family == Family::GC && working.family == Family::GW) {
        const double delta = truth.delta(), kappa = working.kappa();
        if (delta >= 1.0 && delta < 2.0 && std::fabs(kappa - (delta - 1.0) / 2.0) <= 1e-12) {
            GwSupport s = equivalent_gw_support(truth, kappa, working.mu(), working.variance, truth.dim);
            r.beta_star = s.beta;
            for (auto& w : s.warnings) r.notes.push_back(w);
        } else {
            r.notes.push_back("no equivalent GW support: needs delta in [1,2) and kappa = (delta-1)/2");
        }
    }
    if (truth.family == Family::GC && working.family == Family::MT) {
        if (std::fabs(working.nu() - truth.delta() / 2.0) <= 1e-12)
            r.alpha = equivalent_mt_scale(truth, working.variance);
        else
            r.notes.push_back("no equivalent Matern scale: needs nu = delta/2");
    }
    return r;
}

ExperimentReport equiv_report(const EquivalenceReport& r) {
    ExperimentReport rep;
    rep.columns = {"key", "value"};
    auto add = [&](std::string k, std::string v) { rep.rows.push_back({std::move(k), std::move(v)}); };
    add("verdict", verdict_name(r.verdict.verdict));
    add("compatible", r.verdict.compatible ? "1" : "0");
    if (!r.verdict.reason.empty()) add("reason", r.verdict.reason);
    if (!r.verdict.dimension_constraint.empty()) add("dimension_constraint", r.verdict.dimension_constraint);
    for (const auto& c : r.verdict.conditions)
        add("condition:" + c.name, std::string(c.passed ? "pass" : "fail") + (c.detail.empty() ? "" : " " + c.detail));
    if (r.micro_true) add("microergodic_true", format_number(r.micro_true->value) + " " + r.micro_true->formula);
    if (r.micro_working)
        add("microergodic_working", format_number(r.micro_working->value) + " " + r.micro_working->formula);
    if (r.beta_star) add("beta_star", format_number(*r.beta_star));
    if (r.alpha) add("alpha", format_number(*r.alpha));
    for (const auto& n : r.notes) add("note", n);
    return rep;
}

}  // namespace gck
