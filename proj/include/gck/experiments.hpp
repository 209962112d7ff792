#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gck/covmodels.hpp"
#include "gck/equivalence.hpp"

namespace gck {

constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Table1, Table2, Equiv, Simulate, Fit, Predict };

std::string experiment_name(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Table1;
    std::uint64_t seed = 42;
    std::size_t replicates = 500;
    std::vector<std::size_t> n_list{500, 1000, 2000};
    std::vector<double> ranges{0.3, 0.6, 0.9};
    std::size_t pool_size = 4000;
    unsigned threads = 0;  // 0: GCK_THREADS, else hardware concurrency

    // table1: GC(delta, lambda, gamma0(range), sigma2) on [0,1]
    double delta = 0.75;
    double lambda = 1.5;
    double sigma2 = 1.0;
    double eps = 1e-12;          // lower end of the scale search
    double upper_factor = 10.0;  // upper end is upper_factor * gamma0
    bool fit = true;             // include the x = gamma_hat row

    // table2: GC(delta, lambda1, gamma1(range), sigma2) truth, GW(kappa=(delta-1)/2, mu=2+kappa, sigma3_2) working on [0,1]^2
    std::vector<double> deltas{1.2, 1.8};
    double lambda1 = 5.0;
    double sigma3_2 = 1.0;
    std::array<double, 2> target{0.26, 0.48};

    // table1: x = factor * gamma0; table2: support = factor * beta1*
    std::vector<double> factors{1.25, 0.75};

    static ExperimentConfig defaults(ExperimentKind k);
    void validate() const;
};

// Sample quantiles use type-7 linear interpolation; the variance has divisor m - 1.
struct SummaryStats {
    std::array<double, 5> q{};  // 5, 25, 50, 75, 95 %
    double mean = 0.0;
    double var = 0.0;
};

constexpr std::array<double, 5> kQuantileLevels{0.05, 0.25, 0.5, 0.75, 0.95};

double quantile_type7(const std::vector<double>& sorted, double p);
SummaryStats summarize(std::vector<double> values);
SummaryStats standard_normal_summary();

struct Table1Cell {
    double range = 0.0;
    std::string x;  // "gamma_hat", "gamma0" or "<factor>gamma0"
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    std::size_t boundary = 0;  // fits ending on the search boundary (gamma_hat rows)
    bool flagged = false;      // failures above 1 %
    SummaryStats stats;
};

struct Table1Result {
    std::vector<Table1Cell> cells;
    SummaryStats reference = standard_normal_summary();
    ExperimentConfig config;
};

struct Table2Cell {
    double delta = 0.0;
    double range = 0.0;
    double gamma1 = 0.0;
    double beta_star = 0.0;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    bool flagged = false;
    std::vector<double> u1;  // mean U1 per support factor
    double u2 = 0.0;         // mean U2 at beta1*
};

struct Table2Result {
    std::vector<Table2Cell> cells;
    ExperimentConfig config;
};

// Generic tabular output.  Numbers are printed with 6 significant digits.
struct ExperimentReport {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string to_csv() const;
};

std::string format_number(double v);

Table1Result run_table1(const ExperimentConfig& cfg);
Table2Result run_table2(const ExperimentConfig& cfg);
ExperimentReport table1_report(const Table1Result& r);
ExperimentReport table2_report(const Table2Result& r);

// "gc:sigma2,delta,lambda,gamma", "mt:sigma2,nu,alpha", "gw:sigma2,kappa,mu,beta", "sqexp:sigma2,alpha"
CovarianceModel parse_model_spec(const std::string& spec, int d);

struct EquivalenceReport {
    CompatibilityVerdict verdict;
    std::optional<MicroergodicValue> micro_true, micro_working;
    std::optional<double> beta_star;  // GC truth, GW working: support matching the GC
    std::optional<double> alpha;      // GC truth, MT working: scale matching the GC
    std::vector<std::string> notes;
};

EquivalenceReport run_equiv(const CovarianceModel& truth, const CovarianceModel& working);
ExperimentReport equiv_report(const EquivalenceReport& r);

// Worker count: explicit value, else GCK_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Calls fn(i) for i in [0, count) on `threads` workers.  The first exception
// thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Stream id for replicate `rep` of cell `cell`; `purpose` separates the draws
// made inside one replicate.  Never collides with kPoolStream.
std::uint64_t replicate_stream(std::size_t cell, std::size_t rep, unsigned purpose);

}  // namespace gck
