#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gck/errors.hpp"
#include "gck/experiments.hpp"

using namespace gck;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig small_table1() {
    auto c = ExperimentConfig::defaults(ExperimentKind::Table1);
    c.replicates = 6;
    c.n_list = {30, 50};
    c.ranges = {0.3};
    c.pool_size = 300;
    return c;
}

ExperimentConfig small_table2() {
    auto c = ExperimentConfig::defaults(ExperimentKind::Table2);
    c.replicates = 4;
    c.n_list = {20, 40};
    c.ranges = {0.9};
    c.deltas = {1.2};
    c.pool_size = 200;
    return c;
}

// Runs the CLI binary named by GCK_CLI; returns its exit status.
int run_cli(const std::string& args, const fs::path& stdout_file) {
    const char* cli = std::getenv("GCK_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = std::string("\"") + cli + "\" " + args + " > \"" + stdout_file.string() + "\" 2>/dev/null";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("type-7 quantiles and moments") {
    std::vector<double> v{1, 2, 3, 4};
    CHECK(quantile_type7(v, 0.0) == 1);
    CHECK(quantile_type7(v, 1.0) == 4);
    CHECK(quantile_type7(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_type7(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile_type7({7.0}, 0.3) == 7.0);
    CHECK(std::isnan(quantile_type7({}, 0.5)));

    auto s = summarize({4, 1, 3, 2});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.var == doctest::Approx(5.0 / 3));
    CHECK(s.q[2] == doctest::Approx(2.5));
    CHECK(s.q[0] == doctest::Approx(1.15));

    auto ref = standard_normal_summary();
    CHECK(ref.q[0] == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
    CHECK(ref.q[1] == doctest::Approx(-0.6744897501960817).epsilon(1e-12));
    CHECK(ref.q[2] == 0.0);
    CHECK(ref.mean == 0.0);
    CHECK(ref.var == 1.0);
}

TEST_CASE("number formatting and csv") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3) == "0.333333");
    CHECK(format_number(1234567.0) == "1.23457e+06");
    ExperimentReport r;
    r.columns = {"a", "b"};
    r.rows = {{"1", "x,y"}};
    CHECK(r.to_csv() == "a,b\n1,\"x,y\"\n");
}

TEST_CASE("model specs") {
    auto g = parse_model_spec("gc:2,0.75,1.5,0.1", 2);
    CHECK(g.family == Family::GC);
    CHECK(g.variance == 2.0);
    CHECK(g.dim == 2);
    CHECK(parse_model_spec("mt:1,0.5,0.2", 1).family == Family::MT);
    CHECK(parse_model_spec("gw:1,0,2.5,0.3", 2).family == Family::GW);
    CHECK(parse_model_spec("sqexp:1,0.2", 3).family == Family::SqExp);
    CHECK_THROWS(parse_model_spec("gc:1,0.75", 1));
    CHECK_THROWS(parse_model_spec("foo:1,2", 1));
    CHECK_THROWS(parse_model_spec("gc:1,x,1,1", 1));
    CHECK_THROWS(parse_model_spec("gc:1,3,1.5,0.1", 1));
}

TEST_CASE("configuration validation") {
    auto c = small_table1();
    CHECK_NOTHROW(c.validate());
    c.replicates = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_table1();
    c.n_list = {1000};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_table1();
    c.ranges = {-0.1};
    CHECK_THROWS_AS(run_table1(c), ValidationError);
    auto t = small_table2();
    t.factors = {0.5, 1.0};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t = small_table2();
    t.target = {1.5, 0.2};
    CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("parallel_for and streams") {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    CHECK(replicate_stream(0, 0, 0) != replicate_stream(0, 0, 1));
    CHECK(replicate_stream(0, 1, 0) != replicate_stream(1, 0, 0));
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("table1 is deterministic across thread counts") {
    auto c = small_table1();
    c.threads = 1;
    auto a = table1_report(run_table1(c)).to_csv();
    c.threads = 8;
    auto b = table1_report(run_table1(c)).to_csv();
    CHECK(a == b);
    auto r = run_table1(c);
    // gamma_hat plus gamma0 plus two factors, per n
    CHECK(r.cells.size() == 8);
    for (auto& cell : r.cells) {
        CHECK(cell.replicates == 6);
        CHECK(cell.failures == 0);
        CHECK(!cell.flagged);
    }
    c.seed = 43;
    CHECK(table1_report(run_table1(c)).to_csv() != a);
    CHECK(a.substr(0, a.find('\n')) == "range,x,n,replicates,failures,flagged,boundary,q05,q25,q50,q75,q95,mean,var");
}

TEST_CASE("table2 is deterministic and sane") {
    auto c = small_table2();
    c.threads = 1;
    auto r1 = run_table2(c);
    c.threads = 8;
    auto r8 = run_table2(c);
    CHECK(table2_report(r1).to_csv() == table2_report(r8).to_csv());
    REQUIRE(r1.cells.size() == 2);
    for (auto& cell : r1.cells) {
        CHECK(cell.failures == 0);
        CHECK(cell.u1.size() == 3);
        // the BLUP under the truth is optimal
        for (double u : cell.u1) CHECK(u >= 1 - 1e-12);
        CHECK(cell.u2 > 0);
        CHECK(cell.beta_star > 0);
    }
}

TEST_CASE("equivalence report") {
    auto gc = parse_model_spec("gc:1,1.2,5,0.2875", 2);
    auto rep = run_equiv(gc, parse_model_spec("gc:1,1.2,5,0.2875", 2));
    CHECK(rep.verdict.compatible);
    auto csv = equiv_report(rep).to_csv();
    CHECK(csv.rfind("key,value\n", 0) == 0);
    CHECK(csv.find("verdict,") != std::string::npos);
    auto bad = run_equiv(gc, parse_model_spec("gc:1,1.2,5,0.5", 2));
    CHECK(!bad.verdict.compatible);
}

TEST_CASE("command line") {
    if (!std::getenv("GCK_CLI")) {
        MESSAGE("GCK_CLI not set, skipping");
        return;
    }
    const fs::path dir = fs::temp_directory_path() / ("gck_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path so = dir / "stdout.txt";

    CHECK(run_cli("--version", so) == 0);
    CHECK(slurp(so).find(kVersion) != std::string::npos);
    CHECK(run_cli("", so) == 1);
    CHECK(run_cli("table1 --bogus", so) == 1);
    CHECK(run_cli("table1 --config \"" + (dir / "missing.ini").string() + "\"", so) == 1);
    CHECK(run_cli("table1 --replicates 0", so) == 2);
    CHECK(run_cli("equiv --true gc:1,3,1,1 --working gc:1,1,1,1", so) == 2);
    CHECK(run_cli("table1 --replicates 2 --n 10 --ranges 0.3 --pool 50 --out /nonexistent_dir/x.csv", so) == 3);

    {
        std::ofstream ini(dir / "t1.ini");
        ini << "[table1]\nreplicates = 3\nn = 20,30\nranges = 0.3\npool = 100\n";
    }
    const fs::path out = dir / "t1.csv";
    REQUIRE(run_cli("table1 --config \"" + (dir / "t1.ini").string() + "\" --replicates 4 --threads 2 --out \"" +
                        out.string() + "\"",
                    so) == 0);
    auto csv = slurp(out);
    CHECK(csv.rfind("range,x,n,", 0) == 0);
    CHECK(csv.find("0.3,gamma_hat,20,4,") != std::string::npos);  // flag beats the file
    CHECK(csv.find("0.3,gamma0,30,4,") != std::string::npos);
    auto meta = nlohmann::json::parse(slurp(fs::path(out.string() + ".meta.json")));
    CHECK(meta["experiment"] == "table1");
    CHECK(meta["seed"] == 42);
    CHECK(meta["replicates"] == 4);
    CHECK(meta["threads"] == 2);
    CHECK(meta["version"] == kVersion);
    CHECK(meta.contains("runtime_seconds"));
    CHECK(meta.contains("timestamp"));

    // simulate, fit and predict round trip
    const fs::path data = dir / "d.csv";
    REQUIRE(run_cli("simulate --model gc:1,0.75,1.5,0.05 --n 80 --seed 5 --out \"" + data.string() + "\"", so) == 0);
    CHECK(slurp(data).rfind("x1,z\n", 0) == 0);
    REQUIRE(run_cli("fit --data \"" + data.string() + "\" --hi 0.5", so) == 0);
    auto fit = slurp(so);
    CHECK(fit.find("gamma_hat,") != std::string::npos);
    CHECK(fit.find("ci_lo,") != std::string::npos);
    REQUIRE(run_cli("predict --data \"" + data.string() + "\" --working gc:1,0.75,1.5,0.05 --at 0.4", so) == 0);
    auto pr = slurp(so);
    CHECK(pr.find("u1,1\n") != std::string::npos);
    CHECK(pr.find("u2,1\n") != std::string::npos);
    CHECK(run_cli("predict --data \"" + data.string() + "\" --working gc:1,0.75,1.5,0.05 --at 0.4,0.1", so) == 2);

    fs::remove_all(dir);
}
