#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psep/boundary.hpp"
#include "psep/cli.hpp"
#include "psep/errors.hpp"

#include <json.hpp>

using namespace psep;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("psep_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig config_for(const std::string& dist, const std::string& ns, const fs::path& out) {
    return build_config({}, {{"dist", dist}, {"n", ns}, {"out", out.string()}});
}

int shell(const std::string& args) {
    const int status = std::system((std::string(PSEP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("distribution specs") {
    const auto u = parse_dist_spec("uniform:-1,1");
    CHECK(u.support_lo() == -1.0);
    CHECK(u.support_hi() == 1.0);
    const auto bu = parse_dist_spec("biuniform:-2,-1,1,2");
    CHECK(bu.cdf(0.0) == doctest::Approx(0.5));
    const auto te = parse_dist_spec("truncexp:1,0,3");
    CHECK(te.support_hi() == 3.0);
    CHECK(te.cdf(1.0) == doctest::Approx((1 - std::exp(-1.0)) / (1 - std::exp(-3.0))));
    CHECK(parse_dist_spec("twopoint:-1,0.5,1").cdf(0.0) == 0.5);
}

TEST_CASE("distribution spec errors carry positions") {
    const auto position = [](const std::string& s) {
        try {
            parse_dist_spec(s);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1L;
    };
    CHECK(position("uniform") == 7);
    CHECK(position("gauss:0,1") == 0);
    CHECK(position("uniform:0,x") == 10);
    CHECK(position("uniform:0") == 9);
    CHECK(position("uniform:0,1,2") == 12);
    CHECK(position("biuniform:-2,-1,,2") == 16);
    CHECK_THROWS_AS(parse_dist_spec("uniform:0,inf"), ConfigError);
    CHECK_THROWS_AS(parse_dist_spec("uniform:1,0"), ConfigError);
    CHECK_THROWS_AS(parse_dist_spec("cdf:/nonexistent"), ConfigError);
}

TEST_CASE("config text and precedence") {
    std::istringstream text("# run\ndist = uniform:0,1\nn=4,8\np=3\nseed=9\n\n");
    const Settings file = parse_config_text(text);
    CHECK(file.at("dist") == "uniform:0,1");
    const RunConfig cfg = build_config(file, {{"p", "2"}});
    CHECK(cfg.p == 2.0);
    CHECK(cfg.seed == 9);
    CHECK(cfg.ns == std::vector<std::size_t>{4, 8});
    CHECK(build_config(file, {{"cdf-file", "x.txt"}}).dist.empty());

    std::istringstream bad("dist uniform:0,1\n");
    CHECK_THROWS_AS(parse_config_text(bad), ParseError);
    CHECK_THROWS_AS(build_config({{"bogus", "1"}}, {}), ConfigError);
    CHECK_THROWS_AS(build_config({}, {{"dist", "uniform:0,1"}, {"n", ""}}), ConfigError);
    CHECK_THROWS_AS(build_config({}, {{"dist", "uniform:0,1"}, {"n", "8,4"}}), ConfigError);
    CHECK_THROWS_AS(build_config({}, {{"dist", "uniform:0,1"}, {"p", "0.5"}}), ConfigError);
    CHECK_THROWS_AS(build_config({}, {{"dist", "uniform:0,1"}, {"dt", "0.1"}}), ConfigError);
    CHECK_THROWS_AS(build_config({}, {}), ConfigError);
}

TEST_CASE("empty n list fails before any file is written") {
    const fs::path dir = scratch("empty");
    RunConfig cfg;
    cfg.dist = "uniform:0,1";
    cfg.ns.clear();
    cfg.out = dir.string();
    std::ostringstream log, err;
    CHECK(run_command("boundary", cfg, log, err) == 2);
    CHECK(!fs::exists(dir));
}

TEST_CASE("boundary command") {
    const fs::path dir = scratch("boundary");
    RunConfig cfg = config_for("twopoint:-1,0.5,1", "1", dir);
    cfg.svg = true;
    std::ostringstream log, err;
    REQUIRE(run_command("boundary", cfg, log, err) == 0);
    std::ifstream f(dir / "boundary_n1.csv");
    const auto curve = read_curve_csv(f);
    CHECK(curve.samples.size() == cfg.grid);
    for (const auto& s : curve.samples) CHECK(std::abs(s.x) == 1.0);
    CHECK(fs::exists(dir / "boundary_n1.svg"));

    const fs::path strip = scratch("strip");
    REQUIRE(run_command("boundary", config_for("biuniform:-2,-1,1,2", "5,20,100,200", strip), log, err) == 0);
    for (int n : {5, 20, 100, 200}) {
        std::ifstream g(strip / ("boundary_n" + std::to_string(n) + ".csv"));
        for (const auto& s : read_curve_csv(g).samples) CHECK(std::abs(s.x) >= 1.0 - 1e-9);
    }
}

TEST_CASE("converge command") {
    const fs::path dir = scratch("converge");
    std::ostringstream log, err;
    REQUIRE(run_command("converge", config_for("uniform:0,1", "10,20,40,80", dir), log, err) == 0);
    std::ifstream f(dir / "converge.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "n,lp_dist,bound,hardy_series,hardy_trace");
    int rows = 0;
    while (std::getline(f, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double n, lp, bound, hs, ht;
        row >> n >> lp >> bound >> hs >> ht;
        CHECK(std::abs(lp - 1.0 / (std::sqrt(3.0) * n)) < 1e-10);
        CHECK(lp <= bound);
        ++rows;
    }
    CHECK(rows == 4);
    const auto summary = nlohmann::json::parse(slurp(dir / "converge.json"));
    CHECK(summary["shift"].get<double>() == 0.5);
    CHECK(summary.contains("slope_hardy_series"));
    CHECK(fs::exists(dir / "series_n10.csv"));
    CHECK(run_command("converge", config_for("uniform:0,1", "10", dir), log, err) == 2);

    RunConfig raw = config_for("uniform:0,1", "10,20", dir);
    raw.recenter = false;
    CHECK(run_command("converge", raw, log, err) == 2);
}

TEST_CASE("simulate command is deterministic") {
    const fs::path dir = scratch("simulate");
    RunConfig cfg = config_for("twopoint:-1,0.5,1", "1,4", dir);
    cfg.samples = 5000;
    cfg.paths = 20;
    cfg.dt = 1e-3;
    std::ostringstream log, err;
    REQUIRE(run_command("simulate", cfg, log, err) == 0);
    const std::string first = slurp(dir / "simulate_report.json");
    REQUIRE(run_command("simulate", cfg, log, err) == 0);
    CHECK(slurp(dir / "simulate_report.json") == first);
    const auto j = nlohmann::json::parse(first);
    CHECK(j["ks"]["n=1"].get<double>() < 0.03);
    CHECK(j["estimates"].contains("n=1/C1"));
    CHECK(j["seed"].get<int>() == 1);
}

TEST_CASE("cli binary exit codes") {
    CHECK(shell("--help") == 0);
    CHECK(shell("boundary --help") == 0);
    CHECK(shell("boundary --dist uniform:0,1 --n 4 --bogus") == 2);
    CHECK(shell("boundary --dist gauss:0,1") == 2);
    CHECK(shell("boundary --dist uniform:0,1 --n 4 --out /proc/psep_no_such_dir") == 3);
    const fs::path dir = scratch("binary");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "dist=uniform:-1,1\nn=3\ngrid=64\nout=" << (dir / "from_config").string() << "\n";
    }
    CHECK(shell("boundary --config " + (dir / "run.cfg").string()) == 0);
    CHECK(fs::exists(dir / "from_config" / "boundary_n3.csv"));
    CHECK(shell("boundary --config " + (dir / "run.cfg").string() + " --n 5") == 0);
    CHECK(fs::exists(dir / "from_config" / "boundary_n5.csv"));

    const std::string help_file = (dir / "help.txt").string();
    CHECK(std::system((std::string(PSEP_CLI_PATH) + " --help > " + help_file).c_str()) == 0);
    const std::string help = slurp(help_file);
    for (const char* g : {"uniform:a,b", "biuniform:a,b,c,d", "twopoint:x1,w1,x2", "truncexp:rate,lo,hi", "cdf:path"}) {
        CHECK(help.find(g) != std::string::npos);
    }
}
