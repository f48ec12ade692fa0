#include <catch2/catch_amalgamated.hpp>

#include <fmt/format.h>
#include <json.hpp>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "hlcp/cli_commands.hpp"
#include "hlcp/csv_input.hpp"

using namespace hlcp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / ("hlcp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> step_series(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 0.1);
    std::vector<double> v;
    for (int i = 0; i < 200; ++i) v.push_back((i < 100 ? 0.0 : 1.0) + z(rng));
    return v;
}

std::string to_csv(const std::vector<double>& v, const std::string& header = "value") {
    std::string s = header + "\n";
    for (double e : v) s += fmt::format("{}\n", e);
    return s;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    const fs::path err_file = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string(HLCP_CLI_PATH) + " " + args + " 2>" + err_file.string();
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err_file);
    return r;
}

}  // namespace

TEST_CASE("csv parsing", "[cli][csv]") {
    const auto t = parse_csv("a,b\n1,2\n\n3,4\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 2);
    CHECK(t.line_numbers == std::vector<std::size_t>{2, 4});
    CHECK(resolve_column(t, "b") == 1);
    CHECK(resolve_column(t, "0") == 0);
    CHECK(numeric_column(t, 1) == std::vector<double>{2, 4});

    const auto nh = parse_csv("1.5\n-2e3\n");
    CHECK(nh.header.empty());
    CHECK(numeric_column(nh, 0) == std::vector<double>{1.5, -2000.0});

    CHECK_FALSE(parse_number("1,5").has_value());
    CHECK_FALSE(parse_number("nan").has_value());
    CHECK_FALSE(parse_number("inf").has_value());
    CHECK_FALSE(parse_number("").has_value());
    CHECK(parse_number(" 2.25 ").value() == 2.25);

    try {
        static_cast<void>(numeric_column(parse_csv("v\n1\nx\n"), 0));
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(e.code() == "non_numeric");
        CHECK(e.line().value() == 3);
    }
    CHECK_THROWS_AS(resolve_column(t, "zzz"), InputError);
    CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), InputError);
}

TEST_CASE("deseasonalize", "[cli]") {
    const std::vector<double> v{1, 3, 10, 20};
    const std::vector<int> m{1, 1, 2, 2};
    const auto r = deseasonalize(v, m);
    CHECK(r.adjusted == std::vector<double>{-1, 1, -5, 5});
    CHECK(r.month_medians.at(1) == 2.0);
    CHECK(r.month_medians.at(2) == 15.0);

    const std::vector<double> c{4, 4, 7, 7, 4};
    const std::vector<int> cm{3, 3, 8, 8, 3};
    for (double a : deseasonalize(c, cm).adjusted) CHECK(a == 0.0);

    const std::vector<double> s{5, 1, 9};
    const std::vector<int> sm{6, 6, 6};
    CHECK(deseasonalize(s, sm).adjusted == std::vector<double>{0, -4, 4});

    const std::vector<int> bad{1, 13, 2, 2};
    CHECK_THROWS_AS(deseasonalize(v, bad), InputError);
}

TEST_CASE("detect on constant input accepts everywhere", "[cli]") {
    const TimeSeries x(std::vector<double>(30, 2.0));
    const std::vector<TestKind> kinds{TestKind::HLE, TestKind::CUSUM, TestKind::WMW};
    for (const auto& tree : detect_series(x, kinds, BlockPolicy::fixed(), 0.05, 2)) {
        REQUIRE(tree.root.report);
        CHECK(tree.root.report->p_value == 1.0);
        CHECK_FALSE(tree.root.reject);
        CHECK(tree.root.children.empty());
    }
}

TEST_CASE("detect finds a clear step", "[cli]") {
    const TimeSeries x(step_series(2013));
    const std::vector<TestKind> kinds{TestKind::HLE, TestKind::CUSUM, TestKind::WMW};
    for (const auto& tree : detect_series(x, kinds, BlockPolicy::fixed(), 0.05, 0)) {
        const auto& r = *tree.root.report;
        CHECK(tree.root.reject);
        CHECK(r.change_point >= 95);
        CHECK(r.change_point <= 105);
    }
}

TEST_CASE("detect on reversed input mirrors the change point", "[cli]") {
    // 216 = 24 blocks of the fixed length 9, so reversal keeps the same blocks.
    std::mt19937_64 rng(2014);
    std::normal_distribution<double> z(0.0, 0.1);
    std::vector<double> v;
    for (int i = 0; i < 216; ++i) v.push_back((i < 108 ? 0.0 : 1.0) + z(rng));
    const TimeSeries x(v);
    const std::vector<TestKind> kinds{TestKind::HLE, TestKind::CUSUM, TestKind::WMW};
    const std::vector<double> rv(x.values().rbegin(), x.values().rend());
    const auto fwd = detect_series(x, kinds, BlockPolicy::fixed(), 0.05, 0);
    const auto rev = detect_series(TimeSeries(rv), kinds, BlockPolicy::fixed(), 0.05, 0);
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        const auto& r = *fwd[i].root.report;
        CHECK(rev[i].root.report->statistic == Catch::Approx(r.statistic).epsilon(1e-12));
        CHECK(rev[i].root.report->change_point == 216 - r.change_point);
    }
    CHECK(fwd[0].root.report->shift_estimate.value() == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("recursive detection builds a segment tree", "[cli]") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 0.1);
    std::vector<double> v;
    for (int i = 0; i < 300; ++i) v.push_back((i < 100 ? 0.0 : (i < 200 ? 1.0 : 2.5)) + z(rng));
    const TimeSeries x(v);
    const std::vector<TestKind> kinds{TestKind::HLE};
    const auto trees = detect_series(x, kinds, BlockPolicy::fixed(), 0.05, 3);
    const auto& root = trees[0].root;
    REQUIRE(root.reject);
    REQUIRE(root.children.size() == 2);
    CHECK(root.children[0].start == 1);
    CHECK(root.children[0].end == root.global_change_point());
    CHECK(root.children[1].start == root.global_change_point() + 1);
    CHECK(root.children[1].end == 300);
    std::size_t found_second = 0;
    for (const auto& c : root.children) {
        if (c.reject) found_second = c.global_change_point();
    }
    CHECK(((found_second >= 95 && found_second <= 105) || (found_second >= 195 && found_second <= 205)));

    const auto none = detect_series(x, kinds, BlockPolicy::fixed(), 0.05, 0);
    CHECK(none[0].root.children.empty());
    CHECK_THROWS_AS(detect_series(TimeSeries({1, 2, 3}), kinds, BlockPolicy::fixed(), 0.05, 0), InputError);
}

TEST_CASE("cmd_detect equals the in-process API", "[cli]") {
    const auto v = step_series(5);
    const auto path = write_file("step.csv", to_csv(v, "temp"));
    DetectRequest req;
    req.input = path.string();
    req.column = "temp";
    req.recursive_depth = 1;
    std::ostringstream out;
    cmd_detect(req, out);
    const json doc = json::parse(out.str());

    const auto trees = detect_series(TimeSeries(v), req.tests, req.policy, req.alpha, 1);
    CHECK(doc == detect_report_json(req, v.size(), trees));
    CHECK(doc["schema_version"] == kReportSchemaVersion);
    CHECK(doc["results"].size() == 3);

    req.format = "csv";
    std::ostringstream csv;
    cmd_detect(req, csv);
    CHECK(csv.str() == detect_report_csv(trees));

    DetectRequest bad = req;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(cmd_detect(bad, csv), InputError);
}

TEST_CASE("simulation config parsing", "[cli]") {
    const auto plan = parse_simulation_config(json::parse(
        R"({"n": 50, "phi": [0, 0.4], "nu": ["inf", 3], "replications": 10, "seed": 5, "heights": "default"})"));
    CHECK(plan.experiment == "power");
    REQUIRE(plan.grids.size() == 2);
    CHECK(plan.grids[1].heights == default_heights(0.4));
    CHECK(plan.resolved["nu"][0] == "inf");

    try {
        static_cast<void>(parse_simulation_config(json::parse(R"({"n": 50, "colour": 1, "speed": 2})")));
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(e.code() == "invalid_config");
        CHECK(std::string(e.what()).find("colour") != std::string::npos);
        CHECK(std::string(e.what()).find("speed") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_simulation_config(json::parse(R"({"replications": 0})")), InputError);
    CHECK_THROWS_AS(parse_simulation_config(json::parse(R"({"phi": 1.2})")), InputError);
}

TEST_CASE("simulate single cell", "[cli]") {
    const auto plan = parse_simulation_config(json::parse(
        R"({"experiment": "size", "n": 40, "phi": 0, "nu": "inf", "policies": "fixed", "replications": 10, "seed": 3})"));
    const auto a = run_simulation(plan, 1);
    const auto b = run_simulation(plan, 2);
    CHECK(a.csv == b.csv);
    std::istringstream lines(a.csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == kResultsCsvHeader);
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 10);
        const double rate = std::stod(cells[7]);
        CHECK(rate >= 0.0);
        CHECK(rate <= 1.0);
        CHECK(cells[1] == "inf");
        CHECK(cells[6] == "10");
    }
    CHECK(rows == 3);
}

TEST_CASE("critval", "[cli]") {
    CHECK(cmd_critval(0.05) == "1.3581");
    CHECK(std::stod(cmd_critval(0.5)) == Catch::Approx(0.83).margin(0.005));
    CHECK(std::stod(cmd_critval(0.01)) > std::stod(cmd_critval(0.05)));
    CHECK_THROWS_AS(cmd_critval(0.0), InputError);
}

TEST_CASE("binary: success paths", "[cli][binary]") {
    const auto crit = run_cli("critval --alpha 0.05");
    CHECK(crit.code == 0);
    CHECK(crit.out == "1.3581\n");

    const auto data = write_file("bin_step.csv", to_csv(step_series(11)));
    const auto det = run_cli("detect --input " + data.string() + " --tests hle,wmw --policy adaptive");
    REQUIRE(det.code == 0);
    const json doc = json::parse(det.out);
    CHECK(doc["results"].size() == 2);
    CHECK(doc["results"][0]["test"] == "HLE");
    CHECK(doc["results"][0]["reject"] == true);
    CHECK(doc["policy"] == "adaptive");

    const auto monthly = write_file("monthly.csv", "month,value\n1,1\n1,3\n2,10\n2,20\n");
    const auto out = scratch_dir() / "des.csv";
    const auto des = run_cli("deseasonalize --input " + monthly.string() + " --column value --output " + out.string());
    REQUIRE(des.code == 0);
    CHECK(read_file(out) == "month,value,deseasonalized\n1,1,-1\n1,3,1\n2,10,-5\n2,20,5\n");
    CHECK(json::parse(des.out)["month_medians"]["2"] == 15.0);

    const auto cfg = write_file("sim.json", R"({"n": 40, "phi": 0.4, "nu": 2, "replications": 6, "seed": 9})");
    const auto o1 = scratch_dir() / "sim1.csv";
    const auto o2 = scratch_dir() / "sim2.csv";
    const auto s1 = run_cli("simulate --config " + cfg.string() + " --output " + o1.string());
    const auto s2 = run_cli("simulate --config " + cfg.string() + " --output " + o2.string());
    REQUIRE(s1.code == 0);
    REQUIRE(s2.code == 0);
    CHECK(read_file(o1) == read_file(o2));
    CHECK(json::parse(s1.out)["seed"] == 9);
}

TEST_CASE("binary: errors are structured", "[cli][binary]") {
    const auto missing = run_cli("detect --input /nonexistent/x.csv");
    CHECK(missing.code != 0);
    CHECK(json::parse(missing.err)["error"]["code"] == "unreadable_file");

    const auto bad = write_file("bad.csv", "v\n1\n2\nabc\n");
    const auto nonnum = run_cli("detect --input " + bad.string());
    CHECK(nonnum.code != 0);
    const json e = json::parse(nonnum.err);
    CHECK(e["error"]["code"] == "non_numeric");
    CHECK(e["error"]["line"] == 4);
    CHECK(e["error"]["command"] == "detect");

    const auto shortf = write_file("short.csv", "1\n2\n3\n");
    CHECK(json::parse(run_cli("detect --input " + shortf.string()).err)["error"]["code"] == "series_too_short");

    const auto months = write_file("badmonth.csv", "month,value\n1,1\n14,2\n");
    const auto bm = run_cli("deseasonalize --input " + months.string() + " --output " +
                            (scratch_dir() / "x.csv").string());
    CHECK(bm.code != 0);
    CHECK(json::parse(bm.err)["error"]["code"] == "invalid_month");

    const auto cfg = write_file("badcfg.json", R"({"n": 40, "bogus": true})");
    const auto sc = run_cli("simulate --config " + cfg.string() + " --output " + (scratch_dir() / "y.csv").string());
    CHECK(sc.code != 0);
    CHECK(json::parse(sc.err)["error"]["code"] == "invalid_config");

    const auto cv = run_cli("critval --alpha 2");
    CHECK(cv.code != 0);
    CHECK(json::parse(cv.err)["error"]["code"] == "range_error");

    const auto usage = run_cli("detect");
    CHECK(usage.code == 2);
    CHECK(json::parse(usage.err)["error"]["code"] == "usage");
}
