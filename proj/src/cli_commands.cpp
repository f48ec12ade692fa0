#include "hlcp/cli_commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "hlcp/csv_input.hpp"
#include "hlcp/kolmogorov.hpp"

namespace hlcp {

namespace {

using nlohmann::json;

SegmentNode test_segment(const TimeSeries& x, std::size_t start, std::size_t len, TestKind kind,
                         BlockPolicy policy, double alpha, std::size_t depth, std::size_t max_depth) {
    SegmentNode node;
    node.start = start;
    node.end = start + len - 1;
    node.depth = depth;
    try {
        node.report = run_test(kind, x.slice(start - 1, len), policy);
        node.reject = decide(*node.report, alpha);
    } catch (const DegenerateInputError& e) {
        node.error = e.what();
        return node;
    }
    if (node.reject && depth < max_depth) {
        const std::size_t k = node.report->change_point;
        if (k >= kMinDetectLength) {
            node.children.push_back(test_segment(x, start, k, kind, policy, alpha, depth + 1, max_depth));
        }
        if (len - k >= kMinDetectLength) {
            node.children.push_back(
                test_segment(x, start + k, len - k, kind, policy, alpha, depth + 1, max_depth));
        }
    }
    return node;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json node_json(const SegmentNode& node) {
    json j;
    j["start"] = node.start;
    j["end"] = node.end;
    j["depth"] = node.depth;
    if (!node.report) {
        j["error"] = node.error;
        return j;
    }
    const TestReport& r = *node.report;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["reject"] = node.reject;
    j["change_point"] = node.global_change_point();
    j["change_point_local"] = r.change_point;
    j["sigma_hat"] = r.sigma_hat;
    j["u_hat_zero"] = optional_number(r.u_hat_zero);
    j["block_length"] = r.block_length;
    j["block_policy"] = r.block_policy_name;
    j["shift_estimate"] = optional_number(r.shift_estimate);
    j["degenerate"] = r.degenerate;
    json children = json::array();
    for (const SegmentNode& c : node.children) children.push_back(node_json(c));
    j["children"] = std::move(children);
    return j;
}

std::string csv_number(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

void node_csv(const TestKind kind, const SegmentNode& node, std::string& out) {
    if (node.report) {
        const TestReport& r = *node.report;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(kind), node.depth,
                           node.start, node.end, r.statistic, r.p_value, node.reject ? 1 : 0,
                           node.global_change_point(), r.sigma_hat, csv_number(r.u_hat_zero),
                           r.block_length, r.block_policy_name, csv_number(r.shift_estimate));
    } else {
        out += fmt::format("{},{},{},{},,,,,,,,,\n", to_string(kind), node.depth, node.start, node.end);
    }
    for (const SegmentNode& c : node.children) node_csv(kind, c, out);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("unreadable_file", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("unwritable_file", "cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("unwritable_file", "write to '" + path + "' failed");
}

// -- config parsing helpers --

double parse_nu(const json& v) {
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Inf")) {
        return kInfiniteDf;
    }
    if (v.is_number()) return v.get<double>();
    throw std::invalid_argument("nu must be a number or \"inf\"");
}

template <typename T, typename F>
std::vector<T> scalar_or_array(const json& v, F&& conv) {
    std::vector<T> out;
    if (v.is_array()) {
        for (const json& e : v) out.push_back(conv(e));
    } else {
        out.push_back(conv(v));
    }
    return out;
}

}  // namespace

void DetectRequest::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("invalid_alpha", "alpha must lie in (0, 1)");
    if (format != "json" && format != "csv") {
        throw InputError("invalid_format", "format must be json or csv");
    }
    if (tests.empty()) throw InputError("invalid_tests", "at least one test is required");
}

std::vector<TestTree> detect_series(const TimeSeries& x, std::span<const TestKind> tests,
                                    BlockPolicy policy, double alpha, std::size_t depth) {
    if (x.size() < kMinDetectLength) {
        throw InputError("series_too_short", "series has " + std::to_string(x.size()) +
                                                 " observations; at least 8 are required");
    }
    std::vector<TestTree> trees;
    for (TestKind kind : tests) {
        trees.push_back(TestTree{kind, test_segment(x, 1, x.size(), kind, policy, alpha, 0, depth)});
    }
    return trees;
}

json detect_report_json(const DetectRequest& req, std::size_t n, const std::vector<TestTree>& trees) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["input"] = req.input;
    doc["column"] = req.column;
    doc["n"] = n;
    doc["alpha"] = req.alpha;
    doc["policy"] = req.policy.name();
    doc["recursive_depth"] = req.recursive_depth;
    json results = json::array();
    for (const TestTree& t : trees) {
        json entry = node_json(t.root);
        entry["test"] = to_string(t.test);
        results.push_back(std::move(entry));
    }
    doc["results"] = std::move(results);
    return doc;
}

std::string detect_report_csv(const std::vector<TestTree>& trees) {
    std::string out =
        "test,depth,start,end,statistic,p_value,reject,change_point,sigma_hat,u_hat_zero,"
        "block_length,block_policy,shift_estimate\n";
    for (const TestTree& t : trees) node_csv(t.test, t.root, out);
    return out;
}

void cmd_detect(const DetectRequest& req, std::ostream& out) {
    req.validate();
    const CsvTable table = read_csv_file(req.input);
    const std::size_t col = resolve_column(table, req.column);
    std::vector<double> values = numeric_column(table, col);
    if (values.size() < kMinDetectLength) {
        throw InputError("series_too_short", "series has " + std::to_string(values.size()) +
                                                 " observations; at least 8 are required");
    }
    const TimeSeries x(std::move(values));
    const auto trees = detect_series(x, req.tests, req.policy, req.alpha, req.recursive_depth);
    if (req.format == "csv") {
        out << detect_report_csv(trees);
    } else {
        out << detect_report_json(req, x.size(), trees).dump(2) << '\n';
    }
}

DeseasonalizeResult deseasonalize(std::span<const double> values, std::span<const int> months) {
    if (values.size() != months.size()) {
        throw InputError("invalid_month", "month labels and values differ in length");
    }
    std::map<int, std::vector<double>> groups;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (months[i] < 1 || months[i] > 12) {
            throw InputError("invalid_month", "month label out of range", i + 1);
        }
        groups[months[i]].push_back(values[i]);
    }
    DeseasonalizeResult res;
    res.values.assign(values.begin(), values.end());
    res.months.assign(months.begin(), months.end());
    for (auto& [m, g] : groups) res.month_medians[m] = median_of(std::move(g));
    res.adjusted.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        res.adjusted[i] = values[i] - res.month_medians.at(months[i]);
    }
    return res;
}

void cmd_deseasonalize(const std::string& input, const std::string& value_column,
                       const std::string& month_column_sel, const std::string& output_path,
                       std::ostream& out) {
    const CsvTable table = read_csv_file(input);
    const std::size_t mcol = resolve_column(table, month_column_sel);
    std::size_t vcol = 0;
    if (!value_column.empty()) {
        vcol = resolve_column(table, value_column);
    } else {
        vcol = mcol == 0 ? 1 : 0;
    }
    const std::vector<int> months = month_column(table, mcol);
    const std::vector<double> values = numeric_column(table, vcol);
    if (values.empty()) throw InputError("empty_input", "no observations in input");
    const DeseasonalizeResult res = deseasonalize(values, months);

    std::string csv = "month,value,deseasonalized\n";
    for (std::size_t i = 0; i < res.values.size(); ++i) {
        csv += fmt::format("{},{},{}\n", res.months[i], res.values[i], res.adjusted[i]);
    }
    write_text(output_path, csv);

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["output"] = output_path;
    doc["n"] = res.values.size();
    json medians = json::object();
    for (const auto& [m, med] : res.month_medians) medians[std::to_string(m)] = med;
    doc["month_medians"] = std::move(medians);
    out << doc.dump(2) << '\n';
}

SimulationPlan parse_simulation_config(const json& config) {
    static const std::set<std::string> known{
        "experiment", "n",        "phi",   "nu",     "policies",       "tests",
        "replications", "seed",   "burn_in", "critical_value", "heights", "shift_height",
        "shift_position"};
    if (!config.is_object()) {
        throw InputError("invalid_config", "configuration must be a JSON object");
    }
    std::vector<std::string> bad;
    for (auto it = config.begin(); it != config.end(); ++it) {
        if (!known.contains(it.key())) bad.push_back(it.key());
    }
    if (!bad.empty()) {
        std::string list;
        for (const auto& k : bad) list += (list.empty() ? "" : ", ") + k;
        throw InputError("invalid_config", "unknown configuration keys: " + list);
    }

    SimulationPlan plan;
    ExperimentGrid g;
    std::string current;
    bool default_heights_requested = false;
    try {
        current = "n";
        if (config.contains("n")) g.n = config.at("n").get<std::size_t>();
        current = "phi";
        if (config.contains("phi")) {
            g.phis = scalar_or_array<double>(config.at("phi"), [](const json& e) { return e.get<double>(); });
        }
        current = "nu";
        if (config.contains("nu")) g.nus = scalar_or_array<double>(config.at("nu"), parse_nu);
        current = "policies";
        if (config.contains("policies")) {
            g.policies = scalar_or_array<BlockPolicy>(
                config.at("policies"), [](const json& e) { return BlockPolicy::parse(e.get<std::string>()); });
        }
        current = "tests";
        if (config.contains("tests")) {
            g.tests = scalar_or_array<TestKind>(
                config.at("tests"), [](const json& e) { return parse_test_kind(e.get<std::string>()); });
        }
        current = "replications";
        if (config.contains("replications")) {
            g.replications = config.at("replications").get<std::size_t>();
        }
        current = "seed";
        if (config.contains("seed")) g.seed = config.at("seed").get<std::uint64_t>();
        current = "burn_in";
        if (config.contains("burn_in")) g.burn_in = config.at("burn_in").get<std::size_t>();
        current = "critical_value";
        if (config.contains("critical_value")) {
            g.critical_value = config.at("critical_value").get<double>();
        }
        current = "shift_position";
        if (config.contains("shift_position")) {
            g.shift_position = config.at("shift_position").get<double>();
        }
        current = "heights";
        if (config.contains("heights") && config.contains("shift_height")) {
            throw std::invalid_argument("give either heights or shift_height, not both");
        }
        if (config.contains("heights")) {
            const json& h = config.at("heights");
            if (h.is_string() && h.get<std::string>() == "default") {
                default_heights_requested = true;
            } else {
                g.heights = h.get<std::vector<double>>();
            }
        }
        current = "shift_height";
        if (config.contains("shift_height")) g.heights = {config.at("shift_height").get<double>()};
        current = "experiment";
        const bool has_heights = default_heights_requested || !g.heights.empty();
        plan.experiment = config.value("experiment", has_heights ? "power" : "size");
        if (plan.experiment != "size" && plan.experiment != "power") {
            throw std::invalid_argument("experiment must be size or power");
        }
        if (plan.experiment == "size" && has_heights) {
            throw std::invalid_argument("a size experiment takes no heights");
        }
        if (plan.experiment == "power" && !has_heights) default_heights_requested = true;
        g.validate();
        if (plan.experiment == "power" && g.replications == 0) {
            throw std::invalid_argument("replications must be >= 1");
        }
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError("invalid_config", "invalid value for '" + current + "': " + e.what());
    }

    if (plan.experiment == "power" && default_heights_requested) {
        for (double phi : g.phis) {
            ExperimentGrid per = g;
            per.phis = {phi};
            per.heights = default_heights(phi);
            plan.grids.push_back(std::move(per));
        }
    } else {
        plan.grids.push_back(g);
    }

    json r;
    r["experiment"] = plan.experiment;
    r["n"] = g.n;
    r["phi"] = g.phis;
    json nus = json::array();
    for (double nu : g.nus) nus.push_back(nu == kInfiniteDf ? json("inf") : json(nu));
    r["nu"] = std::move(nus);
    json pols = json::array();
    for (const auto& p : g.policies) pols.push_back(p.name());
    r["policies"] = std::move(pols);
    json tests = json::array();
    for (TestKind t : g.tests) tests.push_back(to_string(t));
    r["tests"] = std::move(tests);
    r["replications"] = g.replications;
    r["seed"] = g.seed;
    r["burn_in"] = g.burn_in;
    r["critical_value"] = g.critical_value;
    if (plan.experiment == "power") {
        r["shift_position"] = g.shift_position;
        json hs = json::object();
        for (const auto& grid : plan.grids) {
            for (double phi : grid.phis) hs[fmt::format("{}", phi)] = grid.heights;
        }
        r["heights"] = std::move(hs);
    }
    plan.resolved = std::move(r);
    return plan;
}

SimulationOutput run_simulation(const SimulationPlan& plan, unsigned threads) {
    std::vector<ResultRow> rows;
    for (const ExperimentGrid& g : plan.grids) {
        if (plan.experiment == "size") {
            const SizeTable t = run_size_experiment(g, threads);
            rows.insert(rows.end(), t.rows.begin(), t.rows.end());
        } else {
            const PowerResult p = run_power_experiment(g, threads);
            rows.insert(rows.end(), p.rows.begin(), p.rows.end());
        }
    }
    SimulationOutput out;
    out.csv = results_csv(rows);
    for (const ResultRow& r : rows) out.degenerate += r.degenerate;
    return out;
}

void cmd_simulate(const std::string& config_path, const std::string& output_path, std::ostream& out,
                  unsigned threads) {
    json config;
    try {
        config = json::parse(read_text(config_path));
    } catch (const json::parse_error& e) {
        throw InputError("invalid_config", std::string("configuration is not valid JSON: ") + e.what());
    }
    const SimulationPlan plan = parse_simulation_config(config);
    const SimulationOutput res = run_simulation(plan, threads);
    write_text(output_path, res.csv);
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["config"] = plan.resolved;
    doc["seed"] = plan.grids.front().seed;
    doc["output"] = output_path;
    doc["degenerate_replications"] = res.degenerate;
    out << doc.dump(2) << '\n';
}

std::string cmd_critval(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("range_error", "alpha must lie in (0, 1)");
    }
    return fmt::format("{:.4f}", kolmogorov_quantile(1.0 - alpha));
}

json error_document(const std::string& command, const std::string& code, const std::string& message,
                    std::optional<std::size_t> line) {
    json err;
    err["command"] = command;
    err["code"] = code;
    err["message"] = message;
    err["line"] = line ? json(*line) : json(nullptr);
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["error"] = std::move(err);
    return doc;
}

}  // namespace hlcp
