#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlcp/change_tests.hpp"
#include "hlcp/harness.hpp"
#include "hlcp/time_series.hpp"

namespace hlcp {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kMinDetectLength = 8;

// -- detect -------------------------------------------------------------------

struct DetectRequest {
    std::string input;
    std::string column = "0";
    std::vector<TestKind> tests{TestKind::HLE, TestKind::CUSUM, TestKind::WMW};
    BlockPolicy policy = BlockPolicy::fixed();
    double alpha = 0.05;
    std::string format = "json";  // json | csv
    std::size_t recursive_depth = 0;

    void validate() const;
};

/// One tested segment [start, end] (1-based, inclusive) of the input.
struct SegmentNode {
    std::size_t start = 1;
    std::size_t end = 1;
    std::size_t depth = 0;
    std::optional<TestReport> report;  // empty when the test failed on this segment
    std::string error;
    bool reject = false;
    std::vector<SegmentNode> children;

    /// Change point as a global 1-based index (last observation before the shift).
    [[nodiscard]] std::size_t global_change_point() const {
        return report ? start - 1 + report->change_point : 0;
    }
};

struct TestTree {
    TestKind test;
    SegmentNode root;
};

/// Runs each test on x and, for rejected segments, re-tests both sides of the
/// estimated change point with fresh nuisance estimates until `depth` levels
/// have been explored. Segments shorter than 8 are not tested.
[[nodiscard]] std::vector<TestTree> detect_series(const TimeSeries& x, std::span<const TestKind> tests,
                                                  BlockPolicy policy, double alpha, std::size_t depth);

[[nodiscard]] nlohmann::json detect_report_json(const DetectRequest& req, std::size_t n,
                                                const std::vector<TestTree>& trees);
[[nodiscard]] std::string detect_report_csv(const std::vector<TestTree>& trees);

/// Reads the input, runs detect_series and writes the report to `out`.
void cmd_detect(const DetectRequest& req, std::ostream& out);

// -- deseasonalize ---------------------------------------------------------------

struct DeseasonalizeResult {
    std::vector<double> values;
    std::vector<int> months;
    std::vector<double> adjusted;
    std::map<int, double> month_medians;
};

/// adjusted_t = x_t - median{x_s : month(s) = month(t)}.
[[nodiscard]] DeseasonalizeResult deseasonalize(std::span<const double> values,
                                                std::span<const int> months);

/// Writes `month,value,deseasonalized` CSV to output_path and the per-month
/// medians as JSON to `out`.
void cmd_deseasonalize(const std::string& input, const std::string& value_column,
                       const std::string& month_column, const std::string& output_path,
                       std::ostream& out);

// -- simulate --------------------------------------------------------------------

/// Parsed experiment configuration. Multiple grids arise when the power
/// heights are "default" (one grid per phi).
struct SimulationPlan {
    std::string experiment = "size";  // size | power
    std::vector<ExperimentGrid> grids;
    nlohmann::json resolved;
};

/// Throws InputError("invalid_config") naming every unknown or invalid key.
[[nodiscard]] SimulationPlan parse_simulation_config(const nlohmann::json& config);

/// Runs the plan and returns the results CSV text plus degenerate counts.
struct SimulationOutput {
    std::string csv;
    std::size_t degenerate = 0;
};
[[nodiscard]] SimulationOutput run_simulation(const SimulationPlan& plan, unsigned threads = 0);

void cmd_simulate(const std::string& config_path, const std::string& output_path, std::ostream& out,
                  unsigned threads = 0);

// -- critval ---------------------------------------------------------------------

/// kolmogorov_quantile(1 - alpha) rendered with four decimals.
[[nodiscard]] std::string cmd_critval(double alpha);

/// Machine-parsable error document written to stderr by the tool.
[[nodiscard]] nlohmann::json error_document(const std::string& command, const std::string& code,
                                            const std::string& message,
                                            std::optional<std::size_t> line = {});

}  // namespace hlcp
