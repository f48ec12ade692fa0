// hlcp: change-point detection with the Hodges-Lehmann, CUSUM and WMW tests.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hlcp/cli_commands.hpp"
#include "hlcp/csv_input.hpp"
#include "hlcp/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int fail(const std::string& command, const std::string& code, const std::string& message,
         std::optional<std::size_t> line = {}) {
    std::cerr << hlcp::error_document(command, code, message, line).dump() << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust change-point tests for time series (HLE, CUSUM, WMW)"};
    app.require_subcommand(1);

    std::string tests_arg = "hle,cusum,wmw";
    std::string policy_arg = "fixed";
    hlcp::DetectRequest detect;
    auto* detect_cmd = app.add_subcommand("detect", "Test a CSV column for a level shift");
    detect_cmd->add_option("--input", detect.input, "Input CSV file")->required();
    detect_cmd->add_option("--column", detect.column, "Column name or 0-based index");
    detect_cmd->add_option("--tests", tests_arg, "Comma-separated subset of hle,cusum,wmw");
    detect_cmd->add_option("--policy", policy_arg, "Block length rule: fixed|adaptive");
    detect_cmd->add_option("--alpha", detect.alpha, "Significance level");
    detect_cmd->add_option("--recursive", detect.recursive_depth, "Binary segmentation depth");
    detect_cmd->add_option("--format", detect.format, "Report format: json|csv");

    std::string des_input;
    std::string des_output;
    std::string des_month = "month";
    std::string des_column;
    auto* des_cmd = app.add_subcommand("deseasonalize", "Subtract per-calendar-month medians");
    des_cmd->add_option("--input", des_input, "Input CSV file")->required();
    des_cmd->add_option("--month-column", des_month, "Month column name or index");
    des_cmd->add_option("--column", des_column, "Value column name or index");
    des_cmd->add_option("--output", des_output, "Output CSV file")->required();

    std::string sim_config;
    std::string sim_output;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a size or power experiment");
    sim_cmd->add_option("--config", sim_config, "Experiment JSON config")->required();
    sim_cmd->add_option("--output", sim_output, "Results CSV file")->required();

    double crit_alpha = 0.05;
    auto* crit_cmd = app.add_subcommand("critval", "Asymptotic critical value sup|bridge|");
    crit_cmd->add_option("--alpha", crit_alpha, "Significance level")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << hlcp::error_document("hlcp", "usage", e.what()).dump() << '\n';
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (*detect_cmd) {
            detect.tests.clear();
            for (const auto& t : split_list(tests_arg)) detect.tests.push_back(hlcp::parse_test_kind(t));
            detect.policy = hlcp::BlockPolicy::parse(policy_arg);
            hlcp::cmd_detect(detect, std::cout);
        } else if (*des_cmd) {
            hlcp::cmd_deseasonalize(des_input, des_column, des_month, des_output, std::cout);
        } else if (*sim_cmd) {
            hlcp::cmd_simulate(sim_config, sim_output, std::cout, hlcp::parallelism_from_env());
        } else if (*crit_cmd) {
            std::cout << hlcp::cmd_critval(crit_alpha) << '\n';
        }
    } catch (const hlcp::InputError& e) {
        return fail(command, e.code(), e.what(), e.line());
    } catch (const hlcp::DegenerateInputError& e) {
        return fail(command, "degenerate_input", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(command, "invalid_argument", e.what());
    } catch (const std::exception& e) {
        return fail(command, "internal_error", e.what());
    }
    return 0;
}
