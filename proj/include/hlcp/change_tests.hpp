#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "hlcp/nuisance.hpp"
#include "hlcp/time_series.hpp"
#include "hlcp/ustat.hpp"

namespace hlcp {

enum class TestKind { HLE, CUSUM, WMW };

[[nodiscard]] std::string to_string(TestKind kind);
/// Case-insensitive "hle" | "cusum" | "wmw".
[[nodiscard]] TestKind parse_test_kind(const std::string& name);

/// Outcome of one change-point test on one series.
///
/// raw_profile holds the signed per-split values whose absolute maximum
/// drives the statistic: weighted HL medians (k/n)(1-k/n) med_k for HLE,
/// centred partial sums for CUSUM and the rank double sums for WMW.
struct TestReport {
    TestKind test = TestKind::HLE;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t change_point = 0;
    SplitProfile raw_profile;
    double sigma_hat = 0.0;
    std::optional<double> u_hat_zero;
    std::size_t block_length = 1;
    std::string block_policy_name = "external";
    /// HLE: median pairwise difference at the change point (level-shift size).
    std::optional<double> shift_estimate;
    /// Nuisance estimate was zero and the profile flat; statistic set to 0.
    bool degenerate = false;
};

/// sqrt(n) (u_hat / sigma_hat) max_k (k/n)(1 - k/n) |med_k|. Needs n >= 4.
/// Throws DegenerateInputError if sigma_hat <= 0 or u_hat <= 0.
[[nodiscard]] TestReport hle_statistic(const TimeSeries& x, double sigma_hat, double u_hat);

/// max_k |S_k - (k/n) S_n| / (sigma_hat sqrt(n)).
[[nodiscard]] TestReport cusum_statistic(const TimeSeries& x, double sigma_hat);

/// max_k |sum_{i<=k<j} (1{x_i < x_j} + 1{x_i = x_j}/2 - 1/2)| / (sigma_hat n^(3/2)).
/// Evaluated through midranks in O(n log n).
[[nodiscard]] TestReport wmw_statistic(const TimeSeries& x, double sigma_hat);

/// Signed per-split profiles without studentisation.
[[nodiscard]] SplitProfile hle_weighted_profile(const TimeSeries& x);
[[nodiscard]] SplitProfile cusum_profile(const TimeSeries& x);
[[nodiscard]] SplitProfile wmw_profile(const TimeSeries& x);

/// Reject iff p_value < alpha (equality accepts). Throws for alpha outside (0, 1).
[[nodiscard]] bool decide(const TestReport& report, double alpha);

/// Full pipeline: estimates the nuisance parameters for `kind` under `policy`
/// and studentises. A series whose profile is identically zero and whose
/// nuisance estimate degenerates yields statistic 0 with `degenerate` set;
/// other degenerate cases throw DegenerateInputError.
[[nodiscard]] TestReport run_test(TestKind kind, const TimeSeries& x, BlockPolicy policy);

}  // namespace hlcp
