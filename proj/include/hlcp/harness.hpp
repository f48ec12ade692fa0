#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hlcp/change_tests.hpp"
#include "hlcp/nuisance.hpp"
#include "hlcp/simgen.hpp"

namespace hlcp {

/// Grid of simulation cells. With `heights` empty the grid describes a size
/// experiment (no shift); otherwise every height is applied to the same
/// null series of each replication (common random numbers).
struct ExperimentGrid {
    std::size_t n = 200;
    std::vector<double> phis{0.0, 0.4, 0.8};
    std::vector<double> nus{kInfiniteDf, 3.0, 2.0};
    std::vector<BlockPolicy> policies{BlockPolicy::fixed(), BlockPolicy::adaptive()};
    std::vector<TestKind> tests{TestKind::CUSUM, TestKind::WMW, TestKind::HLE};
    std::size_t replications = 4000;
    std::uint64_t seed = 20130101;
    std::size_t burn_in = 200;
    double critical_value = 1.36;
    std::vector<double> heights;
    double shift_position = 0.5;

    /// Throws std::invalid_argument listing the first violated constraint.
    void validate() const;
};

/// One (cell, policy, test, height) aggregate; also one CSV line.
struct ResultRow {
    double phi = 0.0;
    double nu = kInfiniteDf;
    BlockPolicy policy;
    TestKind test = TestKind::HLE;
    double height = 0.0;
    std::size_t n = 0;
    std::size_t reps = 0;
    double rejection_rate = 0.0;
    double mean_block_length = 0.0;
    std::uint64_t seed = 0;
    std::size_t degenerate = 0;  // replications with a zero nuisance estimate (never rejected)
};

struct SizeTable {
    std::vector<ResultRow> rows;
    std::size_t replications = 0;
    std::uint64_t seed = 0;

    /// Rejection percentage of one entry; throws std::out_of_range if absent.
    [[nodiscard]] double percent(double phi, double nu, BlockPolicy policy, TestKind test) const;
};

struct PowerCurve {
    double phi = 0.0;
    double nu = kInfiniteDf;
    BlockPolicy policy;
    TestKind test = TestKind::HLE;
    double shift_position = 0.5;
    std::vector<double> heights;
    std::vector<double> rates;
    std::vector<double> mean_block_length;
};

struct PowerResult {
    std::vector<ResultRow> rows;
    std::vector<PowerCurve> curves;
};

/// Heights used for the power study: 0.1..1 for phi = 0, 0.2..2 for 0.4 and
/// 0.4..4 for 0.8 (ten points each). Other phi values scale with 1 / (1 - phi).
[[nodiscard]] std::vector<double> default_heights(double phi);

/// Parallelism from HLCP_THREADS (integer >= 1); hardware concurrency otherwise.
[[nodiscard]] unsigned parallelism_from_env();

/// Runs body(i) for i in [0, count) on `threads` workers. Exceptions propagate.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

[[nodiscard]] SizeTable run_size_experiment(const ExperimentGrid& grid, unsigned threads = 0);
[[nodiscard]] PowerResult run_power_experiment(const ExperimentGrid& grid, unsigned threads = 0);

inline constexpr const char* kResultsCsvHeader =
    "phi,nu,policy,test,height,n,reps,rejection_rate,mean_block_length,seed";

/// Results CSV with the header above; nu = inf is written as `inf`.
[[nodiscard]] std::string results_csv(std::span<const ResultRow> rows);

// -- Bahadur remainder diagnostic ------------------------------------------------

struct BahadurRow {
    std::size_t n = 0;
    std::size_t reps = 0;
    double median_sup_remainder = 0.0;
};

/// sup_k lambda (1 - lambda) |Q_n(lambda, 1/2) - q + (U_n(lambda, q) - 1/2) / density|
/// with lambda = k / n. U_n counts ties at q with weight one half.
[[nodiscard]] double bahadur_sup_remainder(const TimeSeries& x, double q, double density);

/// Median sup-remainder over `reps` i.i.d. N(0, 1) series for each n
/// (q = 0 and density u(0) = 1 / (2 sqrt(pi)) are known there).
[[nodiscard]] std::vector<BahadurRow> bahadur_diagnostic(std::span<const std::size_t> ns,
                                                         std::size_t reps, std::uint64_t seed,
                                                         unsigned threads = 0);

}  // namespace hlcp
