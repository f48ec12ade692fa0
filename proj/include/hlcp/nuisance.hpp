#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlcp/time_series.hpp"

namespace hlcp {

/// Raised when a nuisance estimate is zero or a series carries no variation.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BlockPolicyKind { Fixed, Adaptive };

/// Block-length rule for the subsampling variance estimator.
///  - Fixed:    l = floor((3n)^(1/3) + 1)
///  - Adaptive: Carlstein's AR(1) MSE-optimal length with phi replaced by the
///              lag-one autocorrelation of F_n(x_t).
struct BlockPolicy {
    BlockPolicyKind kind = BlockPolicyKind::Fixed;

    static constexpr BlockPolicy fixed() noexcept { return {BlockPolicyKind::Fixed}; }
    static constexpr BlockPolicy adaptive() noexcept { return {BlockPolicyKind::Adaptive}; }
    [[nodiscard]] std::string name() const;
    /// Accepts "fixed" or "adaptive"; throws std::invalid_argument otherwise.
    static BlockPolicy parse(const std::string& name);

    friend bool operator==(BlockPolicy, BlockPolicy) = default;
};

struct Bandwidth {
    double value = 0.0;
    std::string rule;
};

/// Result of a long-run standard deviation estimate.
struct SigmaEstimate {
    double sigma = 0.0;
    std::size_t block_length = 1;
    double phi_hat = 0.0;  // lag-one autocorrelation used (0 for the fixed rule)
};

inline constexpr double kAutocorrClamp = 0.999;

/// sigma_hat = sqrt(pi / (2 l)) * mean_i |S_i(l)| over the floor(n / l)
/// complete non-overlapping blocks; a trailing partial block is dropped.
[[nodiscard]] double subsample_sigma(std::span<const double> y, std::size_t l);

[[nodiscard]] std::size_t fixed_block_length(std::size_t n);

/// max(ceil(n^(1/3) (2 phi / (1 - phi^2))^(2/3)), 1), clamped to [1, n].
/// Non-positive phi gives 1. Throws std::domain_error for |phi| >= 1.
[[nodiscard]] std::size_t adaptive_block_length(std::size_t n, double phi_hat);

/// Lag-one sample autocorrelation, clamped into [-0.999, 0.999].
/// Throws DegenerateInputError for constant input.
[[nodiscard]] double lag1_autocorr(std::span<const double> y);

/// Block length the policy picks for a series whose (transformed) values are y.
[[nodiscard]] SigmaEstimate block_length_for(BlockPolicy policy, std::span<const double> y);

/// F_n(x_j) - 1/2 for every observation, in time order.
[[nodiscard]] std::vector<double> centered_ecdf(const TimeSeries& x);

/// Long-run sigma of F(X_t), shared by the HLE and WMW tests. The adaptive
/// block length uses the lag-one autocorrelation of the same transformed series.
[[nodiscard]] SigmaEstimate sigma_for_rank_tests(const TimeSeries& x, BlockPolicy policy);

/// Carlstein's non-overlapping block estimator of the long-run standard
/// deviation: sqrt(sum_i S_i(l)^2 / (floor(n / l) l)) with S_i the block sums
/// of y - mean(y). A trailing partial block is dropped.
[[nodiscard]] double block_variance_sigma(std::span<const double> y, std::size_t l);

/// Long-run sigma of the raw series for the CUSUM test (block_variance_sigma).
/// The adaptive block length still comes from the ranks, so every test sees
/// the same l.
[[nodiscard]] SigmaEstimate sigma_for_cusum(const TimeSeries& x, BlockPolicy policy);

/// Linear-interpolation sample quantile (R type 7).
[[nodiscard]] double sample_quantile(std::span<const double> x, double p);

/// b = max(IQR(x), 1e-8 (1 + |median(x)|)) * n^(-1/5).
[[nodiscard]] Bandwidth default_bandwidth(const TimeSeries& x);

/// Epanechnikov kernel 0.75 (1 - u^2) on |u| <= 1.
[[nodiscard]] constexpr double epanechnikov(double u) noexcept {
    return (u >= -1.0 && u <= 1.0) ? 0.75 * (1.0 - u * u) : 0.0;
}

/// Kernel estimate of the density of X - Y at zero from all pairwise
/// differences: 2 / (n (n - 1) b) * sum_{i<j} K((x_i - x_j) / b).
[[nodiscard]] double u_hat_zero(const TimeSeries& x, const Bandwidth& b);

}  // namespace hlcp
