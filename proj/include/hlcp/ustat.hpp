#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hlcp/time_series.hpp"

namespace hlcp {

/// Kernel g(x, y) of a two-sample U-statistic. The induced indicator
/// h(x, y, t) = 1{g(x, y) <= t} is what the U-process counts.
struct PairKernel {
    std::function<double(double, double)> eval;
    bool monotone_in_t = true;  // always true for indicator-induced kernels

    /// g(x, y) = y - x, the Hodges-Lehmann kernel.
    static PairKernel difference();
};

/// Statistic values over split points k = 1..n-1 (stored at index k-1).
struct SplitProfile {
    std::vector<double> values;
    std::size_t argmax_k = 0;  // smallest k attaining max |values|
    double max_abs = 0.0;

    /// Computes argmax_k/max_abs from the values; ties go to the smallest k.
    static SplitProfile from_values(std::vector<double> values);

    [[nodiscard]] std::size_t n() const noexcept { return values.size() + 1; }
    [[nodiscard]] double at(std::size_t k) const { return values.at(k - 1); }
};

/// U_n(k/n, t) = #{i <= k < j : g(x_i, x_j) <= t} / (k (n - k)).
[[nodiscard]] double u_process_at(const TimeSeries& x, std::size_t k, double t,
                                  const PairKernel& kernel);

/// Generalized inverse inf{t : U_n(k/n, t) >= p}, i.e. the r-th smallest kernel
/// value with r the smallest integer such that r / (k (n - k)) >= p.
[[nodiscard]] double u_quantile_at(const TimeSeries& x, std::size_t k, double p,
                                   const PairKernel& kernel);

/// Median of the pairwise differences x_j - x_i, i <= k < j. Even counts
/// average the two central order statistics.
[[nodiscard]] double hl_split_median(const TimeSeries& x, std::size_t k);

/// hl_split_median for every k = 1..n-1 in O(n^2 log n).
[[nodiscard]] SplitProfile hl_median_profile(const TimeSeries& x);

/// u_quantile_at with the difference kernel for every k = 1..n-1, O(n^2 log n).
[[nodiscard]] std::vector<double> difference_quantile_profile(const TimeSeries& x, double p);

/// u_process_at with the difference kernel for every k = 1..n-1, O(n^2).
[[nodiscard]] std::vector<double> difference_u_process_profile(const TimeSeries& x, double t);

/// Right-continuous ECDF at each observation: F_n(x_i) = #{j : x_j <= x_i} / n.
[[nodiscard]] std::vector<double> empirical_cdf_values(std::span<const double> x);

/// Smallest r in 1..count with r / count >= p (p in (0, 1)).
[[nodiscard]] std::size_t generalized_inverse_rank(double p, std::size_t count);

}  // namespace hlcp
