#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hlcp/time_series.hpp"

namespace hlcp {

inline constexpr double kInfiniteDf = std::numeric_limits<double>::infinity();
/// Phi(1), the calibration target for every innovation law.
inline constexpr double kUnitQuantileLevel = 0.8413447;

/// t_nu innovations rescaled so that P(eps <= 1) = 0.8413447; nu = inf is N(0, 1).
struct InnovationSpec {
    double nu = kInfiniteDf;
    double scale_factor = 1.0;

    /// Throws std::domain_error for nu < 1.
    static InnovationSpec student(double nu);
    static InnovationSpec normal() { return {}; }
    [[nodiscard]] bool is_normal() const noexcept { return nu == kInfiniteDf; }
};

/// One simulation cell.
struct SimConfig {
    std::size_t n = 200;
    double phi = 0.0;
    InnovationSpec innovations;
    double shift_height = 0.0;
    double shift_position = 0.5;
    std::size_t replications = 1;
    std::uint64_t seed = 0;
    std::size_t burn_in = 200;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Student t CDF through the regularised incomplete beta function.
[[nodiscard]] double student_t_cdf(double t, double nu);

/// s = F_nu^{-1}(0.8413447) by bisection to 1e-10; exactly 1 for nu = inf.
[[nodiscard]] double t_scale_factor(double nu);

/// Derives an independent stream seed from a master seed and any number of
/// tags (cell coordinates, replication index). SplitMix64 finaliser chain.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

using Engine = std::mt19937_64;

/// Draws `count` i.i.d. innovations from the spec.
[[nodiscard]] std::vector<double> innovation_stream(std::size_t count, const InnovationSpec& spec,
                                                    Engine& rng);

/// Y_t = phi Y_{t-1} + eps_t from Y_0 = 0, the first burn_in values discarded.
[[nodiscard]] TimeSeries ar1_generate(std::size_t n, double phi, const InnovationSpec& spec,
                                      std::size_t burn_in, std::uint64_t seed);
[[nodiscard]] std::vector<double> ar1_from_innovations(std::span<const double> eps, double phi,
                                                       std::size_t burn_in);

/// Adds h to every x_j with j > floor(position n) (1-based j).
[[nodiscard]] TimeSeries inject_shift(const TimeSeries& x, double h, double position);

}  // namespace hlcp
