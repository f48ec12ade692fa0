#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hlcp {

/// Truncation control for the Kolmogorov series.
struct SeriesTolerance {
    double abs_tol = 1e-12;
    int max_terms = 100;
};

/// P(sup_{0<=s<=1} |B(s)| <= t) for a standard Brownian bridge B.
/// Uses the alternating series 1 - 2 sum (-1)^(k-1) exp(-2 k^2 t^2), stopped at
/// the first term below abs_tol. Below t = 0.5 the equivalent theta-function
/// form is summed instead, since the alternating one converges too slowly there.
[[nodiscard]] double kolmogorov_cdf(double t, SeriesTolerance tol = {});

/// Upper tail 1 - kolmogorov_cdf(t), summed directly for accuracy at large t.
[[nodiscard]] double kolmogorov_sf(double t, SeriesTolerance tol = {});

/// t with kolmogorov_cdf(t) = p, by bisection on [0.01, 10] to 1e-10.
/// Throws std::domain_error unless 0 < p < 1.
[[nodiscard]] double kolmogorov_quantile(double p, SeriesTolerance tol = {});

/// Monte Carlo sample of sup |bridge| from `paths` simulated bridges.
///
/// Each path is a Gaussian random walk on `steps` increments pinned by
/// subtracting (i / steps) W(1). When refine_between_steps is set, each step's
/// excursion is sampled from the exact Brownian-bridge extremum law between the
/// grid values, which removes the O(steps^-1/2) discretisation bias of the
/// grid maximum. Deterministic for a given seed.
[[nodiscard]] std::vector<double> bridge_sup_mc(std::size_t paths, std::size_t steps,
                                                std::uint64_t seed,
                                                bool refine_between_steps = true);

}  // namespace hlcp
