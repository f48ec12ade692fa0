#include "hlcp/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hlcp {

namespace {

constexpr double kThetaSwitch = 0.5;

// sqrt(2 pi) / t * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 t^2)); same function, fast for small t.
double cdf_theta_form(double t, const SeriesTolerance& tol) {
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * t * t);
    double sum = 0.0;
    for (int k = 1; k <= tol.max_terms; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double term = std::exp(-odd * odd * a);
        sum += term;
        if (term < tol.abs_tol) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / t * sum;
}

// 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2)
double tail_alternating(double t, const SeriesTolerance& tol) {
    double sum = 0.0;
    for (int k = 1; k <= tol.max_terms; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1) ? term : -term;
        if (term < tol.abs_tol) break;
    }
    return sum;
}

}  // namespace

double kolmogorov_cdf(double t, SeriesTolerance tol) {
    if (!(t > 0.0)) return 0.0;
    const double c = t < kThetaSwitch ? cdf_theta_form(t, tol) : 1.0 - tail_alternating(t, tol);
    return std::clamp(c, 0.0, 1.0);
}

double kolmogorov_sf(double t, SeriesTolerance tol) {
    if (!(t > 0.0)) return 1.0;
    const double s = t < kThetaSwitch ? 1.0 - cdf_theta_form(t, tol) : tail_alternating(t, tol);
    return std::clamp(s, 0.0, 1.0);
}

double kolmogorov_quantile(double p, SeriesTolerance tol) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("kolmogorov_quantile: p must lie in (0, 1)");
    }
    double lo = 0.01;
    double hi = 10.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid, tol) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> bridge_sup_mc(std::size_t paths, std::size_t steps, std::uint64_t seed,
                                  bool refine_between_steps) {
    if (paths < 1 || steps < 2) {
        throw std::domain_error("bridge_sup_mc: needs paths >= 1 and steps >= 2");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const double dt = 1.0 / static_cast<double>(steps);
    const double sd = std::sqrt(dt);
    std::vector<double> walk(steps + 1);
    std::vector<double> sups(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        walk[0] = 0.0;
        for (std::size_t i = 1; i <= steps; ++i) {
            walk[i] = walk[i - 1] + sd * normal(rng);
        }
        const double end = walk[steps];
        double sup = 0.0;
        double prev = 0.0;
        for (std::size_t i = 1; i <= steps; ++i) {
            const double b = walk[i] - static_cast<double>(i) * dt * end;
            sup = std::max(sup, std::abs(b));
            if (refine_between_steps) {
                // Extremes of a Brownian bridge of duration dt from prev to b.
                const double diff2 = (b - prev) * (b - prev);
                const double u1 = 1.0 - unif(rng);
                const double u2 = 1.0 - unif(rng);
                const double hi = 0.5 * (prev + b + std::sqrt(diff2 - 2.0 * dt * std::log(u1)));
                const double lo = 0.5 * (prev + b - std::sqrt(diff2 - 2.0 * dt * std::log(u2)));
                sup = std::max({sup, hi, -lo});
            }
            prev = b;
        }
        sups[p] = sup;
    }
    return sups;
}

}  // namespace hlcp
