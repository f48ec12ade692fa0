#include "hlcp/simgen.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <bit>
#include <cmath>
#include <stdexcept>

namespace hlcp {

InnovationSpec InnovationSpec::student(double nu) {
    return InnovationSpec{nu, t_scale_factor(nu)};
}

void SimConfig::validate() const {
    if (n < 2) throw std::invalid_argument("SimConfig: n must be >= 2");
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("SimConfig: |phi| must be < 1");
    if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
    if (!(shift_position > 0.0 && shift_position < 1.0)) {
        throw std::invalid_argument("SimConfig: shift_position must lie in (0, 1)");
    }
    if (!(innovations.nu >= 1.0)) throw std::invalid_argument("SimConfig: nu must be >= 1");
}

double student_t_cdf(double t, double nu) {
    if (nu == kInfiniteDf) {
        return 0.5 * std::erfc(-t / std::sqrt(2.0));
    }
    const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, nu / (nu + t * t));
    return t >= 0.0 ? 1.0 - tail : tail;
}

double t_scale_factor(double nu) {
    if (!(nu >= 1.0)) {
        throw std::domain_error("t_scale_factor: nu must be >= 1");
    }
    if (nu == kInfiniteDf) {
        return 1.0;
    }
    double lo = 0.0;
    double hi = 10.0;  // F_1(10) is about 0.968
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, nu) < kUnitQuantileLevel) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master);
    for (std::uint64_t t : tags) {
        h = mix(h ^ mix(t));
    }
    return h;
}

std::vector<double> innovation_stream(std::size_t count, const InnovationSpec& spec, Engine& rng) {
    std::vector<double> eps(count);
    if (spec.is_normal()) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& e : eps) e = normal(rng);
    } else {
        std::student_t_distribution<double> student(spec.nu);
        for (double& e : eps) e = student(rng) / spec.scale_factor;
    }
    return eps;
}

std::vector<double> ar1_from_innovations(std::span<const double> eps, double phi,
                                         std::size_t burn_in) {
    if (!(std::abs(phi) < 1.0)) {
        throw std::domain_error("ar1: |phi| must be < 1");
    }
    if (eps.size() < burn_in) {
        throw std::invalid_argument("ar1: fewer innovations than burn-in steps");
    }
    std::vector<double> out(eps.size() - burn_in);
    double y = 0.0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        y = phi * y + eps[t];
        if (t >= burn_in) out[t - burn_in] = y;
    }
    return out;
}

TimeSeries ar1_generate(std::size_t n, double phi, const InnovationSpec& spec, std::size_t burn_in,
                        std::uint64_t seed) {
    Engine rng(seed);
    const auto eps = innovation_stream(burn_in + n, spec, rng);
    return TimeSeries(ar1_from_innovations(eps, phi, burn_in));
}

TimeSeries inject_shift(const TimeSeries& x, double h, double position) {
    if (!(position > 0.0 && position < 1.0)) {
        throw std::domain_error("inject_shift: position must lie in (0, 1)");
    }
    const auto first = static_cast<std::size_t>(std::floor(position * static_cast<double>(x.size())));
    std::vector<double> v(x.values().begin(), x.values().end());
    for (std::size_t j = first; j < v.size(); ++j) v[j] += h;
    return TimeSeries(std::move(v), x.months());
}

}  // namespace hlcp
