#include "hlcp/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hlcp/ustat.hpp"

namespace hlcp {

std::string BlockPolicy::name() const {
    return kind == BlockPolicyKind::Fixed ? "fixed" : "adaptive";
}

BlockPolicy BlockPolicy::parse(const std::string& name) {
    if (name == "fixed") return fixed();
    if (name == "adaptive") return adaptive();
    throw std::invalid_argument("unknown block policy '" + name + "' (expected fixed|adaptive)");
}

double subsample_sigma(std::span<const double> y, std::size_t l) {
    const std::size_t n = y.size();
    if (l < 1 || l > n) {
        throw std::domain_error("subsample_sigma: block length must lie in 1..n");
    }
    const std::size_t blocks = n / l;
    double abs_sum = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t j = b * l; j < (b + 1) * l; ++j) {
            s += y[j];
        }
        abs_sum += std::abs(s);
    }
    const double mean_abs = abs_sum / static_cast<double>(blocks);
    return std::sqrt(std::numbers::pi / (2.0 * static_cast<double>(l))) * mean_abs;
}

std::size_t fixed_block_length(std::size_t n) {
    const double l = std::floor(std::cbrt(3.0 * static_cast<double>(n)) + 1.0);
    return std::clamp<std::size_t>(static_cast<std::size_t>(l), 1, std::max<std::size_t>(n, 1));
}

std::size_t adaptive_block_length(std::size_t n, double phi_hat) {
    if (!(std::abs(phi_hat) < 1.0)) {
        throw std::domain_error("adaptive_block_length: |phi| must be < 1");
    }
    if (n <= 1 || phi_hat <= 0.0) {
        return 1;
    }
    const double ratio = 2.0 * phi_hat / (1.0 - phi_hat * phi_hat);
    const double l = std::ceil(std::cbrt(static_cast<double>(n)) * std::pow(ratio, 2.0 / 3.0));
    if (!(l < static_cast<double>(n))) {
        return n;
    }
    return std::max<std::size_t>(static_cast<std::size_t>(l), 1);
}

double lag1_autocorr(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 2) {
        throw std::domain_error("lag1_autocorr: needs at least two observations");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double c = y[t] - mean;
        den += c * c;
        if (t + 1 < n) {
            num += c * (y[t + 1] - mean);
        }
    }
    if (!(den > 0.0)) {
        throw DegenerateInputError("lag1_autocorr: constant series");
    }
    return std::clamp(num / den, -kAutocorrClamp, kAutocorrClamp);
}

SigmaEstimate block_length_for(BlockPolicy policy, std::span<const double> y) {
    SigmaEstimate est;
    if (policy.kind == BlockPolicyKind::Fixed) {
        est.block_length = fixed_block_length(y.size());
    } else {
        est.phi_hat = lag1_autocorr(y);
        est.block_length = adaptive_block_length(y.size(), est.phi_hat);
    }
    return est;
}

std::vector<double> centered_ecdf(const TimeSeries& x) {
    std::vector<double> f = empirical_cdf_values(x.values());
    for (double& v : f) v -= 0.5;
    return f;
}

SigmaEstimate sigma_for_rank_tests(const TimeSeries& x, BlockPolicy policy) {
    if (x.size() < 2) {
        throw std::domain_error("sigma_for_rank_tests: needs n >= 2");
    }
    const std::vector<double> f = centered_ecdf(x);
    SigmaEstimate est = block_length_for(policy, f);
    est.sigma = subsample_sigma(f, est.block_length);
    return est;
}

double block_variance_sigma(std::span<const double> y, std::size_t l) {
    const std::size_t n = y.size();
    if (l < 1 || l > n) {
        throw std::domain_error("block_variance_sigma: block length must lie in 1..n");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    const std::size_t blocks = n / l;
    double sq_sum = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t j = b * l; j < (b + 1) * l; ++j) {
            s += y[j] - mean;
        }
        sq_sum += s * s;
    }
    return std::sqrt(sq_sum / static_cast<double>(blocks * l));
}

SigmaEstimate sigma_for_cusum(const TimeSeries& x, BlockPolicy policy) {
    if (x.size() < 2) {
        throw std::domain_error("sigma_for_cusum: needs n >= 2");
    }
    SigmaEstimate est = block_length_for(policy, centered_ecdf(x));
    est.sigma = block_variance_sigma(x.values(), est.block_length);
    return est;
}

double sample_quantile(std::span<const double> x, double p) {
    if (x.empty()) {
        throw std::domain_error("sample_quantile: empty input");
    }
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double h = static_cast<double>(s.size() - 1) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

Bandwidth default_bandwidth(const TimeSeries& x) {
    if (x.size() < 2) {
        throw std::domain_error("default_bandwidth: needs n >= 2");
    }
    const auto v = x.values();
    const double iqr = sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
    const double guard = 1e-8 * (1.0 + std::abs(sample_quantile(v, 0.5)));
    const double b = std::max(iqr, guard) * std::pow(static_cast<double>(x.size()), -0.2);
    return Bandwidth{b, "iqr*n^-1/5"};
}

double u_hat_zero(const TimeSeries& x, const Bandwidth& b) {
    if (!(b.value > 0.0)) {
        throw std::domain_error("u_hat_zero: bandwidth must be positive");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw std::domain_error("u_hat_zero: needs n >= 2");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += epanechnikov((x[i] - x[j]) / b.value);
        }
    }
    const double nn = static_cast<double>(n);
    return 2.0 * sum / (nn * (nn - 1.0) * b.value);
}

}  // namespace hlcp
