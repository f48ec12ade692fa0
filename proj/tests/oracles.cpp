#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

namespace {

std::vector<double> sorted_pairs(const std::vector<double>& x, std::size_t k) {
    std::vector<double> d;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = k; j < x.size(); ++j) d.push_back(x[j] - x[i]);
    }
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace

double hl_median(const std::vector<double>& x, std::size_t k) {
    const auto d = sorted_pairs(x, k);
    const std::size_t m = d.size();
    return m % 2 == 1 ? d[m / 2] : (d[m / 2 - 1] + d[m / 2]) / 2.0;
}

std::int64_t wmw_twice_sum(const std::vector<double>& x, std::size_t k) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = k; j < x.size(); ++j) {
            s += (x[i] < x[j] ? 2 : 0) + (x[i] == x[j] ? 1 : 0) - 1;
        }
    }
    return s;
}

double cusum_at(const std::vector<double>& x, std::size_t k) {
    double head = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += x[i];
        if (i < k) head += x[i];
    }
    return head - static_cast<double>(k) / static_cast<double>(x.size()) * total;
}

double u_process(const std::vector<double>& x, std::size_t k, double t) {
    const auto d = sorted_pairs(x, k);
    const auto hits = std::upper_bound(d.begin(), d.end(), t) - d.begin();
    return static_cast<double>(hits) / static_cast<double>(d.size());
}

double pair_order_stat(const std::vector<double>& x, std::size_t k, std::size_t r) {
    return sorted_pairs(x, k).at(r - 1);
}

double t2_cdf(double t) { return 0.5 + t / (2.0 * std::sqrt(2.0 + t * t)); }

double t3_cdf(double t) {
    const double s3 = std::sqrt(3.0);
    return 0.5 + (t / (s3 * (1.0 + t * t / 3.0)) + std::atan(t / s3)) / std::numbers::pi;
}

std::vector<double> random_series(std::uint64_t seed, std::size_t n, bool integer_ties) {
    std::mt19937_64 rng(seed);
    std::vector<double> x(n);
    if (integer_ties) {
        std::uniform_int_distribution<int> d(-3, 3);
        for (double& v : x) v = d(rng);
    } else {
        std::normal_distribution<double> d(0.0, 1.0);
        for (double& v : x) v = d(rng);
    }
    return x;
}

}  // namespace oracle
