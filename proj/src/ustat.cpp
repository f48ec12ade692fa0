#include "hlcp/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "hlcp/diff_multiset.hpp"

namespace hlcp {

namespace {

void check_split(const TimeSeries& x, std::size_t k, const char* who) {
    if (k < 1 || k + 1 > x.size()) {
        throw std::domain_error(std::string(who) + ": split index k=" + std::to_string(k) +
                                " outside 1..n-1 (n=" + std::to_string(x.size()) + ")");
    }
}

// Triangular index of the pair (i, j), i < j, both 0-based.
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) noexcept {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

// Every difference x_j - x_i (i < j) compressed onto a sorted distinct key set.
struct PairSlots {
    DiffMultiset multiset;
    std::vector<std::uint32_t> slot;  // indexed by pair_index
};

PairSlots build_pair_slots(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(pairs);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            order.emplace_back(x[j] - x[i], static_cast<std::uint32_t>(pair_index(i, j, n)));
        }
    }
    std::sort(order.begin(), order.end());

    std::vector<double> keys;
    keys.reserve(pairs);
    std::vector<std::uint32_t> slot(pairs);
    for (const auto& [d, idx] : order) {
        if (keys.empty() || keys.back() != d) {
            keys.push_back(d);
        }
        slot[idx] = static_cast<std::uint32_t>(keys.size() - 1);
    }
    return PairSlots{DiffMultiset::from_sorted_keys(std::move(keys)), std::move(slot)};
}

// Walks k = 1..n-1 keeping the multiset equal to {x_j - x_i : i < k <= j}
// (0-based j), calling visit(k, multiset) at each split.
template <typename Visit>
void sweep_splits(std::span<const double> x, Visit&& visit) {
    const std::size_t n = x.size();
    PairSlots ps = build_pair_slots(x);
    for (std::size_t j = 1; j < n; ++j) {
        ps.multiset.insert_slot(ps.slot[pair_index(0, j, n)]);
    }
    visit(std::size_t{1}, ps.multiset);
    for (std::size_t m = 1; m + 1 < n; ++m) {
        // x_m moves from the second sample into the first.
        for (std::size_t i = 0; i < m; ++i) {
            ps.multiset.erase_slot(ps.slot[pair_index(i, m, n)]);
        }
        for (std::size_t j = m + 1; j < n; ++j) {
            ps.multiset.insert_slot(ps.slot[pair_index(m, j, n)]);
        }
        visit(m + 1, ps.multiset);
    }
}

double multiset_median(const DiffMultiset& ms) {
    const std::size_t c = ms.size();
    if (c % 2 == 1) {
        return ms.select((c + 1) / 2);
    }
    return (ms.select(c / 2) + ms.select(c / 2 + 1)) / 2.0;
}

}  // namespace

PairKernel PairKernel::difference() {
    return PairKernel{[](double a, double b) { return b - a; }, true};
}

SplitProfile SplitProfile::from_values(std::vector<double> values) {
    SplitProfile p;
    p.values = std::move(values);
    if (p.values.empty()) {
        throw std::invalid_argument("SplitProfile: needs at least one split point");
    }
    p.argmax_k = 1;
    p.max_abs = std::abs(p.values[0]);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
        const double a = std::abs(p.values[i]);
        if (a > p.max_abs) {
            p.max_abs = a;
            p.argmax_k = i + 1;
        }
    }
    return p;
}

std::size_t generalized_inverse_rank(double p, std::size_t count) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("quantile level p must lie in (0, 1)");
    }
    if (count == 0) {
        throw std::domain_error("quantile of an empty set");
    }
    const double c = static_cast<double>(count);
    auto r = static_cast<std::size_t>(std::ceil(p * c));
    r = std::clamp<std::size_t>(r, 1, count);
    // Align with the count / total comparison the U-process itself uses.
    while (r > 1 && static_cast<double>(r - 1) / c >= p) {
        --r;
    }
    while (r < count && static_cast<double>(r) / c < p) {
        ++r;
    }
    return r;
}

double u_process_at(const TimeSeries& x, std::size_t k, double t, const PairKernel& kernel) {
    check_split(x, k, "u_process_at");
    const std::size_t n = x.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = k; j < n; ++j) {
            if (kernel.eval(x[i], x[j]) <= t) {
                ++hits;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(k * (n - k));
}

double u_quantile_at(const TimeSeries& x, std::size_t k, double p, const PairKernel& kernel) {
    check_split(x, k, "u_quantile_at");
    const std::size_t n = x.size();
    std::vector<double> vals;
    vals.reserve(k * (n - k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = k; j < n; ++j) {
            vals.push_back(kernel.eval(x[i], x[j]));
        }
    }
    const std::size_t r = generalized_inverse_rank(p, vals.size());
    const auto nth = vals.begin() + static_cast<std::ptrdiff_t>(r - 1);
    std::nth_element(vals.begin(), nth, vals.end());
    return *nth;
}

double hl_split_median(const TimeSeries& x, std::size_t k) {
    check_split(x, k, "hl_split_median");
    const std::size_t n = x.size();
    std::vector<double> d;
    d.reserve(k * (n - k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = k; j < n; ++j) {
            d.push_back(x[j] - x[i]);
        }
    }
    const std::size_t c = d.size();
    const auto upper = d.begin() + static_cast<std::ptrdiff_t>(c / 2);
    std::nth_element(d.begin(), upper, d.end());
    if (c % 2 == 1) {
        return *upper;
    }
    const double lower = *std::max_element(d.begin(), upper);
    return (lower + *upper) / 2.0;
}

SplitProfile hl_median_profile(const TimeSeries& x) {
    if (x.size() < 2) {
        throw std::domain_error("hl_median_profile: needs n >= 2");
    }
    std::vector<double> med(x.size() - 1);
    sweep_splits(x.values(), [&](std::size_t k, const DiffMultiset& ms) {
        med[k - 1] = multiset_median(ms);
    });
    return SplitProfile::from_values(std::move(med));
}

std::vector<double> difference_quantile_profile(const TimeSeries& x, double p) {
    if (x.size() < 2) {
        throw std::domain_error("difference_quantile_profile: needs n >= 2");
    }
    static_cast<void>(generalized_inverse_rank(p, 1));  // validates p
    std::vector<double> q(x.size() - 1);
    sweep_splits(x.values(), [&](std::size_t k, const DiffMultiset& ms) {
        q[k - 1] = ms.select(generalized_inverse_rank(p, ms.size()));
    });
    return q;
}

std::vector<double> difference_u_process_profile(const TimeSeries& x, double t) {
    const std::size_t n = x.size();
    if (n < 2) {
        throw std::domain_error("difference_u_process_profile: needs n >= 2");
    }
    std::size_t hits = 0;
    for (std::size_t j = 1; j < n; ++j) {
        hits += (x[j] - x[0] <= t) ? 1 : 0;
    }
    std::vector<double> u(n - 1);
    u[0] = static_cast<double>(hits) / static_cast<double>(n - 1);
    for (std::size_t m = 1; m + 1 < n; ++m) {
        for (std::size_t i = 0; i < m; ++i) {
            hits -= (x[m] - x[i] <= t) ? 1 : 0;
        }
        for (std::size_t j = m + 1; j < n; ++j) {
            hits += (x[j] - x[m] <= t) ? 1 : 0;
        }
        const std::size_t k = m + 1;
        u[m] = static_cast<double>(hits) / static_cast<double>(k * (n - k));
    }
    return u;
}

std::vector<double> empirical_cdf_values(std::span<const double> x) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(x.size());
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto le = std::upper_bound(sorted.begin(), sorted.end(), x[i]) - sorted.begin();
        f[i] = static_cast<double>(le) / n;
    }
    return f;
}

}  // namespace hlcp
