#include "hlcp/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hlcp {

TimeSeries::TimeSeries(std::vector<double> values, std::optional<std::vector<int>> months)
    : values_(std::move(values)), months_(std::move(months)) {
    if (values_.empty()) {
        throw std::invalid_argument("TimeSeries: at least one observation is required");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("TimeSeries: non-finite value at position " +
                                        std::to_string(i));
        }
    }
    if (months_) {
        if (months_->size() != values_.size()) {
            throw std::invalid_argument("TimeSeries: month labels and values differ in length");
        }
        for (std::size_t i = 0; i < months_->size(); ++i) {
            const int m = (*months_)[i];
            if (m < 1 || m > 12) {
                throw std::invalid_argument("TimeSeries: month label out of range at position " +
                                            std::to_string(i));
            }
        }
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first > values_.size() || count > values_.size() - first) {
        throw std::out_of_range("TimeSeries::slice: range exceeds series length");
    }
    const auto b = values_.begin() + static_cast<std::ptrdiff_t>(first);
    std::vector<double> v(b, b + static_cast<std::ptrdiff_t>(count));
    std::optional<std::vector<int>> m;
    if (months_) {
        const auto mb = months_->begin() + static_cast<std::ptrdiff_t>(first);
        m.emplace(mb, mb + static_cast<std::ptrdiff_t>(count));
    }
    return TimeSeries(std::move(v), std::move(m));
}

TimeSeries TimeSeries::reversed() const {
    std::vector<double> v(values_.rbegin(), values_.rend());
    std::optional<std::vector<int>> m;
    if (months_) {
        m.emplace(months_->rbegin(), months_->rend());
    }
    return TimeSeries(std::move(v), std::move(m));
}

}  // namespace hlcp
