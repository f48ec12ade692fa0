#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hlcp {

/// Ordered finite observations, optionally labelled with calendar months (1..12).
///
/// Construction validates the invariants and throws std::invalid_argument on
/// empty input, non-finite values or bad month labels. Instances are immutable.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values,
                        std::optional<std::vector<int>> months = std::nullopt);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] const std::optional<std::vector<int>>& months() const noexcept { return months_; }

    /// Contiguous sub-series [first, first + count), months carried along.
    [[nodiscard]] TimeSeries slice(std::size_t first, std::size_t count) const;
    /// Same observations in reverse time order.
    [[nodiscard]] TimeSeries reversed() const;

private:
    std::vector<double> values_;
    std::optional<std::vector<int>> months_;
};

}  // namespace hlcp
