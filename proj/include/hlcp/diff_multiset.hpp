#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hlcp {

/// Dynamic multiset of reals drawn from a universe fixed at construction.
///
/// Values are coordinate-compressed onto the sorted distinct universe and the
/// multiplicities live in a Fenwick tree, so insert/erase/select all cost
/// O(log |universe|). select(r) is 1-based and returns exactly the r-th
/// smallest element a sorted copy would hold.
///
/// Inserting a value outside the universe, erasing a value that is not
/// present, or selecting out of range throws std::invalid_argument /
/// std::out_of_range. Not thread-safe; one owner at a time.
class DiffMultiset {
public:
    /// The universe may contain duplicates and be unsorted.
    explicit DiffMultiset(std::vector<double> universe);

    void insert(double value);
    void erase(double value);
    [[nodiscard]] double select(std::size_t rank) const;
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    // Slot-level access for callers that precomputed slot indices.
    [[nodiscard]] std::size_t slot_count() const noexcept { return keys_.size(); }
    [[nodiscard]] std::size_t slot_of(double value) const;
    [[nodiscard]] double key(std::size_t slot) const noexcept { return keys_[slot]; }
    void insert_slot(std::size_t slot) noexcept;
    void erase_slot(std::size_t slot);
    /// Smallest slot whose cumulative count reaches rank (1-based).
    [[nodiscard]] std::size_t select_slot(std::size_t rank) const;

    /// Build from an already sorted, duplicate-free key vector.
    static DiffMultiset from_sorted_keys(std::vector<double> keys);

private:
    struct SortedTag {};
    DiffMultiset(SortedTag, std::vector<double> keys);
    void init_tree();

    std::vector<double> keys_;
    std::vector<std::uint32_t> tree_;    // 1-based Fenwick array
    std::vector<std::uint32_t> counts_;  // per-slot multiplicity
    std::size_t top_bit_ = 0;
    std::size_t size_ = 0;
};

}  // namespace hlcp
