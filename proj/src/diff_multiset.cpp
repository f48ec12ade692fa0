#include "hlcp/diff_multiset.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace hlcp {

DiffMultiset::DiffMultiset(std::vector<double> universe) : keys_(std::move(universe)) {
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
    init_tree();
}

DiffMultiset::DiffMultiset(SortedTag, std::vector<double> keys) : keys_(std::move(keys)) {
    init_tree();
}

DiffMultiset DiffMultiset::from_sorted_keys(std::vector<double> keys) {
    return DiffMultiset(SortedTag{}, std::move(keys));
}

void DiffMultiset::init_tree() {
    tree_.assign(keys_.size() + 1, 0);
    counts_.assign(keys_.size(), 0);
    top_bit_ = keys_.empty() ? 0 : std::bit_floor(keys_.size());
    size_ = 0;
}

std::size_t DiffMultiset::slot_of(double value) const {
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), value);
    if (it == keys_.end() || *it != value) {
        throw std::invalid_argument("DiffMultiset: value is not part of the universe");
    }
    return static_cast<std::size_t>(it - keys_.begin());
}

void DiffMultiset::insert_slot(std::size_t slot) noexcept {
    ++counts_[slot];
    for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) {
        ++tree_[i];
    }
    ++size_;
}

void DiffMultiset::erase_slot(std::size_t slot) {
    if (counts_[slot] == 0) {
        throw std::invalid_argument("DiffMultiset: erase of a value that is not present");
    }
    --counts_[slot];
    for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) {
        --tree_[i];
    }
    --size_;
}

void DiffMultiset::insert(double value) { insert_slot(slot_of(value)); }

void DiffMultiset::erase(double value) { erase_slot(slot_of(value)); }

std::size_t DiffMultiset::select_slot(std::size_t rank) const {
    if (rank == 0 || rank > size_) {
        throw std::out_of_range("DiffMultiset::select: rank out of range");
    }
    std::size_t pos = 0;
    std::size_t remaining = rank;
    for (std::size_t step = top_bit_; step != 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] < remaining) {
            pos = next;
            remaining -= tree_[next];
        }
    }
    return pos;  // Fenwick index pos + 1 maps to slot pos
}

double DiffMultiset::select(std::size_t rank) const { return keys_[select_slot(rank)]; }

}  // namespace hlcp
