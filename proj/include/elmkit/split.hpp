#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <random>
#include <vector>

#include "elmkit/errors.hpp"

namespace elmkit {

/// Half-open range of instance positions.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
    bool operator==(const IndexRange&) const = default;
};

/// Train/validation/test ratios plus the seed used when shuffling is
/// requested (splits themselves are contiguous in file order).
struct SplitSpec {
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    std::uint64_t seed = 0;
};

struct SplitRanges {
    IndexRange train, validation, test;
};

inline void validate_ratios(const std::array<double, 3>& r) {
    for (double x : r)
        if (!(x >= 0.0)) throw ConfigError("split ratios must be non-negative");
    const double sum = r[0] + r[1] + r[2];
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
}

/// Contiguous 8/1/1-style split. Validation and test sizes are round(n*r)
/// (half away from zero); training takes the remainder. A validation or
/// test range that rounds to empty while its ratio is positive is an error.
inline SplitRanges split_dataset(std::size_t n, const SplitSpec& spec) {
    if (n < 3) throw ConfigError("need at least 3 instances to split, got " + std::to_string(n));
    validate_ratios(spec.ratios);

    std::size_t n_val = std::size_t(std::llround(double(n) * spec.ratios[1]));
    std::size_t n_test = std::size_t(std::llround(double(n) * spec.ratios[2]));
    if (n_val + n_test > n) n_test = n - n_val;  // rounding overflow at extreme ratios
    const std::size_t n_train = n - n_val - n_test;

    if (spec.ratios[1] > 0.0 && n_val == 0)
        throw ConfigError("validation split is empty for ratio " + std::to_string(spec.ratios[1]));
    if (spec.ratios[2] > 0.0 && n_test == 0)
        throw ConfigError("test split is empty for ratio " + std::to_string(spec.ratios[2]));

    SplitRanges out;
    out.train = {0, n_train};
    out.validation = {n_train, n_train + n_val};
    out.test = {n_train + n_val, n};
    return out;
}

/// Seeded Fisher-Yates permutation of 0..n for the optional shuffled split.
inline std::vector<std::uint32_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    if (n > std::size_t(std::uint32_t(-1))) throw ConfigError("dataset too large to shuffle");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = std::size_t(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

/// Lazily chops an index range into consecutive batches; every batch is
/// full-sized except possibly the last.
class BatchRange {
public:
    BatchRange(IndexRange whole, std::size_t batch_size)
        : whole_(whole), batch_size_(batch_size) {
        if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    }

    class iterator {
    public:
        using value_type = IndexRange;
        using difference_type = std::ptrdiff_t;
        using iterator_category = std::forward_iterator_tag;

        iterator(std::size_t pos, const BatchRange* parent) : pos_(pos), parent_(parent) {}

        IndexRange operator*() const {
            return {pos_, std::min(pos_ + parent_->batch_size_, parent_->whole_.end)};
        }
        iterator& operator++() {
            pos_ = std::min(pos_ + parent_->batch_size_, parent_->whole_.end);
            return *this;
        }
        iterator operator++(int) {
            iterator tmp = *this;
            ++*this;
            return tmp;
        }
        bool operator==(const iterator& o) const { return pos_ == o.pos_; }

    private:
        std::size_t pos_;
        const BatchRange* parent_;
    };

    iterator begin() const { return {whole_.begin, this}; }
    iterator end() const { return {whole_.end, this}; }

    std::size_t count() const {
        return whole_.size() == 0 ? 0 : (whole_.size() + batch_size_ - 1) / batch_size_;
    }

private:
    IndexRange whole_;
    std::size_t batch_size_;
};

}  // namespace elmkit
