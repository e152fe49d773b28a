#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <span>
#include <vector>

namespace epsstream {

/// Deduplicated collection of subsets of {0, ..., universe-1}, stored as
/// fixed-width bitset rows.
class SubsetTable {
public:
    explicit SubsetTable(std::size_t universe = 0)
        : universe_(universe), words_(std::max<std::size_t>(1, (universe + 63) / 64)) {
        slots_.assign(1024, kEmpty);
    }

    std::size_t universe() const { return universe_; }
    std::size_t words() const { return words_; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    std::span<const std::uint64_t> row(std::size_t i) const { return {bits_.data() + i * words_, words_}; }

    bool test(std::size_t r, std::size_t element) const {
        return (bits_[r * words_ + element / 64] >> (element % 64)) & 1U;
    }

    std::size_t cardinality(std::size_t r) const {
        std::size_t c = 0;
        for (std::uint64_t w : row(r)) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::vector<std::size_t> members(std::size_t r) const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t word = bits_[r * words_ + w];
            while (word != 0) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
        return out;
    }

    /// Adds a row unless an equal row is already present. Returns true if added.
    bool insert(std::span<const std::uint64_t> row_bits) {
        const std::uint64_t h = hash(row_bits);
        std::size_t mask = slots_.size() - 1;
        std::size_t pos = static_cast<std::size_t>(h) & mask;
        while (slots_[pos] != kEmpty) {
            if (std::memcmp(bits_.data() + static_cast<std::size_t>(slots_[pos]) * words_, row_bits.data(),
                            words_ * sizeof(std::uint64_t)) == 0)
                return false;
            pos = (pos + 1) & mask;
        }
        slots_[pos] = static_cast<std::uint32_t>(count_);
        bits_.insert(bits_.end(), row_bits.begin(), row_bits.end());
        ++count_;
        if (count_ * 2 > slots_.size()) rehash(slots_.size() * 2);
        return true;
    }

    bool insert_members(std::span<const std::size_t> elements) {
        std::vector<std::uint64_t> b(words_, 0);
        for (std::size_t e : elements) b[e / 64] |= std::uint64_t{1} << (e % 64);
        return insert(b);
    }

    /// Sorts rows lexicographically (by word, low word first) for a
    /// deterministic enumeration order.
    void canonicalize() {
        std::vector<std::size_t> order(count_);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(bits_.begin() + a * words_, bits_.begin() + (a + 1) * words_,
                                                bits_.begin() + b * words_, bits_.begin() + (b + 1) * words_);
        });
        std::vector<std::uint64_t> sorted;
        sorted.reserve(bits_.size());
        for (std::size_t i : order) sorted.insert(sorted.end(), bits_.begin() + i * words_, bits_.begin() + (i + 1) * words_);
        bits_ = std::move(sorted);
        rehash(slots_.size());
    }

    std::vector<std::vector<std::size_t>> to_index_sets() const {
        std::vector<std::vector<std::size_t>> out;
        out.reserve(count_);
        for (std::size_t r = 0; r < count_; ++r) out.push_back(members(r));
        return out;
    }

private:
    static constexpr std::uint32_t kEmpty = 0xffffffffU;

    static std::uint64_t hash(std::span<const std::uint64_t> row_bits) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::uint64_t w : row_bits) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
        }
        return h;
    }

    void rehash(std::size_t capacity) {
        slots_.assign(capacity, kEmpty);
        const std::size_t mask = capacity - 1;
        for (std::size_t i = 0; i < count_; ++i) {
            std::size_t pos = static_cast<std::size_t>(hash(row(i))) & mask;
            while (slots_[pos] != kEmpty) pos = (pos + 1) & mask;
            slots_[pos] = static_cast<std::uint32_t>(i);
        }
    }

    std::size_t universe_;
    std::size_t words_;
    std::size_t count_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> slots_;
};

/// Scratch bitset with the same width as a SubsetTable row.
class RowBits {
public:
    explicit RowBits(std::size_t words) : w_(words, 0) {}

    void set(std::size_t e) { w_[e / 64] |= std::uint64_t{1} << (e % 64); }
    void clear() { std::fill(w_.begin(), w_.end(), 0); }
    RowBits& operator|=(const RowBits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    std::span<const std::uint64_t> span() const { return w_; }
    std::vector<std::uint64_t>& words() { return w_; }

private:
    std::vector<std::uint64_t> w_;
};

}  // namespace epsstream
