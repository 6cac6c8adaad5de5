#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treecast {

// Fixed-length bit array, 64 bits per word, bit i in word i/64.
class PackedBits {
public:
    PackedBits() = default;
    explicit PackedBits(std::uint64_t size, bool fill = false);

    std::uint64_t size() const noexcept { return size_; }
    bool get(std::uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::uint64_t i, bool v) noexcept {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) words_[i >> 6] |= m;
        else words_[i >> 6] &= ~m;
    }
    void toggle(std::uint64_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    std::uint64_t popcount() const noexcept;

    std::span<const std::uint64_t> words() const noexcept { return words_; }
    static PackedBits from_words(std::uint64_t size, std::span<const std::uint64_t> words);

    friend bool operator==(const PackedBits&, const PackedBits&) = default;

private:
    std::uint64_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

// +/-1 labels over a contiguous node range [first_node, first_node + size).
// Bit 1 means +1, bit 0 means -1.
class SpinVector {
public:
    SpinVector() = default;
    explicit SpinVector(std::uint64_t size, int fill = -1, std::uint64_t first_node = 0);

    static SpinVector from_string(std::string_view pm, std::uint64_t first_node = 0);
    static SpinVector from_spins(std::span<const int> spins, std::uint64_t first_node = 0);
    static SpinVector from_packed(PackedBits bits, std::uint64_t first_node = 0);

    std::uint64_t size() const noexcept { return bits_.size(); }
    std::uint64_t first_node() const noexcept { return first_; }

    int operator[](std::uint64_t i) const noexcept { return bits_.get(i) ? 1 : -1; }
    int at(std::uint64_t i) const;
    bool is_plus(std::uint64_t i) const noexcept { return bits_.get(i); }
    void set(std::uint64_t i, int spin) noexcept { bits_.set(i, spin > 0); }
    void flip(std::uint64_t i) noexcept { bits_.toggle(i); }

    std::uint64_t count_plus() const noexcept { return bits_.popcount(); }
    SpinVector negated() const;
    SpinVector slice(std::uint64_t begin, std::uint64_t count) const;
    std::vector<std::int8_t> unpack() const;
    std::string to_string() const;

    const PackedBits& packed() const noexcept { return bits_; }

    // Equality compares values only; the span is bookkeeping.
    friend bool operator==(const SpinVector& a, const SpinVector& b) noexcept { return a.bits_ == b.bits_; }

private:
    std::uint64_t first_ = 0;
    PackedBits bits_;
};

// Per-leaf permission bits of the semirandom adversary plus the rho used to
// draw them.
class CorruptionMask {
public:
    CorruptionMask() = default;
    CorruptionMask(PackedBits bits, double density);

    static CorruptionMask none(std::uint64_t size) { return {PackedBits(size, false), 0.0}; }
    static CorruptionMask all(std::uint64_t size, double density = 1.0) {
        return {PackedBits(size, true), density};
    }
    // '1'/'0' characters.
    static CorruptionMask from_string(std::string_view bits, double density);

    std::uint64_t size() const noexcept { return bits_.size(); }
    double density() const noexcept { return density_; }
    bool permitted(std::uint64_t i) const noexcept { return bits_.get(i); }
    std::uint64_t popcount() const noexcept { return bits_.popcount(); }
    std::vector<std::uint64_t> permitted_indices() const;
    std::string to_string() const;
    const PackedBits& packed() const noexcept { return bits_; }

private:
    PackedBits bits_;
    double density_ = 0.0;
};

}  // namespace treecast
