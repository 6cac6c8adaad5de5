#include "treecast/spin_vector.hpp"

#include <bit>
#include <string>

#include "treecast/errors.hpp"

namespace treecast {

PackedBits::PackedBits(std::uint64_t size, bool fill)
    : size_(size), words_((size + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
    if (fill && (size & 63)) words_.back() &= (std::uint64_t{1} << (size & 63)) - 1;
}

std::uint64_t PackedBits::popcount() const noexcept {
    std::uint64_t n = 0;
    for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

PackedBits PackedBits::from_words(std::uint64_t size, std::span<const std::uint64_t> words) {
    if (words.size() != (size + 63) / 64) throw ParameterError("packed word count does not match size");
    PackedBits b;
    b.size_ = size;
    b.words_.assign(words.begin(), words.end());
    if (size & 63) {
        const std::uint64_t tail = ~((std::uint64_t{1} << (size & 63)) - 1);
        if (b.words_.back() & tail) throw ParameterError("packed words carry bits beyond size");
    }
    return b;
}

SpinVector::SpinVector(std::uint64_t size, int fill, std::uint64_t first_node)
    : first_(first_node), bits_(size, fill > 0) {}

SpinVector SpinVector::from_string(std::string_view pm, std::uint64_t first_node) {
    SpinVector v(pm.size(), -1, first_node);
    for (std::uint64_t i = 0; i < pm.size(); ++i) {
        if (pm[i] == '+') v.set(i, 1);
        else if (pm[i] != '-')
            throw ParameterError("spin literal must use '+'/'-', got '" + std::string(1, pm[i]) + "'");
    }
    return v;
}

SpinVector SpinVector::from_spins(std::span<const int> spins, std::uint64_t first_node) {
    SpinVector v(spins.size(), -1, first_node);
    for (std::uint64_t i = 0; i < spins.size(); ++i) {
        if (spins[i] != 1 && spins[i] != -1) throw ParameterError("spins must be +1 or -1");
        v.set(i, spins[i]);
    }
    return v;
}

SpinVector SpinVector::from_packed(PackedBits bits, std::uint64_t first_node) {
    SpinVector v;
    v.first_ = first_node;
    v.bits_ = std::move(bits);
    return v;
}

int SpinVector::at(std::uint64_t i) const {
    if (i >= size()) throw RangeError("spin index " + std::to_string(i) + " out of range");
    return (*this)[i];
}

SpinVector SpinVector::negated() const {
    SpinVector v = *this;
    for (std::uint64_t i = 0; i < size(); ++i) v.flip(i);
    return v;
}

SpinVector SpinVector::slice(std::uint64_t begin, std::uint64_t count) const {
    if (begin + count > size()) throw RangeError("slice out of range");
    SpinVector v(count, -1, first_ + begin);
    for (std::uint64_t i = 0; i < count; ++i) v.set(i, (*this)[begin + i]);
    return v;
}

std::vector<std::int8_t> SpinVector::unpack() const {
    std::vector<std::int8_t> out(size());
    for (std::uint64_t i = 0; i < size(); ++i) out[i] = static_cast<std::int8_t>((*this)[i]);
    return out;
}

std::string SpinVector::to_string() const {
    std::string s(size(), '-');
    for (std::uint64_t i = 0; i < size(); ++i)
        if (is_plus(i)) s[i] = '+';
    return s;
}

CorruptionMask::CorruptionMask(PackedBits bits, double density)
    : bits_(std::move(bits)), density_(density) {
    if (!(density >= 0.0 && density <= 1.0)) throw ParameterError("mask density must lie in [0,1]");
}

CorruptionMask CorruptionMask::from_string(std::string_view s, double density) {
    PackedBits b(s.size());
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') b.set(i, true);
        else if (s[i] != '0') throw ParameterError("mask literal must use '1'/'0'");
    }
    return {std::move(b), density};
}

std::vector<std::uint64_t> CorruptionMask::permitted_indices() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < size(); ++i)
        if (permitted(i)) out.push_back(i);
    return out;
}

std::string CorruptionMask::to_string() const {
    std::string s(size(), '0');
    for (std::uint64_t i = 0; i < size(); ++i)
        if (permitted(i)) s[i] = '1';
    return s;
}

}  // namespace treecast
