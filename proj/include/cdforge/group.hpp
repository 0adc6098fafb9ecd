#pragma once

// Exact arithmetic over Z_v: blocks, difference lists, subgroups, orbits and
// canonical forms. Residues are always stored as least non-negative
// representatives and blocks are kept sorted.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cdforge/error.hpp"

namespace cdforge {

using Residue = std::int64_t;

/// Least non-negative representative of x modulo v.
[[nodiscard]] constexpr Residue mod(Residue x, Residue v) noexcept {
    Residue r = x % v;
    return r < 0 ? r + v : r;
}

/// A set of residues, stored strictly increasing. Membership in a particular
/// Z_v is checked by the operations that take v.
class Block {
public:
    Block() = default;
    Block(std::initializer_list<Residue> elements) : Block(std::vector<Residue>(elements)) {}

    explicit Block(std::vector<Residue> elements) : elements_(std::move(elements)) {
        std::sort(elements_.begin(), elements_.end());
        if (!elements_.empty() && elements_.front() < 0)
            throw InvalidBlock("block element " + std::to_string(elements_.front()) +
                               " is negative");
        auto dup = std::adjacent_find(elements_.begin(), elements_.end());
        if (dup != elements_.end())
            throw InvalidBlock("block element " + std::to_string(*dup) + " is repeated");
    }

    /// Reduces every element modulo v before building the block.
    static Block reduced(std::span<const Residue> elements, Residue v) {
        std::vector<Residue> out;
        out.reserve(elements.size());
        for (Residue e : elements) out.push_back(mod(e, v));
        return Block(std::move(out));
    }

    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    Residue operator[](std::size_t i) const { return elements_[i]; }
    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }
    const std::vector<Residue>& elements() const noexcept { return elements_; }
    bool contains(Residue r) const {
        return std::binary_search(elements_.begin(), elements_.end(), r);
    }

    /// Throws InvalidBlock unless every element lies in [0, v).
    void check_in(Residue v) const {
        if (!elements_.empty() && elements_.back() >= v)
            throw InvalidBlock("block element " + std::to_string(elements_.back()) +
                               " is not a residue modulo " + std::to_string(v));
    }

    Block translate(Residue t, Residue v) const { return reduced_shift(t, v); }

    auto operator<=>(const Block&) const = default;
    bool operator==(const Block&) const = default;

private:
    Block reduced_shift(Residue t, Residue v) const {
        std::vector<Residue> out;
        out.reserve(elements_.size());
        for (Residue e : elements_) out.push_back(mod(e + t, v));
        std::sort(out.begin(), out.end());
        Block b;
        b.elements_ = std::move(out);
        return b;
    }

    std::vector<Residue> elements_;
};

inline std::string to_string(const Block& b) {
    std::string s = "{";
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(b[i]);
    }
    return s + "}";
}

/// A candidate or verified (v,h,k,1) cyclic relative difference family over
/// Z_v, avoiding the subgroup of order h (generated by g = v/h).
struct Family {
    Residue v = 1;
    Residue h = 1;
    std::size_t k = 4;
    std::vector<Block> blocks;

    Residue g() const { return v / h; }

    bool operator==(const Family&) const = default;
};

/// Throws StructuralError if h does not divide v or a block has the wrong
/// size, and InvalidBlock if an element is out of range.
inline void check_structure(const Family& f) {
    if (f.v < 1) throw StructuralError("group order must be positive");
    if (f.h < 1 || f.v % f.h != 0)
        throw StructuralError("subgroup order " + std::to_string(f.h) +
                              " does not divide " + std::to_string(f.v));
    for (const Block& b : f.blocks) {
        if (b.size() != f.k)
            throw StructuralError("block " + to_string(b) + " has size " +
                                  std::to_string(b.size()) + ", expected " +
                                  std::to_string(f.k));
        b.check_in(f.v);
    }
}

/// Per-residue occurrence counts of a difference list in Z_v.
class DifferenceMultiset {
public:
    explicit DifferenceMultiset(Residue v) : counts_(static_cast<std::size_t>(v), 0) {}

    Residue order() const noexcept { return static_cast<Residue>(counts_.size()); }
    std::uint32_t count(Residue d) const { return counts_[static_cast<std::size_t>(d)]; }
    void add(Residue d, std::uint32_t n = 1) { counts_[static_cast<std::size_t>(d)] += n; }
    std::span<const std::uint32_t> counts() const noexcept { return counts_; }

    std::uint64_t total() const {
        return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
    }

    DifferenceMultiset& operator+=(const DifferenceMultiset& other) {
        if (other.order() != order())
            throw StructuralError("difference multisets over different groups");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
        return *this;
    }

    bool operator==(const DifferenceMultiset&) const = default;

private:
    std::vector<std::uint32_t> counts_;
};

/// The k(k-1) differences f - f' (f != f') of a block, as counts over Z_v.
inline DifferenceMultiset differences(const Block& b, Residue v) {
    b.check_in(v);
    DifferenceMultiset out(v);
    for (Residue x : b)
        for (Residue y : b)
            if (x != y) out.add(mod(x - y, v));
    return out;
}

/// The subgroup of order h in Z_v: {0, v/h, 2v/h, ...}.
inline std::vector<Residue> subgroup(Residue v, Residue h) {
    if (v < 1 || h < 1 || v % h != 0)
        throw StructuralError("subgroup order " + std::to_string(h) + " does not divide " +
                              std::to_string(v));
    std::vector<Residue> out;
    out.reserve(static_cast<std::size_t>(h));
    const Residue step = v / h;
    for (Residue i = 0; i < h; ++i) out.push_back(i * step);
    return out;
}

/// Multiset union of the difference lists of every block of the family.
inline DifferenceMultiset delta_family(const Family& f) {
    DifferenceMultiset out(f.v);
    for (const Block& b : f.blocks) {
        b.check_in(f.v);
        for (Residue x : b)
            for (Residue y : b)
                if (x != y) out.add(mod(x - y, f.v));
    }
    return out;
}

struct Orbit {
    std::vector<Block> translates;  // b + t for t = 0..v-1, in order of t
    std::size_t length = 0;         // number of distinct translates
};

inline Orbit develop_orbit(const Block& b, Residue v) {
    b.check_in(v);
    Orbit o;
    o.translates.reserve(static_cast<std::size_t>(v));
    for (Residue t = 0; t < v; ++t) o.translates.push_back(b.translate(t, v));
    std::vector<Block> distinct = o.translates;
    std::sort(distinct.begin(), distinct.end());
    o.length = static_cast<std::size_t>(
        std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    return o;
}

/// Lexicographically least translate of b that contains 0.
inline Block canonical_form(const Block& b, Residue v) {
    b.check_in(v);
    if (b.empty()) return b;
    Block best = b.translate(v - b[0], v);
    for (std::size_t i = 1; i < b.size(); ++i) {
        Block c = b.translate(v - b[i], v);
        if (c < best) best = std::move(c);
    }
    return best;
}

}  // namespace cdforge
