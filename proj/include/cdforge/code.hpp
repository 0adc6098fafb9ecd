#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <vector>

#include "cdforge/group.hpp"

namespace cdforge {

/// One non-zero coordinate (i, u_i) of a q-ary codeword, stored in the
/// set-theoretic form: a codeword is a w-subset of Z_n x {1, ..., q-1}.
struct CodeSymbol {
    Residue position = 0;
    int symbol = 1;

    auto operator<=>(const CodeSymbol&) const = default;
    bool operator==(const CodeSymbol&) const = default;
};

using SetCodeword = std::vector<CodeSymbol>;

/// Sorts the symbols; codewords compare equal iff their sets are equal.
inline SetCodeword normalized(SetCodeword c) {
    std::sort(c.begin(), c.end());
    return c;
}

/// Cyclic shift B + s = {(x + s mod n, a)}.
inline SetCodeword shifted(const SetCodeword& c, Residue s, Residue n) {
    SetCodeword out;
    out.reserve(c.size());
    for (const CodeSymbol& cs : c) out.push_back({mod(cs.position + s, n), cs.symbol});
    return normalized(std::move(out));
}

/// A cyclic (n, d, w)_q constant-weight code in set-theoretic form.
struct CwCode {
    Residue n = 1;
    std::size_t d = 6;
    std::size_t w = 4;
    int q = 3;
    std::vector<SetCodeword> codewords;

    bool operator==(const CwCode&) const = default;
};

/// A (v, k, 1) optical orthogonal code, codewords given by their supports.
struct OocCode {
    Residue v = 1;
    std::size_t k = 4;
    std::vector<Block> codewords;

    bool operator==(const OocCode&) const = default;
};

}  // namespace cdforge
