#pragma once

// Brute-force reference checks. These deliberately share no code with the
// library's verifiers: plain vectors, explicit pair loops, explicit 0/1
// sequences.

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "cdforge/cdforge.hpp"

namespace oracle {

using cdforge::Block;
using cdforge::Residue;

inline Residue md(Residue a, Residue v) { return ((a % v) + v) % v; }

inline std::vector<int> difference_counts(const std::vector<Block>& blocks, Residue v) {
    std::vector<int> c(static_cast<std::size_t>(v), 0);
    for (const Block& b : blocks) {
        const auto& e = b.elements();
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = 0; j < e.size(); ++j)
                if (i != j) ++c[static_cast<std::size_t>(md(e[i] - e[j], v))];
    }
    return c;
}

/// Every residue off the order-h subgroup exactly once, the subgroup never.
inline bool is_cdf(Residue v, Residue h, std::size_t k, const std::vector<Block>& blocks) {
    if (v < 1 || h < 1 || v % h != 0) return false;
    for (const Block& b : blocks) {
        if (b.size() != k) return false;
        for (Residue e : b)
            if (e < 0 || e >= v) return false;
    }
    const auto c = difference_counts(blocks, v);
    for (Residue d = 0; d < v; ++d) {
        const bool in_h = d % (v / h) == 0;
        if (c[static_cast<std::size_t>(d)] != (in_h ? 0 : 1)) return false;
    }
    return true;
}

inline bool is_cdf(const cdforge::Family& f) { return is_cdf(f.v, f.h, f.k, f.blocks); }

inline bool is_dm(const cdforge::DiffMatrix& m) {
    for (std::size_t x = 0; x < m.rows.size(); ++x)
        for (std::size_t y = 0; y < m.rows.size(); ++y) {
            if (x == y) continue;
            std::set<Residue> seen;
            for (Residue j = 0; j < m.v; ++j) seen.insert(md(m.rows[x][j] - m.rows[y][j], m.v));
            if (static_cast<Residue>(seen.size()) != m.v) return false;
        }
    return true;
}

/// Counts how often each unordered point pair occurs in a block; points are
/// encoded as residues with infinity as -1.
inline std::map<std::pair<long, long>, int> pair_counts(const cdforge::PointDesign& d) {
    std::map<std::pair<long, long>, int> out;
    for (const auto& blk : d.blocks)
        for (std::size_t i = 0; i < blk.size(); ++i)
            for (std::size_t j = i + 1; j < blk.size(); ++j) {
                long a = blk[i].is_infinity() ? -1 : static_cast<long>(blk[i].residue());
                long b = blk[j].is_infinity() ? -1 : static_cast<long>(blk[j].residue());
                if (a > b) std::swap(a, b);
                ++out[{a, b}];
            }
    return out;
}

/// Every pair of points from different groups in exactly one block, no pair
/// inside a group covered.
inline bool is_gdd(const cdforge::PointDesign& d) {
    std::map<long, std::size_t> group_of;
    for (std::size_t gi = 0; gi < d.groups.size(); ++gi)
        for (const auto& p : d.groups[gi]) group_of[p.is_infinity() ? -1 : static_cast<long>(p.residue())] = gi;
    if (group_of.size() != d.point_count()) return false;
    const auto counts = pair_counts(d);
    std::vector<long> pts;
    for (const auto& [p, g] : group_of) pts.push_back(p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const auto it = counts.find({pts[i], pts[j]});
            const int c = it == counts.end() ? 0 : it->second;
            if (c != (group_of[pts[i]] == group_of[pts[j]] ? 0 : 1)) return false;
        }
    return true;
}

/// Every pair of points in exactly one block.
inline bool is_steiner(const cdforge::PointDesign& d) {
    const auto counts = pair_counts(d);
    std::vector<long> pts;
    for (Residue r = 0; r < d.finite_points; ++r) pts.push_back(static_cast<long>(r));
    if (d.has_infinity) pts.push_back(-1);
    std::size_t pairs = 0;
    for (const auto& [pr, c] : counts) {
        if (c != 1) return false;
        ++pairs;
    }
    return pairs == pts.size() * (pts.size() - 1) / 2;
}

/// Block multiset preserved by i -> i+1 on the finite points, infinity fixed.
inline bool shift_invariant(const cdforge::PointDesign& d) {
    auto key = [](std::vector<long> b) {
        std::sort(b.begin(), b.end());
        return b;
    };
    std::multiset<std::vector<long>> orig, shifted;
    for (const auto& blk : d.blocks) {
        std::vector<long> a, s;
        for (const auto& p : blk) {
            const long x = p.is_infinity() ? -1 : static_cast<long>(p.residue());
            a.push_back(x);
            s.push_back(x < 0 ? -1 : static_cast<long>(md(x + 1, d.finite_points)));
        }
        orig.insert(key(a));
        shifted.insert(key(s));
    }
    return orig == shifted;
}

/// Auto- and cross-correlation of the 0/1 sequences, at most 1 everywhere.
inline bool is_ooc(const std::vector<Block>& words, Residue v) {
    std::vector<std::vector<int>> x(words.size(), std::vector<int>(static_cast<std::size_t>(v), 0));
    for (std::size_t c = 0; c < words.size(); ++c)
        for (Residue e : words[c]) x[c][static_cast<std::size_t>(e)] = 1;
    for (std::size_t a = 0; a < words.size(); ++a)
        for (std::size_t b = 0; b < words.size(); ++b)
            for (Residue s = 0; s < v; ++s) {
                if (a == b && s == 0) continue;
                int sum = 0;
                for (Residue t = 0; t < v; ++t)
                    sum += x[a][static_cast<std::size_t>(t)] * x[b][static_cast<std::size_t>(md(t + s, v))];
                if (sum > 1) return false;
            }
    return true;
}

/// Dense q-ary vector of a set-form codeword.
inline std::vector<int> to_vector(const cdforge::SetCodeword& c, Residue n) {
    std::vector<int> out(static_cast<std::size_t>(n), 0);
    for (const auto& s : c) out[static_cast<std::size_t>(s.position)] = s.symbol;
    return out;
}

inline std::size_t hamming(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

}  // namespace oracle
