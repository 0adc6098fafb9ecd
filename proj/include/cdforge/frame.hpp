#pragma once

// The parametrized frame: 6t - 18 base blocks of a (72t+12x+h, h, 4, 1)-CDF,
// h in {2,3,6}, x in [0,5], t >= 3. The remaining 18 + x blocks are left to
// search::complete_family.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cdforge/error.hpp"
#include "cdforge/group.hpp"

namespace cdforge {

struct FrameParams {
    int h = 2;
    int x = 0;
    Residue t = 3;
    // a1 a2 a3 b1 b2 b3 c1 c2 c3 d1 d2 d3 e1 e2 e3 f1 f2 f3
    std::array<Residue, 18> coefficients{};

    Residue v() const { return 72 * t + 12 * x + h; }
    std::size_t frame_block_count() const { return static_cast<std::size_t>(6 * t - 18); }
    std::size_t completion_block_count() const { return static_cast<std::size_t>(18 + x); }
};

struct FrameResult {
    std::vector<Block> blocks;
    DifferenceMultiset residual;  // each residue still to be covered, once
};

namespace detail {

// Multipliers of t in the second, third and fourth element of F_{r,i}.
inline constexpr std::array<std::array<Residue, 3>, 6> kFrameSlopes{{
    {43, 31, 8}, {23, 5, 8}, {41, 25, 8}, {35, 5, 0}, {47, 19, 0}, {21, 13, 0}}};

}  // namespace detail

/// Evaluates F_{r,i} = {0, s1 t + c1 + i, s2 t + c2 + 2i, s3 t + c3 + 3i} for
/// r = 1..6 and i in [1, t-2] without floor(t/2), and checks that their
/// differences are pairwise distinct and avoid the subgroup of order h.
inline FrameResult evaluate_frame(const FrameParams& p) {
    if (p.h != 2 && p.h != 3 && p.h != 6)
        throw InvalidArgument("frame needs h in {2,3,6}, got " + std::to_string(p.h));
    if (p.x < 0 || p.x > 5) throw InvalidArgument("frame needs x in [0,5]");
    if (p.t < 3) throw InvalidArgument("frame needs t >= 3, got " + std::to_string(p.t));
    for (Residue c : p.coefficients)
        if (c < 0) throw InvalidArgument("frame coefficients must be non-negative");

    const Residue v = p.v();
    const Residue g = v / p.h;
    FrameResult out{{}, DifferenceMultiset(v)};
    out.blocks.reserve(p.frame_block_count());
    DifferenceMultiset seen(v);
    for (Residue i = 1; i <= p.t - 2; ++i) {
        if (i == p.t / 2) continue;
        for (std::size_t r = 0; r < 6; ++r) {
            const auto& s = detail::kFrameSlopes[r];
            const Residue* c = &p.coefficients[3 * r];
            const Residue elems[4] = {0, s[0] * p.t + c[0] + i, s[1] * p.t + c[1] + 2 * i,
                                      s[2] * p.t + c[2] + 3 * i};
            Block b = Block::reduced(elems, v);
            for (Residue a : b)
                for (Residue e : b) {
                    if (a == e) continue;
                    const Residue d = mod(a - e, v);
                    if (d % g == 0 || seen.count(d) != 0)
                        throw StructuralError("frame row (h=" + std::to_string(p.h) +
                                              ", x=" + std::to_string(p.x) + ", t=" +
                                              std::to_string(p.t) + ") repeats difference " +
                                              std::to_string(d) + " in block " + to_string(b));
                    seen.add(d);
                }
            out.blocks.push_back(std::move(b));
        }
    }
    for (Residue d = 0; d < v; ++d)
        if (d % g != 0 && seen.count(d) == 0) out.residual.add(d);
    return out;
}

}  // namespace cdforge
