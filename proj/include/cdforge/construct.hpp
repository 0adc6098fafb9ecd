#pragma once

// Direct constructions: the parametrized frame, the two finite-field
// families over Z_2p and Z_3p, and lookups into the shipped catalog.

#include <cstddef>
#include <optional>
#include <string>

#include "cdforge/data.hpp"
#include "cdforge/error.hpp"
#include "cdforge/frame.hpp"
#include "cdforge/group.hpp"
#include "cdforge/number.hpp"

namespace cdforge {

/// Frame parameters for (h, x, t) with coefficients from the shipped table.
inline FrameParams frame_params(int h, int x, Residue t) {
    const auto& table = frame_table();
    const auto it = table.find({h, x});
    if (it == table.end())
        throw InvalidArgument("no frame coefficients for h=" + std::to_string(h) +
                              ", x=" + std::to_string(x));
    if (t < 3) throw InvalidArgument("frame needs t >= 3, got " + std::to_string(t));
    return FrameParams{h, x, t, it->second};
}

/// Splits v = 72t + 12x + h with t >= 3 and 0 <= x <= 5, if possible.
inline std::optional<FrameParams> frame_params_for(Residue v, int h) {
    if (h != 2 && h != 3 && h != 6) return std::nullopt;
    const Residue rest = v - h;
    if (rest < 216 || rest % 12 != 0) return std::nullopt;
    return frame_params(h, static_cast<int>((rest % 72) / 12), rest / 72);
}

inline FrameResult frame_blocks(const FrameParams& params) { return evaluate_frame(params); }

inline FrameResult frame_blocks(int h, int x, Residue t) {
    return evaluate_frame(frame_params(h, x, t));
}

/// (2p, 2, 4, 1)-CDF from a prime p = 1 (mod 6): blocks
/// {(0,0), (1,w^i), (1,e^2 w^i), (1,e^4 w^i)} for 0 <= i < (p-1)/6, with
/// e = w^((p-1)/6), mapped into Z_2p by the CRT.
inline Family field_cdf_2p(Residue p) {
    if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
    if (p % 6 != 1) throw InvalidArgument(std::to_string(p) + " is not 1 (mod 6)");
    const Residue w = primitive_root(p);
    const Residue e = pow_mod(w, (p - 1) / 6, p);
    const Residue e2 = mul_mod(e, e, p), e4 = mul_mod(e2, e2, p);
    Family f{2 * p, 2, 4, {}};
    Residue wi = 1;
    for (Residue i = 0; i < (p - 1) / 6; ++i) {
        f.blocks.push_back(Block{crt(0, 2, 0, p), crt(1, 2, wi, p), crt(1, 2, mul_mod(e2, wi, p), p),
                                 crt(1, 2, mul_mod(e4, wi, p), p)});
        wi = mul_mod(wi, w, p);
    }
    return f;
}

/// (3p, 3, 4, 1)-CDF from a prime p = 1 (mod 4): blocks
/// {(0,w^i), (0,e^2 w^i), (1,e w^i), (1,e^3 w^i)} for 0 <= i < (p-1)/4, with
/// e = w^((p-1)/4), mapped into Z_3p by the CRT.
inline Family field_cdf_3p(Residue p) {
    if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
    if (p % 4 != 1) throw InvalidArgument(std::to_string(p) + " is not 1 (mod 4)");
    const Residue w = primitive_root(p);
    const Residue e = pow_mod(w, (p - 1) / 4, p);
    const Residue e2 = mul_mod(e, e, p), e3 = mul_mod(e2, e, p);
    Family f{3 * p, 3, 4, {}};
    Residue wi = 1;
    for (Residue i = 0; i < (p - 1) / 4; ++i) {
        f.blocks.push_back(Block{crt(0, 3, wi, p), crt(0, 3, mul_mod(e2, wi, p), p),
                                 crt(1, 3, mul_mod(e, wi, p), p), crt(1, 3, mul_mod(e3, wi, p), p)});
        wi = mul_mod(wi, w, p);
    }
    return f;
}

inline std::optional<Family> catalog_lookup(Residue g, Residue h) {
    const auto& c = catalog();
    const auto it = c.find({g, h});
    if (it == c.end()) return std::nullopt;
    return it->second.family;
}

}  // namespace cdforge
