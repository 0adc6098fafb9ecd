#pragma once

// Designs and codes developed from verified difference families: strictly
// cyclic GDDs, 1-rotational Steiner systems S(2,4,v), optical orthogonal
// codes, and optimality reports for cyclic ternary constant-weight codes.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdforge/code.hpp"
#include "cdforge/compose.hpp"
#include "cdforge/design.hpp"
#include "cdforge/error.hpp"
#include "cdforge/group.hpp"
#include "cdforge/search.hpp"
#include "cdforge/verify.hpp"

namespace cdforge {

namespace detail {

inline void require_valid(const Family& f) {
    if (const Certificate c = verify_cdf(f); !c.valid)
        throw InvalidArgument("family is not a valid CDF: " + c.witness->condition);
}

inline std::vector<Point> to_points(const Block& b) {
    std::vector<Point> out;
    out.reserve(b.size());
    for (Residue e : b) out.emplace_back(e);
    return out;
}

}  // namespace detail

/// All v translates of every base block, with the cosets of the order-h
/// subgroup as groups: a strictly cyclic k-GDD of type h^g.
inline PointDesign gdd_from_cdf(const Family& f) {
    detail::require_valid(f);
    PointDesign d;
    d.finite_points = f.v;
    const Residue g = f.g();
    for (Residue c = 0; c < g; ++c) {
        std::vector<Point> group;
        for (Residue m = c; m < f.v; m += g) group.emplace_back(m);
        d.groups.push_back(std::move(group));
    }
    for (const Block& b : f.blocks) {
        const Orbit orbit = develop_orbit(b, f.v);
        if (static_cast<Residue>(orbit.length) != f.v) throw std::logic_error("valid family has a short orbit");
        for (const Block& t : orbit.translates) d.blocks.push_back(detail::to_points(t));
    }
    d.notes.push_back("strictly cyclic " + std::to_string(f.k) + "-GDD of type " + std::to_string(f.h) + "^" +
                      std::to_string(g));
    return d;
}

/// 1-rotational S(2,4,v) for v = 4 (mod 12), v != 28: the translates of a
/// (v-1, 3, 4, 1)-CDF over Z_{v-1} together with the blocks
/// {t, n/3 + t, 2n/3 + t, inf}, 0 <= t < n/3, n = v - 1.
inline PointDesign steiner_1rotational(Residue v, const ExecuteOptions& options = {}) {
    if (v % 12 != 4 || v == 28)
        throw InvalidArgument("a 1-rotational S(2,4,v) exists exactly for v = 4 (mod 12) and v != 28; got v=" +
                              std::to_string(v));
    const Residue n = v - 1;
    Family cdf{n, 3, 4, {}};
    std::vector<std::string> notes;
    if (v == 4) {
        notes.push_back("degenerate case v=4: empty difference family, G = H = Z_3");
    } else {
        const PlanNode p = plan(n / 3, 3);
        if (p.constructive()) {
            cdf = execute(p, options);
            notes.push_back(std::string("difference family from plan rule ") + to_string(p.rule));
        } else {
            SearchOptions opt{options.budget, options.strategy, options.progress};
            SearchOutcome out = find_cdf(n, 3, 4, opt);
            if (out.status == SearchStatus::budget_exceeded)
                throw BudgetExceeded("no (" + std::to_string(n) + ",3,4,1)-CDF within budget",
                                     "steiner(" + std::to_string(v) + ")");
            if (out.status == SearchStatus::exhausted_unsat)
                throw NotConstructible("no (" + std::to_string(n) + ",3,4,1)-CDF exists");
            cdf = std::move(*out.family);
            notes.push_back("difference family from search");
        }
    }
    detail::require_valid(cdf);

    PointDesign d;
    d.finite_points = n;
    d.has_infinity = true;
    for (Residue x = 0; x < n; ++x) d.groups.push_back({Point(x)});
    d.groups.push_back({Point::infinity()});
    for (const Block& b : cdf.blocks)
        for (const Block& t : develop_orbit(b, n).translates) d.blocks.push_back(detail::to_points(t));
    for (Residue t = 0; t < n / 3; ++t)
        d.blocks.push_back({Point(t), Point(n / 3 + t), Point(2 * n / 3 + t), Point::infinity()});
    d.notes = std::move(notes);
    return d;
}

/// One block per line, points separated by spaces, the fixed point as "inf".
inline std::string blocks_text(const PointDesign& d) {
    std::ostringstream out;
    for (const auto& blk : d.blocks) {
        for (std::size_t i = 0; i < blk.size(); ++i) out << (i ? " " : "") << to_string(blk[i]);
        out << '\n';
    }
    return out.str();
}

struct OocReport {
    OocCode code;
    Certificate certificate;
    bool j_optimal = false;  // size meets the Johnson bound
};

/// Base blocks of a valid CDF as the supports of a (v, k, 1)-OOC.
inline OocReport ooc_from_cdf(const Family& f) {
    detail::require_valid(f);
    OocReport r{OocCode{f.v, f.k, f.blocks}, verify_ooc(f.blocks, f.v, f.k), false};
    r.j_optimal = r.certificate.valid && r.certificate.optimal.value_or(false);
    return r;
}

enum class CodeVerdict { optimal, suboptimal, invalid };

inline const char* to_string(CodeVerdict v) {
    switch (v) {
        case CodeVerdict::optimal: return "optimal";
        case CodeVerdict::suboptimal: return "suboptimal";
        case CodeVerdict::invalid: return "invalid";
    }
    return "?";
}

struct CodeReport {
    Certificate certificate;
    std::uint64_t size = 0;
    std::uint64_t bound = 0;  // C(n)
    CodeVerdict verdict = CodeVerdict::invalid;
};

/// Audits a cyclic (n, 6, 4)_3 code against the bound C(n).
inline CodeReport ternary_code_check(const CwCode& code) {
    if (code.d != 6 || code.w != 4 || code.q != 3)
        throw InvalidArgument("ternary code check needs (d, w, q) = (6, 4, 3)");
    CodeReport r;
    r.certificate = verify_cw_code(code.codewords, code.n, code.d, code.w, code.q);
    r.size = r.certificate.size.value_or(0);
    r.bound = cn_bound(static_cast<std::uint64_t>(code.n));
    r.verdict = !r.certificate.valid ? CodeVerdict::invalid
                : r.size == r.bound  ? CodeVerdict::optimal
                                     : CodeVerdict::suboptimal;
    return r;
}

}  // namespace cdforge
