#pragma once

// Recursive constructions: the CDF x CDM product, filling the forbidden
// subgroup with a smaller family, and a planner that routes a target (g, h)
// to a tree of constructions.

#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdforge/construct.hpp"
#include "cdforge/error.hpp"
#include "cdforge/group.hpp"
#include "cdforge/matrix.hpp"
#include "cdforge/number.hpp"
#include "cdforge/search.hpp"
#include "cdforge/verify.hpp"

namespace cdforge {

/// Blocks {b_i + v1 d_ij mod v1 m} for each base block b and column j: a
/// (v1 m, h1 m, k, 1)-CDF from a (v1, h1, k, 1)-CDF and an (m, k, 1)-CDM.
inline Family product(const Family& f, const DiffMatrix& m) {
    if (m.k() != f.k)
        throw InvalidArgument("matrix has " + std::to_string(m.k()) + " rows, family has block size " +
                              std::to_string(f.k));
    if (const Certificate c = verify_cdf(f); !c.valid)
        throw InvalidArgument("product needs a valid family: " + c.witness->condition);
    if (const Certificate c = verify_dm(m); !c.valid)
        throw InvalidArgument("product needs a valid difference matrix: " + c.witness->condition);
    const Residue v = f.v * m.v;
    Family out{v, f.h * m.v, f.k, {}};
    out.blocks.reserve(f.blocks.size() * static_cast<std::size_t>(m.v));
    std::vector<Residue> elems(f.k);
    for (const Block& b : f.blocks)
        for (Residue j = 0; j < m.v; ++j) {
            for (std::size_t i = 0; i < f.k; ++i)
                elems[i] = mod(b[i] + f.v * m.at(i, static_cast<std::size_t>(j)), v);
            out.blocks.emplace_back(elems);
        }
    return out;
}

/// Outer blocks plus the inner family scaled into the outer family's
/// forbidden subgroup.
inline Family fill_subgroup(const Family& outer, const Family& inner) {
    if (outer.h != inner.v)
        throw InvalidArgument("outer subgroup order " + std::to_string(outer.h) +
                              " differs from inner group order " + std::to_string(inner.v));
    if (outer.k != inner.k) throw InvalidArgument("block sizes differ");
    if (const Certificate c = verify_cdf(outer); !c.valid)
        throw InvalidArgument("outer family is invalid: " + c.witness->condition);
    if (const Certificate c = verify_cdf(inner); !c.valid)
        throw InvalidArgument("inner family is invalid: " + c.witness->condition);
    const Residue scale = outer.v / inner.v;
    Family out{outer.v, inner.h, outer.k, outer.blocks};
    for (const Block& b : inner.blocks) {
        std::vector<Residue> e(b.begin(), b.end());
        for (Residue& x : e) x *= scale;
        out.blocks.emplace_back(std::move(e));
    }
    return out;
}

/// Kronecker-style composition: d = a_ij + m_a b_il over Z_{m_a m_b}.
inline DiffMatrix cdm_product(const DiffMatrix& a, const DiffMatrix& b) {
    if (a.k() != b.k()) throw InvalidArgument("difference matrices have different row counts");
    const Residue v = a.v * b.v;
    DiffMatrix out{v, std::vector<std::vector<Residue>>(a.k())};
    for (std::size_t i = 0; i < a.k(); ++i) {
        out.rows[i].reserve(static_cast<std::size_t>(v));
        for (Residue j = 0; j < a.v; ++j)
            for (Residue l = 0; l < b.v; ++l)
                out.rows[i].push_back(mod(a.at(i, static_cast<std::size_t>(j)) +
                                              a.v * b.at(i, static_cast<std::size_t>(l)), v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plans

enum class Rule { catalog, field_2p, field_3p, frame_complete, search, product, fill, nonexistent, unresolved };

inline const char* to_string(Rule r) {
    switch (r) {
        case Rule::catalog: return "catalog";
        case Rule::field_2p: return "field-2p";
        case Rule::field_3p: return "field-3p";
        case Rule::frame_complete: return "frame+complete";
        case Rule::search: return "search";
        case Rule::product: return "product";
        case Rule::fill: return "fill";
        case Rule::nonexistent: return "nonexistent";
        case Rule::unresolved: return "unresolved";
    }
    return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
    for (Rule r : {Rule::catalog, Rule::field_2p, Rule::field_3p, Rule::frame_complete, Rule::search,
                   Rule::product, Rule::fill, Rule::nonexistent, Rule::unresolved})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

enum class CdmSource { none, multiplicative, composite, search };

inline const char* to_string(CdmSource s) {
    switch (s) {
        case CdmSource::none: return "none";
        case CdmSource::multiplicative: return "multiplicative";
        case CdmSource::composite: return "composite";
        case CdmSource::search: return "search";
    }
    return "?";
}

/// A construction recipe for a (gh, h, 4, 1)-CDF.
///
/// product: children[0] is the plan of the smaller family, scaled by a CDM of
/// order cdm_order. fill: children[0] builds the outer family, children[1]
/// the family placed in its forbidden subgroup.
struct PlanNode {
    Residue g = 0;
    Residue h = 0;
    Rule rule = Rule::unresolved;
    std::string reason;
    std::vector<PlanNode> children;
    Residue cdm_order = 0;
    CdmSource cdm_source = CdmSource::none;
    int frame_x = 0;
    Residue frame_t = 0;

    Residue v() const { return g * h; }
    bool constructive() const {
        if (rule == Rule::nonexistent || rule == Rule::unresolved) return false;
        for (const PlanNode& c : children)
            if (!c.constructive()) return false;
        return true;
    }

    bool operator==(const PlanNode&) const = default;
};

/// Smallest group order at which the automatic planner prefers the frame
/// plus completion over a search from scratch.
inline constexpr Residue kFramePlanMinOrder = 302;

/// (m, 4, 1)-CDMs exist exactly for odd m >= 5 other than 9, and trivially for m = 1.
inline bool cdm_exists(Residue m) { return m == 1 || (m % 2 == 1 && m >= 5 && m != 9); }

/// Smallest a >= 5 with m = a b and CDMs of both orders, or 0.
inline Residue cdm_split(Residue m) {
    for (Residue a = 5; a * 5 <= m; a += 2)
        if (m % a == 0 && cdm_exists(a) && cdm_exists(m / a)) return a;
    return 0;
}

inline CdmSource cdm_source_for(Residue m) {
    if (m == 1) return CdmSource::none;
    if (std::gcd(m, Residue{6}) == 1) return CdmSource::multiplicative;
    if (cdm_split(m) != 0) return CdmSource::composite;
    return CdmSource::search;
}

namespace detail {

inline PlanNode leaf(Residue g, Residue h, Rule r, std::string why) {
    PlanNode n;
    n.g = g;
    n.h = h;
    n.rule = r;
    n.reason = std::move(why);
    return n;
}

inline PlanNode product_node(Residue g, Residue h, PlanNode child, Residue m, std::string why) {
    PlanNode n = leaf(g, h, Rule::product, std::move(why));
    n.children.push_back(std::move(child));
    n.cdm_order = m;
    n.cdm_source = cdm_source_for(m);
    return n;
}

inline PlanNode plan_impl(Residue g, Residue h);

/// Base subgroup orders 1, 2, 3, 4, 6.
inline PlanNode plan_base(Residue g, Residue h) {
    if (catalog_lookup(g, h)) return leaf(g, h, Rule::catalog, "listed base blocks");
    if (h == 2 && is_prime(g) && g % 6 == 1) return leaf(g, h, Rule::field_2p, "g prime, g = 1 (mod 6)");
    if (h == 3 && is_prime(g) && g % 4 == 1) return leaf(g, h, Rule::field_3p, "g prime, g = 1 (mod 4)");

    // g = a b: a (ab h, b h) product, with a (bh, h)-CDF in its subgroup.
    for (Residue b = 5; b * 5 <= g; b += 2) {
        if (g % b != 0 || std::gcd(b, Residue{6}) != 1) continue;
        const Residue a = g / b;
        if (admissible(a, h).verdict != Existence::exists || admissible(b, h).verdict != Existence::exists)
            continue;
        PlanNode outer_child = plan_impl(a, h);
        PlanNode inner = plan_impl(b, h);
        if (!outer_child.constructive() || !inner.constructive()) continue;
        PlanNode n = leaf(g, h, Rule::fill, "g = " + std::to_string(a) + " * " + std::to_string(b));
        n.children.push_back(product_node(a, h * b, std::move(outer_child), b,
                                          "scale by a CDM of order " + std::to_string(b)));
        n.children.push_back(std::move(inner));
        return n;
    }

    if (g * h >= kFramePlanMinOrder) {
        if (auto fp = frame_params_for(g * h, static_cast<int>(h))) {
            PlanNode n = leaf(g, h, Rule::frame_complete,
                              "frame with x=" + std::to_string(fp->x) + ", t=" + std::to_string(fp->t) +
                                  ", then search for the remaining blocks");
            n.frame_x = fp->x;
            n.frame_t = fp->t;
            return n;
        }
    }
    return leaf(g, h, Rule::search, "search from scratch");
}

inline PlanNode plan_impl(Residue g, Residue h) {
    const Admissibility adm = admissible(g, h);
    if (adm.verdict == Existence::nonexistent) return leaf(g, h, Rule::nonexistent, adm.reason);
    if (adm.verdict == Existence::unresolved) return leaf(g, h, Rule::unresolved, adm.reason);
    if (h == 1 || h == 2 || h == 3 || h == 4 || h == 6) return plan_base(g, h);

    const Residue h12 = h % 12, h24 = h % 24;
    if (h12 == 1 || h12 == 5 || h12 == 7 || h12 == 11)
        return product_node(g, h, plan_impl(g, 1), h, "h = 1,5,7,11 (mod 12): (g,1)-CDF times a CDM of order h");
    if (h12 == 2 || h12 == 10)
        return product_node(g, h, plan_impl(g, 2), h / 2, "h = 2,10 (mod 12): (2g,2)-CDF times a CDM of order h/2");
    if (h12 == 3 || h12 == 9)
        return product_node(g, h, plan_impl(g, 3), h / 3, "h = 3,9 (mod 12): (3g,3)-CDF times a CDM of order h/3");
    if ((h24 == 4 || h24 == 20) && g >= 10)
        return product_node(g, h, plan_impl(g, 4), h / 4,
                            "h = 4,20 (mod 24), g >= 10: (4g,4)-CDF times a CDM of order h/4");
    if (h12 == 6 && h != 18 && h != 54 && g >= 7)
        return product_node(g, h, plan_impl(g, 6), h / 6, "h = 6 (mod 12): (6g,6)-CDF times a CDM of order h/6");
    if (h == 54 && g % 6 == 1)
        return product_node(g, h, plan_impl(g, 2), 27, "h = 54, g = 1 (mod 6): (2g,2)-CDF times a CDM of order 27");
    if (h24 == 12 && h >= 60 && g >= 10 && g % 3 == 1)
        return product_node(g, h, plan_impl(g, 4), h / 4,
                            "h = 12 (mod 24), h >= 60, g >= 10: (4g,4)-CDF times a CDM of order h/4");
    if (g == 7 && h == 12) return leaf(g, h, Rule::catalog, "listed base blocks");
    if (g == 7 && h24 == 12 && h >= 60 && h != 108)
        return product_node(g, h, plan_impl(7, 12), h / 12,
                            "h = 12 (mod 24), g = 7: (84,12)-CDF times a CDM of order h/12");
    return leaf(g, h, Rule::unresolved,
                "exists by a construction whose base blocks are not available to this library");
}

}  // namespace detail

/// Construction recipe for a (gh, h, 4, 1)-CDF, or a nonexistent/unresolved
/// leaf consistent with admissible(g, h).
inline PlanNode plan(Residue g, Residue h) {
    if (g < 1 || h < 1) throw InvalidArgument("g and h must be positive");
    return detail::plan_impl(g, h);
}

/// Indented tree, one node per line: "rule (g,h): reason".
inline std::string plan_text(const PlanNode& p, int depth = 0) {
    std::string s(static_cast<std::size_t>(2 * depth), ' ');
    s += std::string(to_string(p.rule)) + " (" + std::to_string(p.g) + "," + std::to_string(p.h) + "): " + p.reason;
    if (p.rule == Rule::product)
        s += " [CDM " + std::to_string(p.cdm_order) + ", " + to_string(p.cdm_source) + "]";
    s += '\n';
    for (const PlanNode& c : p.children) s += plan_text(c, depth + 1);
    return s;
}

// ---------------------------------------------------------------------------
// Execution

/// Hybrid branching with randomized restarts: the default for search leaves.
inline SearchStrategy recommended_strategy(std::uint64_t seed = 0) {
    SearchStrategy s;
    s.branching = Branching::hybrid;
    s.restarts = true;
    s.seed = seed;
    return s;
}

struct ExecuteOptions {
    SearchBudget budget;  // applies to each search leaf separately
    SearchStrategy strategy = recommended_strategy();
    ProgressFn progress;
};

namespace detail {

class Executor {
public:
    explicit Executor(const ExecuteOptions& options) : options_(options) {}

    Family run(const PlanNode& node, const std::string& path) {
        const std::string here = (path.empty() ? "" : path + " > ") + to_string(node.rule) + "(" +
                                 std::to_string(node.g) + "," + std::to_string(node.h) + ")";
        const auto key = std::pair{node.g, node.h};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Family f = build(node, here);
        const Certificate cert = verify_cdf(f);
        if (!cert.valid || f.v != node.v() || f.h != node.h)
            throw std::logic_error("plan step " + here + " produced an invalid family");
        memo_.emplace(key, f);
        return f;
    }

    DiffMatrix cdm(Residue m, const std::string& path) {
        if (auto it = cdms_.find(m); it != cdms_.end()) return it->second;
        DiffMatrix d;
        switch (cdm_source_for(m)) {
            case CdmSource::none:
                d = DiffMatrix{1, std::vector<std::vector<Residue>>(4, std::vector<Residue>{0})};
                break;
            case CdmSource::multiplicative: d = multiplicative_cdm(m, 4); break;
            case CdmSource::composite: {
                const Residue a = cdm_split(m);
                d = cdm_product(cdm(a, path), cdm(m / a, path));
                break;
            }
            case CdmSource::search: {
                SearchOptions opt{options_.budget, options_.strategy, options_.progress};
                SearchOutcome out = find_cdm(m, 4, opt);
                if (out.status == SearchStatus::budget_exceeded)
                    throw BudgetExceeded("budget exceeded searching for a CDM of order " + std::to_string(m), path);
                if (out.status == SearchStatus::exhausted_unsat)
                    throw NotConstructible("no CDM of order " + std::to_string(m) + " exists");
                d = std::move(*out.matrix);
                break;
            }
        }
        if (!verify_dm(d).valid) throw std::logic_error("invalid CDM of order " + std::to_string(m));
        cdms_.emplace(m, d);
        return d;
    }

private:
    Family searched(const PlanNode& node, std::vector<Block> frame, const std::string& path) {
        SearchOptions opt{options_.budget, options_.strategy, options_.progress};
        SearchOutcome out = complete_family(node.v(), node.h, 4, std::move(frame), opt);
        if (out.status == SearchStatus::found) return std::move(*out.family);
        if (out.status == SearchStatus::budget_exceeded)
            throw BudgetExceeded("search budget exceeded after " + std::to_string(out.nodes) + " nodes", path);
        throw NotConstructible("search space exhausted without a solution at " + path);
    }

    Family build(const PlanNode& node, const std::string& path) {
        switch (node.rule) {
            case Rule::nonexistent:
                throw NotConstructible("(" + std::to_string(node.g) + "," + std::to_string(node.h) +
                                       ") is nonexistent: " + node.reason);
            case Rule::unresolved:
                throw NotConstructible("(" + std::to_string(node.g) + "," + std::to_string(node.h) +
                                       ") is unresolved: " + node.reason);
            case Rule::catalog: {
                auto f = catalog_lookup(node.g, node.h);
                if (!f) throw NotConstructible("no catalog entry at " + path);
                return *f;
            }
            case Rule::field_2p: return field_cdf_2p(node.g);
            case Rule::field_3p: return field_cdf_3p(node.g);
            case Rule::search: return searched(node, {}, path);
            case Rule::frame_complete: {
                FrameResult fr = frame_blocks(static_cast<int>(node.h), node.frame_x, node.frame_t);
                return searched(node, std::move(fr.blocks), path);
            }
            case Rule::product: {
                if (node.children.size() != 1) throw StructuralError("product node needs one child at " + path);
                const Family base = run(node.children[0], path);
                return product(base, cdm(node.cdm_order, path));
            }
            case Rule::fill: {
                if (node.children.size() != 2) throw StructuralError("fill node needs two children at " + path);
                const Family outer = run(node.children[0], path);
                const Family inner = run(node.children[1], path);
                return fill_subgroup(outer, inner);
            }
        }
        throw StructuralError("unknown rule at " + path);
    }

    ExecuteOptions options_;
    std::map<std::pair<Residue, Residue>, Family> memo_;
    std::map<Residue, DiffMatrix> cdms_;
};

}  // namespace detail

/// Materializes a plan. Every intermediate family is verified. Throws
/// NotConstructible on nonexistent/unresolved nodes and BudgetExceeded, with
/// the plan path as context, when a search leaf runs out of budget.
inline Family execute(const PlanNode& p, const ExecuteOptions& options = {}) {
    detail::Executor ex(options);
    return ex.run(p, "");
}

/// Every (m, 4, 1)-CDM via the same sourcing rule as execute.
inline DiffMatrix cdm_of_order(Residue m, const ExecuteOptions& options = {}) {
    if (!cdm_exists(m)) throw NotConstructible("no CDM of order " + std::to_string(m) + " exists");
    detail::Executor ex(options);
    return ex.cdm(m, "cdm(" + std::to_string(m) + ")");
}

}  // namespace cdforge
