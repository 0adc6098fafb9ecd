#pragma once

// Validity checks for every object class, plus the counting bounds.
// Verifiers never trust their producers: each one recomputes from scratch and
// reports the first violation found in a fixed scan order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdforge/code.hpp"
#include "cdforge/design.hpp"
#include "cdforge/error.hpp"
#include "cdforge/group.hpp"
#include "cdforge/matrix.hpp"

namespace cdforge {

enum class ObjectKind { cdf, cdm, gdd, steiner, ooc, cwcode };

inline const char* to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::cdf: return "cdf";
        case ObjectKind::cdm: return "cdm";
        case ObjectKind::gdd: return "gdd";
        case ObjectKind::steiner: return "steiner";
        case ObjectKind::ooc: return "ooc";
        case ObjectKind::cwcode: return "cwcode";
    }
    return "?";
}

struct Witness {
    std::string condition;
    std::vector<std::int64_t> values;

    bool operator==(const Witness&) const = default;
};

struct Certificate {
    ObjectKind kind = ObjectKind::cdf;
    bool valid = false;
    std::optional<Witness> witness;  // present iff !valid

    // Kind-specific facts.
    std::optional<bool> one_rotational;     // steiner
    std::optional<std::uint64_t> size;      // ooc, cwcode
    std::optional<std::uint64_t> bound;     // ooc (Johnson), cwcode (C(n))
    std::optional<bool> optimal;            // ooc, cwcode

    static Certificate pass(ObjectKind k) { return Certificate{k, true, std::nullopt, {}, {}, {}, {}}; }
    static Certificate fail(ObjectKind k, std::string condition, std::vector<std::int64_t> values) {
        return Certificate{k, false, Witness{std::move(condition), std::move(values)}, {}, {}, {}, {}};
    }

    explicit operator bool() const noexcept { return valid; }
};

// ---------------------------------------------------------------------------
// Difference families and matrices

inline Certificate verify_cdf(const Family& f) {
    check_structure(f);
    const DifferenceMultiset delta = delta_family(f);
    const Residue g = f.v / f.h;
    for (Residue d = 0; d < f.v; ++d) {
        const std::uint32_t expected = (d % g == 0) ? 0 : 1;
        const std::uint32_t got = delta.count(d);
        if (got != expected)
            return Certificate::fail(ObjectKind::cdf,
                                     "difference " + std::to_string(d) + " occurs " +
                                         std::to_string(got) + " times, expected " +
                                         std::to_string(expected),
                                     {d, got, expected});
    }
    return Certificate::pass(ObjectKind::cdf);
}

inline Certificate verify_dm(const DiffMatrix& m) {
    if (m.v < 1) throw StructuralError("matrix order must be positive");
    const auto cols = static_cast<std::size_t>(m.v);
    for (std::size_t r = 0; r < m.k(); ++r) {
        if (m.rows[r].size() != cols)
            throw StructuralError("row " + std::to_string(r) + " has " +
                                  std::to_string(m.rows[r].size()) + " entries, expected " +
                                  std::to_string(cols));
        for (Residue e : m.rows[r])
            if (e < 0 || e >= m.v)
                throw StructuralError("entry " + std::to_string(e) + " in row " +
                                      std::to_string(r) + " is not a residue modulo " +
                                      std::to_string(m.v));
    }
    std::vector<std::uint32_t> hits(cols);
    for (std::size_t x = 0; x < m.k(); ++x)
        for (std::size_t y = x + 1; y < m.k(); ++y) {
            std::fill(hits.begin(), hits.end(), 0);
            for (std::size_t j = 0; j < cols; ++j) ++hits[static_cast<std::size_t>(mod(m.rows[x][j] - m.rows[y][j], m.v))];
            for (std::size_t d = 0; d < cols; ++d)
                if (hits[d] != 1)
                    return Certificate::fail(
                        ObjectKind::cdm,
                        "rows " + std::to_string(x) + " and " + std::to_string(y) +
                            " differ by " + std::to_string(d) + " in " + std::to_string(hits[d]) +
                            " columns",
                        {static_cast<std::int64_t>(x), static_cast<std::int64_t>(y),
                         static_cast<std::int64_t>(d), hits[d]});
        }
    return Certificate::pass(ObjectKind::cdm);
}

// ---------------------------------------------------------------------------
// Admissibility of (gh, h, 4, 1)-CDFs

enum class Existence { exists, nonexistent, unresolved };

inline const char* to_string(Existence e) {
    switch (e) {
        case Existence::exists: return "exists";
        case Existence::nonexistent: return "nonexistent";
        case Existence::unresolved: return "unresolved";
    }
    return "?";
}

struct Admissibility {
    Residue g = 0;
    Residue h = 0;
    Existence verdict = Existence::unresolved;
    std::string reason;
};

namespace detail {

/// Open cases of the recursive existence result for general h, as a
/// description of the condition that matched, or empty.
inline std::string open_case(Residue g, Residue h) {
    const Residue h12 = h % 12, h24 = h % 24;
    if ((h12 == 1 || h12 == 5 || h12 == 7 || h12 == 11) && g == 25)
        return "h = 1,5,7,11 (mod 12) and g = 25";
    if ((h == 9 || h == 27) && g % 4 == 1) return "h in {9,27} and g = 1 (mod 4)";
    if ((h12 == 3 || h12 == 9) && g == 9) return "h = 3,9 (mod 12) and g = 9";
    if ((h24 == 8 || h24 == 16) && g % 3 == 1) return "h = 8,16 (mod 24) and g = 1 (mod 3)";
    if ((h24 == 4 || h24 == 20) && g == 7) return "h = 4,20 (mod 24) and g = 7";
    if (h12 == 6 && g == 5) return "h = 6 (mod 12) and g = 5";
    if (h == 18 && g % 2 == 1) return "h = 18 and g odd";
    if (h == 54 && (g % 6 == 3 || g % 6 == 5)) return "h = 54 and g = 3,5 (mod 6)";
    if (h24 == 0 && g >= 5) return "h = 0 (mod 24)";
    if (h24 == 12 && (g % 3 == 0 || g % 3 == 2) && g >= 5)
        return "h = 12 (mod 24) and g = 0,2 (mod 3)";
    if ((h == 12 || h == 36) && g % 3 == 1 && g >= 10)
        return "h in {12,36}, g = 1 (mod 3) and g >= 10";
    return {};
}

}  // namespace detail

/// Existence status of a (gh, h, 4, 1)-CDF.
inline Admissibility admissible(Residue g, Residue h) {
    if (g < 1 || h < 1) throw InvalidArgument("g and h must be positive");
    auto verdict = [&](Existence e, std::string why) { return Admissibility{g, h, e, std::move(why)}; };

    if ((g * h - h) % 12 != 0)
        return verdict(Existence::nonexistent, "necessary condition gh = h (mod 12) fails");
    if (g < 4) return verdict(Existence::nonexistent, "necessary condition g >= 4 fails");
    if (g == 4) return verdict(Existence::nonexistent, "no (4h,h,4,1)-CDF exists for any h");

    static constexpr std::pair<Residue, Residue> kExceptions[] = {{25, 1}, {7, 4}, {9, 3}, {5, 6}};
    for (auto [eg, eh] : kExceptions)
        if (g == eg && h == eh)
            return verdict(Existence::nonexistent,
                           "definite exception (g,h) = (" + std::to_string(eg) + "," +
                               std::to_string(eh) + ")");

    if (h == 1 || h == 4)
        return verdict(Existence::exists, "h in {1,4}: exists for every admissible g");
    if (h == 2 || h == 3 || h == 6)
        return verdict(Existence::exists, "h in {2,3,6}: exists for every admissible g");

    if (std::string open = detail::open_case(g, h); !open.empty())
        return verdict(Existence::unresolved, "possible exception: " + open);
    return verdict(Existence::exists, "recursive construction from a smaller CDF and a CDM");
}

// ---------------------------------------------------------------------------
// Developed designs

namespace detail {

/// Upper-triangular pair counts over the point indices of a design.
class PairCounter {
public:
    explicit PairCounter(std::size_t n) : n_(n), counts_(n * n, 0) {}

    void add(std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        ++counts_[a * n_ + b];
    }
    std::uint32_t count(std::size_t a, std::size_t b) const {
        if (a > b) std::swap(a, b);
        return counts_[a * n_ + b];
    }

private:
    std::size_t n_;
    std::vector<std::uint32_t> counts_;
};

inline void check_points(const PointDesign& d) {
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        std::vector<Point> pts = d.blocks[b];
        std::sort(pts.begin(), pts.end());
        if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
            throw StructuralError("block " + std::to_string(b) + " repeats a point");
        for (const Point& p : pts)
            if ((p.is_infinity() && !d.has_infinity) ||
                (!p.is_infinity() && (p.residue() < 0 || p.residue() >= d.finite_points)))
                throw StructuralError("block " + std::to_string(b) + " uses undeclared point " +
                                      to_string(p));
    }
}

inline std::int64_t point_value(const Point& p) { return p.is_infinity() ? -1 : p.residue(); }

}  // namespace detail

inline Certificate verify_gdd(const PointDesign& d) {
    detail::check_points(d);
    const std::size_t n = d.point_count();
    std::vector<std::size_t> group_of(n, SIZE_MAX);
    for (std::size_t gi = 0; gi < d.groups.size(); ++gi)
        for (const Point& p : d.groups[gi]) {
            if ((p.is_infinity() && !d.has_infinity) ||
                (!p.is_infinity() && (p.residue() < 0 || p.residue() >= d.finite_points)))
                throw StructuralError("group " + std::to_string(gi) + " uses undeclared point " +
                                      to_string(p));
            std::size_t& slot = group_of[d.index_of(p)];
            if (slot != SIZE_MAX)
                throw StructuralError("point " + to_string(p) + " lies in two groups");
            slot = gi;
        }
    for (std::size_t i = 0; i < n; ++i)
        if (group_of[i] == SIZE_MAX)
            throw StructuralError("point " + std::to_string(i) + " lies in no group");

    detail::PairCounter pairs(n);
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        const auto& blk = d.blocks[b];
        for (std::size_t i = 0; i < blk.size(); ++i)
            for (std::size_t j = i + 1; j < blk.size(); ++j) {
                const std::size_t a = d.index_of(blk[i]), c = d.index_of(blk[j]);
                if (group_of[a] == group_of[c])
                    return Certificate::fail(ObjectKind::gdd,
                                             "block " + std::to_string(b) +
                                                 " meets a group in two points",
                                             {static_cast<std::int64_t>(b),
                                              detail::point_value(blk[i]),
                                              detail::point_value(blk[j])});
                pairs.add(a, c);
            }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c) {
            if (group_of[a] == group_of[c]) continue;
            if (const auto cnt = pairs.count(a, c); cnt != 1)
                return Certificate::fail(ObjectKind::gdd,
                                         "pair {" + std::to_string(a) + "," + std::to_string(c) +
                                             "} lies in " + std::to_string(cnt) + " blocks",
                                         {static_cast<std::int64_t>(a),
                                          static_cast<std::int64_t>(c), cnt});
        }
    return Certificate::pass(ObjectKind::gdd);
}

namespace detail {

/// Whether i -> i+1 (mod v), infinity fixed, maps the block multiset to itself.
inline bool shift_invariant(const PointDesign& d) {
    if (d.finite_points < 1) return true;
    auto canon = [&](const std::vector<Point>& blk, Residue shift) {
        std::vector<Point> out;
        out.reserve(blk.size());
        for (const Point& p : blk)
            out.push_back(p.is_infinity() ? p : Point(mod(p.residue() + shift, d.finite_points)));
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<std::vector<Point>> orig, moved;
    orig.reserve(d.blocks.size());
    moved.reserve(d.blocks.size());
    for (const auto& blk : d.blocks) {
        orig.push_back(canon(blk, 0));
        moved.push_back(canon(blk, 1));
    }
    std::sort(orig.begin(), orig.end());
    std::sort(moved.begin(), moved.end());
    return orig == moved;
}

}  // namespace detail

/// Every unordered pair of points in exactly one block. Also reports whether
/// the design is 1-rotational under i -> i+1 with infinity fixed.
inline Certificate verify_steiner(const PointDesign& d) {
    detail::check_points(d);
    const std::size_t n = d.point_count();
    detail::PairCounter pairs(n);
    for (const auto& blk : d.blocks)
        for (std::size_t i = 0; i < blk.size(); ++i)
            for (std::size_t j = i + 1; j < blk.size(); ++j)
                pairs.add(d.index_of(blk[i]), d.index_of(blk[j]));

    Certificate cert = Certificate::pass(ObjectKind::steiner);
    for (std::size_t a = 0; a < n && cert.valid; ++a)
        for (std::size_t c = a + 1; c < n; ++c)
            if (const auto cnt = pairs.count(a, c); cnt != 1) {
                cert = Certificate::fail(ObjectKind::steiner,
                                         "pair {" + std::to_string(a) + "," + std::to_string(c) +
                                             "} lies in " + std::to_string(cnt) + " blocks",
                                         {static_cast<std::int64_t>(a),
                                          static_cast<std::int64_t>(c), cnt});
                break;
            }
    cert.one_rotational = d.has_infinity && detail::shift_invariant(d);
    return cert;
}

// ---------------------------------------------------------------------------
// Optical orthogonal codes

namespace detail {

/// Direct evaluation of the auto- and cross-correlation sums on 0/1 vectors.
/// Returns {x, y, shift, value} for the first violation, or nothing.
inline std::optional<std::vector<std::int64_t>> correlation_violation(
    const std::vector<Block>& codewords, Residue v) {
    const auto n = static_cast<std::size_t>(v);
    std::vector<std::vector<std::uint8_t>> vec(codewords.size(), std::vector<std::uint8_t>(n, 0));
    for (std::size_t c = 0; c < codewords.size(); ++c)
        for (Residue e : codewords[c]) vec[c][static_cast<std::size_t>(e)] = 1;

    for (std::size_t x = 0; x < codewords.size(); ++x)
        for (std::size_t y = x; y < codewords.size(); ++y)
            for (std::size_t i = 0; i < n; ++i) {
                if (x == y && i == 0) continue;
                std::int64_t sum = 0;
                for (Residue t : codewords[x])  // x_t is zero off the support
                    sum += vec[y][(static_cast<std::size_t>(t) + i) % n];
                if (sum > 1)
                    return std::vector<std::int64_t>{static_cast<std::int64_t>(x),
                                                      static_cast<std::int64_t>(y),
                                                      static_cast<std::int64_t>(i), sum};
            }
    return std::nullopt;
}

}  // namespace detail

inline std::uint64_t johnson_bound(std::uint64_t v, std::uint64_t k) {
    if (v < 1 || k < 2) throw InvalidArgument("johnson bound needs v >= 1 and k >= 2");
    return (v - 1) / (k * (k - 1));
}

/// A set of k-subsets of Z_v whose difference lists are jointly repetition-free.
/// The difference-list test and the correlation-sum test must agree.
inline Certificate verify_ooc(const std::vector<Block>& codewords, Residue v, std::size_t k) {
    if (v < 1) throw StructuralError("code length must be positive");
    for (const Block& c : codewords) {
        if (c.size() != k)
            throw StructuralError("codeword " + to_string(c) + " has weight " +
                                  std::to_string(c.size()) + ", expected " + std::to_string(k));
        c.check_in(v);
    }
    DifferenceMultiset delta(v);
    for (const Block& c : codewords) delta += differences(c, v);

    std::optional<Residue> repeated;
    for (Residue d = 1; d < v; ++d)
        if (delta.count(d) > 1) {
            repeated = d;
            break;
        }
    const auto correlation = detail::correlation_violation(codewords, v);
    if (repeated.has_value() != correlation.has_value())
        throw std::logic_error("difference and correlation tests disagree");

    Certificate cert = repeated
        ? Certificate::fail(ObjectKind::ooc,
                            "difference " + std::to_string(*repeated) + " occurs " +
                                std::to_string(delta.count(*repeated)) + " times",
                            {*repeated, delta.count(*repeated)})
        : Certificate::pass(ObjectKind::ooc);
    cert.size = codewords.size();
    if (k >= 2) {
        cert.bound = johnson_bound(static_cast<std::uint64_t>(v), k);
        cert.optimal = cert.valid && *cert.size == *cert.bound;
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Cyclic q-ary constant-weight codes

/// Upper bound C(n) on the size of a cyclic (n,6,4)_3 code.
inline std::uint64_t cn_bound(std::uint64_t n) {
    if (n < 1) throw InvalidArgument("code length must be positive");
    const std::uint64_t base = n * ((n - 1) / 6);
    return (n % 6 == 0 || n % 6 == 4) ? base + n / 2 : base;
}

/// d_H(A,B) = 2w - |p(A) n p(B)| - |A n B|.
inline std::size_t code_distance(const SetCodeword& a, const SetCodeword& b, std::size_t w) {
    auto projection = [w](const SetCodeword& c) {
        if (c.size() != w)
            throw StructuralError("codeword has " + std::to_string(c.size()) +
                                  " symbols, expected " + std::to_string(w));
        std::vector<Residue> p;
        p.reserve(c.size());
        for (const CodeSymbol& s : c) p.push_back(s.position);
        std::sort(p.begin(), p.end());
        if (std::adjacent_find(p.begin(), p.end()) != p.end())
            throw StructuralError("codeword projection is not injective");
        return p;
    };
    const auto pa = projection(a), pb = projection(b);
    std::vector<Residue> common;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(common));
    const SetCodeword sa = normalized(a), sb = normalized(b);
    SetCodeword both;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
    return 2 * w - common.size() - both.size();
}

inline Certificate verify_cw_code(const std::vector<SetCodeword>& code, Residue n, std::size_t d,
                                  std::size_t w, int q) {
    if (n < 1 || q < 2) throw StructuralError("code needs n >= 1 and q >= 2");
    std::vector<SetCodeword> words;
    words.reserve(code.size());
    for (const SetCodeword& c : code) {
        for (const CodeSymbol& s : c)
            if (s.position < 0 || s.position >= n || s.symbol < 1 || s.symbol >= q)
                throw StructuralError("symbol (" + std::to_string(s.position) + "," +
                                      std::to_string(s.symbol) + ") outside Z_n x {1..q-1}");
        words.push_back(normalized(c));
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());

    auto finish = [&](Certificate cert) {
        cert.size = words.size();
        if (d == 6 && w == 4 && q == 3) {
            cert.bound = cn_bound(static_cast<std::uint64_t>(n));
            cert.optimal = cert.valid && *cert.size == *cert.bound;
        }
        return cert;
    };

    for (std::size_t i = 0; i < words.size(); ++i) {
        std::vector<Residue> p;
        for (const CodeSymbol& s : words[i]) p.push_back(s.position);
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        if (words[i].size() != w || p.size() != w)
            return finish(Certificate::fail(ObjectKind::cwcode,
                                            "codeword " + std::to_string(i) +
                                                " does not have w distinct positions",
                                            {static_cast<std::int64_t>(i),
                                             static_cast<std::int64_t>(p.size())}));
    }
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
            if (const auto dist = code_distance(words[i], words[j], w); dist < d)
                return finish(Certificate::fail(ObjectKind::cwcode,
                                                "codewords " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " are at distance " +
                                                    std::to_string(dist),
                                                {static_cast<std::int64_t>(i),
                                                 static_cast<std::int64_t>(j),
                                                 static_cast<std::int64_t>(dist)}));
    for (std::size_t i = 0; i < words.size(); ++i)
        if (!std::binary_search(words.begin(), words.end(), shifted(words[i], 1, n)))
            return finish(Certificate::fail(ObjectKind::cwcode,
                                            "shift of codeword " + std::to_string(i) +
                                                " is missing",
                                            {static_cast<std::int64_t>(i)}));
    return finish(Certificate::pass(ObjectKind::cwcode));
}

}  // namespace cdforge
