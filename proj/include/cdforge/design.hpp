#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "cdforge/group.hpp"

namespace cdforge {

/// A point of a developed design: a residue of Z_v or the fixed point.
class Point {
public:
    constexpr explicit Point(Residue r) : value_(r) {}

    static constexpr Point infinity() { return Point(Tag{}); }

    constexpr bool is_infinity() const noexcept { return value_ == kInfinity; }
    constexpr Residue residue() const noexcept { return value_; }

    constexpr auto operator<=>(const Point& o) const noexcept {
        // infinity sorts after every residue
        if (is_infinity() || o.is_infinity())
            return static_cast<int>(is_infinity()) <=> static_cast<int>(o.is_infinity());
        return value_ <=> o.value_;
    }
    constexpr bool operator==(const Point&) const = default;

private:
    struct Tag {};
    static constexpr Residue kInfinity = -1;
    constexpr explicit Point(Tag) : value_(kInfinity) {}

    Residue value_;
};

inline std::string to_string(const Point& p) {
    return p.is_infinity() ? std::string("inf") : std::to_string(p.residue());
}

/// A developed design on Z_v (plus an optional fixed point) with a group
/// partition. The declared automorphism is i -> i+1 mod v, fixing infinity.
struct PointDesign {
    Residue finite_points = 0;
    bool has_infinity = false;
    std::vector<std::vector<Point>> groups;
    std::vector<std::vector<Point>> blocks;
    std::vector<std::string> notes;

    std::size_t point_count() const noexcept {
        return static_cast<std::size_t>(finite_points) + (has_infinity ? 1 : 0);
    }

    /// Dense index of a point: residues map to themselves, infinity to v.
    std::size_t index_of(const Point& p) const {
        return p.is_infinity() ? static_cast<std::size_t>(finite_points)
                               : static_cast<std::size_t>(p.residue());
    }

    bool operator==(const PointDesign&) const = default;
};

}  // namespace cdforge
