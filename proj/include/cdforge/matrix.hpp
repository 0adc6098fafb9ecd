#pragma once

#include <cstddef>
#include <vector>

#include "cdforge/group.hpp"

namespace cdforge {

/// A k x v matrix over Z_v; a (v,k,1) cyclic difference matrix when any two
/// rows' column-wise differences hit every residue exactly once.
struct DiffMatrix {
    Residue v = 1;
    std::vector<std::vector<Residue>> rows;

    std::size_t k() const noexcept { return rows.size(); }
    Residue at(std::size_t row, std::size_t col) const { return rows[row][col]; }

    bool operator==(const DiffMatrix&) const = default;
};

}  // namespace cdforge
