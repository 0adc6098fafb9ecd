#pragma once

// Shipped data: the catalog of published base-block lists and the frame
// coefficient table. Both are compiled in from data/*.json; the environment
// variable CDF_FORGE_DATA names a directory whose catalog.json and
// frame_table.json replace them. Everything is validated on first use.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdforge/embedded_data.hpp"
#include "cdforge/error.hpp"
#include "cdforge/frame.hpp"
#include "cdforge/group.hpp"
#include "cdforge/verify.hpp"

namespace cdforge {

struct CatalogEntry {
    Family family;
    std::string source;
};

using Catalog = std::map<std::pair<Residue, Residue>, CatalogEntry>;  // keyed by (g, h)
using FrameTable = std::map<std::pair<int, int>, std::array<Residue, 18>>;  // keyed by (h, x)

namespace detail {

inline std::string read_data_file(const std::string& name, std::string_view embedded) {
    const char* dir = std::getenv("CDF_FORGE_DATA");
    if (dir == nullptr || *dir == '\0') return std::string(embedded);
    const auto path = std::filesystem::path(dir) / name;
    std::ifstream in(path);
    if (!in) throw Error("cannot read data file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json parse_data(const std::string& text, const std::string& name) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("", name + ": " + e.what());
    }
}

}  // namespace detail

/// Parses and validates catalog JSON: every entry must verify as a CDF.
inline Catalog parse_catalog(const std::string& text) {
    const nlohmann::json doc = detail::parse_data(text, "catalog.json");
    Catalog out;
    try {
        const auto& families = doc.at("families");
        for (std::size_t i = 0; i < families.size(); ++i) {
            const auto& e = families[i];
            Family f;
            const Residue g = e.at("g").get<Residue>();
            f.h = e.at("h").get<Residue>();
            f.v = g * f.h;
            f.k = e.at("k").get<std::size_t>();
            for (const auto& b : e.at("blocks")) f.blocks.emplace_back(b.get<std::vector<Residue>>());
            const Certificate cert = verify_cdf(f);
            if (!cert.valid)
                throw Error("catalog entry (" + std::to_string(g) + "," + std::to_string(f.h) +
                            ") fails verification: " + cert.witness->condition);
            if (!out.emplace(std::pair{g, f.h}, CatalogEntry{f, e.value("source", "")}).second)
                throw Error("catalog lists (" + std::to_string(g) + "," + std::to_string(f.h) +
                            ") twice");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("/families", e.what());
    }
    return out;
}

/// Parses and validates the frame table: one row per (h, x), h in {2,3,6},
/// x in [0,5], and each row must give a clean frame for small t.
inline FrameTable parse_frame_table(const std::string& text) {
    const nlohmann::json doc = detail::parse_data(text, "frame_table.json");
    FrameTable out;
    try {
        for (const auto& row : doc.at("rows")) {
            const int h = row.at("h").get<int>();
            const int x = row.at("x").get<int>();
            const auto c = row.at("coefficients").get<std::vector<Residue>>();
            if (c.size() != 18)
                throw Error("frame table row (h=" + std::to_string(h) + ", x=" +
                            std::to_string(x) + ") needs 18 coefficients");
            FrameParams p{h, x, 3, {}};
            std::copy(c.begin(), c.end(), p.coefficients.begin());
            for (Residue t : {4, 5}) {
                p.t = t;
                evaluate_frame(p);  // throws on transcription drift
            }
            if (!out.emplace(std::pair{h, x}, p.coefficients).second)
                throw Error("frame table lists (h=" + std::to_string(h) + ", x=" +
                            std::to_string(x) + ") twice");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("/rows", e.what());
    }
    for (int h : {2, 3, 6})
        for (int x = 0; x <= 5; ++x)
            if (!out.count({h, x}))
                throw Error("frame table is missing row (h=" + std::to_string(h) + ", x=" +
                            std::to_string(x) + ")");
    return out;
}

inline const Catalog& catalog() {
    static const Catalog c = parse_catalog(detail::read_data_file("catalog.json", embedded::catalog_json));
    return c;
}

inline const FrameTable& frame_table() {
    static const FrameTable t =
        parse_frame_table(detail::read_data_file("frame_table.json", embedded::frame_table_json));
    return t;
}

}  // namespace cdforge
