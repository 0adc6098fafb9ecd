#pragma once

// Family documents: the JSON interchange format for every object the library
// produces, plus GAP export. Serialization is canonical (sorted keys, fixed
// indentation), so equal objects give byte-identical files.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdforge/applications.hpp"
#include "cdforge/code.hpp"
#include "cdforge/compose.hpp"
#include "cdforge/design.hpp"
#include "cdforge/error.hpp"
#include "cdforge/group.hpp"
#include "cdforge/matrix.hpp"
#include "cdforge/search.hpp"
#include "cdforge/verify.hpp"

namespace cdforge {

inline constexpr int kFormatVersion = 1;

enum class DocumentKind { cdf, cdm, gdd, steiner, ooc, cwcode, plan, checkpoint };

inline const char* to_string(DocumentKind k) {
    switch (k) {
        case DocumentKind::cdf: return "cdf";
        case DocumentKind::cdm: return "cdm";
        case DocumentKind::gdd: return "gdd";
        case DocumentKind::steiner: return "steiner";
        case DocumentKind::ooc: return "ooc";
        case DocumentKind::cwcode: return "cwcode";
        case DocumentKind::plan: return "plan";
        case DocumentKind::checkpoint: return "checkpoint";
    }
    return "?";
}

inline std::optional<DocumentKind> document_kind_from_string(std::string_view s) {
    for (DocumentKind k : {DocumentKind::cdf, DocumentKind::cdm, DocumentKind::gdd, DocumentKind::steiner,
                           DocumentKind::ooc, DocumentKind::cwcode, DocumentKind::plan, DocumentKind::checkpoint})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

/// One serialized object. `verification.digest` covers kind, parameters and
/// payload; `verification.valid` is the verifier's verdict at write time.
struct FamilyDocument {
    int format_version = kFormatVersion;
    DocumentKind kind = DocumentKind::cdf;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json payload = nlohmann::json::object();
    nlohmann::json provenance = nlohmann::json::object();
    bool valid = false;
    std::string digest;

    bool operator==(const FamilyDocument&) const = default;
};

namespace detail {

inline std::string content_digest(DocumentKind kind, const nlohmann::json& parameters, const nlohmann::json& payload) {
    const nlohmann::json body{{"kind", to_string(kind)}, {"parameters", parameters}, {"payload", payload}};
    return fnv1a64(body.dump());
}

inline nlohmann::json blocks_json(const std::vector<Block>& blocks) {
    nlohmann::json out = nlohmann::json::array();
    for (const Block& b : blocks) out.push_back(b.elements());
    return out;
}

inline nlohmann::json point_json(const Point& p) {
    return p.is_infinity() ? nlohmann::json("inf") : nlohmann::json(p.residue());
}

inline nlohmann::json point_sets_json(const std::vector<std::vector<Point>>& sets) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : sets) {
        nlohmann::json row = nlohmann::json::array();
        for (const Point& p : s) row.push_back(point_json(p));
        out.push_back(std::move(row));
    }
    return out;
}

inline nlohmann::json plan_json(const PlanNode& n) {
    nlohmann::json out{{"g", n.g}, {"h", n.h}, {"rule", to_string(n.rule)}, {"reason", n.reason}};
    if (n.rule == Rule::product) {
        out["cdm_order"] = n.cdm_order;
        out["cdm_source"] = to_string(n.cdm_source);
    }
    if (n.rule == Rule::frame_complete) {
        out["frame_x"] = n.frame_x;
        out["frame_t"] = n.frame_t;
    }
    nlohmann::json kids = nlohmann::json::array();
    for (const PlanNode& c : n.children) kids.push_back(plan_json(c));
    out["children"] = std::move(kids);
    return out;
}

inline nlohmann::json strategy_json(const SearchStrategy& s) {
    return {{"branching", s.branching == Branching::hybrid ? "hybrid" : "smallest-difference"},
            {"mrv_threshold", s.mrv_threshold},
            {"restarts", s.restarts},
            {"seed", s.seed},
            {"first_restart_nodes", s.first_restart_nodes},
            {"restart_growth", s.restart_growth},
            {"check_invariants", s.check_invariants}};
}

inline std::string escape_pointer_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

/// Typed access into a JSON tree that reports failures by JSON pointer.
class Reader {
public:
    Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const nlohmann::json& json() const { return j_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_.empty() ? "/" : path_, what); }

    Reader at(const std::string& key) const {
        if (!j_.is_object()) fail("expected an object");
        const auto it = j_.find(key);
        const std::string child = path_ + "/" + escape_pointer_token(key);
        if (it == j_.end()) throw ParseError(child, "missing field \"" + key + "\"");
        return Reader(*it, child);
    }
    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    Reader at(std::size_t i) const {
        if (!j_.is_array()) fail("expected an array");
        if (i >= j_.size()) throw ParseError(path_ + "/" + std::to_string(i), "index out of range");
        return Reader(j_[i], path_ + "/" + std::to_string(i));
    }
    std::size_t size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }

    std::int64_t integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<std::int64_t>();
    }
    std::int64_t non_negative() const {
        const std::int64_t x = integer();
        if (x < 0) fail("expected a non-negative integer");
        return x;
    }
    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_integer() || (j_.is_number_integer() && !j_.is_number_unsigned() && j_.get<std::int64_t>() < 0))
            fail("expected a non-negative integer");
        return j_.get<std::uint64_t>();
    }
    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) fail("expected true or false");
        return j_.get<bool>();
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }

    std::vector<Residue> residues() const {
        std::vector<Residue> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).non_negative());
        return out;
    }

    Block block() const {
        try {
            return Block(residues());
        } catch (const InvalidBlock& e) {
            fail(e.what());
        }
    }

    std::vector<Block> blocks() const {
        std::vector<Block> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).block());
        return out;
    }

    Point point() const {
        if (j_.is_string()) {
            if (j_.get<std::string>() != "inf") fail("expected a residue or \"inf\"");
            return Point::infinity();
        }
        return Point(non_negative());
    }

    std::vector<std::vector<Point>> point_sets() const {
        std::vector<std::vector<Point>> out;
        for (std::size_t i = 0; i < size(); ++i) {
            const Reader row = at(i);
            std::vector<Point> pts;
            for (std::size_t j = 0; j < row.size(); ++j) pts.push_back(row.at(j).point());
            out.push_back(std::move(pts));
        }
        return out;
    }

private:
    const nlohmann::json& j_;
    std::string path_;
};

inline PlanNode read_plan(const Reader& r) {
    PlanNode n;
    n.g = r.at("g").integer();
    n.h = r.at("h").integer();
    const std::string rule = r.at("rule").string();
    const auto parsed = rule_from_string(rule);
    if (!parsed) r.at("rule").fail("unknown rule \"" + rule + "\"");
    n.rule = *parsed;
    n.reason = r.at("reason").string();
    if (n.rule == Rule::product) {
        n.cdm_order = r.at("cdm_order").integer();
        const std::string src = r.at("cdm_source").string();
        bool known = false;
        for (CdmSource s : {CdmSource::none, CdmSource::multiplicative, CdmSource::composite, CdmSource::search})
            if (src == to_string(s)) {
                n.cdm_source = s;
                known = true;
            }
        if (!known) r.at("cdm_source").fail("unknown CDM source \"" + src + "\"");
    }
    if (n.rule == Rule::frame_complete) {
        n.frame_x = static_cast<int>(r.at("frame_x").integer());
        n.frame_t = r.at("frame_t").integer();
    }
    const Reader kids = r.at("children");
    for (std::size_t i = 0; i < kids.size(); ++i) n.children.push_back(read_plan(kids.at(i)));
    return n;
}

inline SearchStrategy read_strategy(const Reader& r) {
    SearchStrategy s;
    const std::string b = r.at("branching").string();
    if (b == "hybrid") s.branching = Branching::hybrid;
    else if (b == "smallest-difference") s.branching = Branching::smallest_difference;
    else r.at("branching").fail("unknown branching rule \"" + b + "\"");
    s.mrv_threshold = static_cast<std::size_t>(r.at("mrv_threshold").non_negative());
    s.restarts = r.at("restarts").boolean();
    s.seed = r.at("seed").unsigned_integer();
    s.first_restart_nodes = r.at("first_restart_nodes").unsigned_integer();
    s.restart_growth = r.at("restart_growth").number();
    s.check_invariants = r.at("check_invariants").boolean();
    return s;
}

inline FamilyDocument finish(DocumentKind kind, nlohmann::json parameters, nlohmann::json payload,
                             nlohmann::json provenance, bool valid) {
    FamilyDocument d;
    d.kind = kind;
    d.parameters = std::move(parameters);
    d.payload = std::move(payload);
    d.provenance = std::move(provenance);
    d.valid = valid;
    d.digest = content_digest(kind, d.parameters, d.payload);
    return d;
}

inline void expect_kind(const FamilyDocument& d, DocumentKind k) {
    if (d.kind != k)
        throw ParseError("/kind", std::string("expected a ") + to_string(k) + " document, found " + to_string(d.kind));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Object -> document

inline FamilyDocument to_document(const Family& f, nlohmann::json provenance = nlohmann::json::object()) {
    return detail::finish(DocumentKind::cdf, {{"v", f.v}, {"h", f.h}, {"g", f.g()}, {"k", f.k}},
                          {{"blocks", detail::blocks_json(f.blocks)}}, std::move(provenance), verify_cdf(f).valid);
}

inline FamilyDocument to_document(const DiffMatrix& m, nlohmann::json provenance = nlohmann::json::object()) {
    return detail::finish(DocumentKind::cdm, {{"v", m.v}, {"k", m.k()}}, {{"rows", m.rows}}, std::move(provenance),
                          verify_dm(m).valid);
}

/// GDD or Steiner system, by `kind`.
inline FamilyDocument to_document(const PointDesign& d, DocumentKind kind,
                                  nlohmann::json provenance = nlohmann::json::object()) {
    if (kind != DocumentKind::gdd && kind != DocumentKind::steiner)
        throw InvalidArgument("a point design serializes as gdd or steiner");
    const Certificate cert = kind == DocumentKind::gdd ? verify_gdd(d) : verify_steiner(d);
    nlohmann::json params{{"finite_points", d.finite_points}, {"infinity", d.has_infinity}, {"points", d.point_count()}};
    if (kind == DocumentKind::steiner) params["one_rotational"] = cert.one_rotational.value_or(false);
    nlohmann::json payload{{"groups", detail::point_sets_json(d.groups)},
                           {"blocks", detail::point_sets_json(d.blocks)},
                           {"notes", d.notes}};
    return detail::finish(kind, std::move(params), std::move(payload), std::move(provenance), cert.valid);
}

inline FamilyDocument to_document(const OocCode& c, nlohmann::json provenance = nlohmann::json::object()) {
    const Certificate cert = verify_ooc(c.codewords, c.v, c.k);
    return detail::finish(DocumentKind::ooc,
                          {{"v", c.v}, {"k", c.k}, {"johnson_bound", cert.bound.value_or(0)},
                           {"j_optimal", cert.optimal.value_or(false)}},
                          {{"codewords", detail::blocks_json(c.codewords)}}, std::move(provenance), cert.valid);
}

inline FamilyDocument to_document(const CwCode& c, nlohmann::json provenance = nlohmann::json::object()) {
    const Certificate cert = verify_cw_code(c.codewords, c.n, c.d, c.w, c.q);
    nlohmann::json words = nlohmann::json::array();
    for (const SetCodeword& w : c.codewords) {
        nlohmann::json cw = nlohmann::json::array();
        for (const CodeSymbol& s : w) cw.push_back({s.position, s.symbol});
        words.push_back(std::move(cw));
    }
    return detail::finish(DocumentKind::cwcode, {{"n", c.n}, {"d", c.d}, {"w", c.w}, {"q", c.q}},
                          {{"codewords", std::move(words)}}, std::move(provenance), cert.valid);
}

inline FamilyDocument to_document(const PlanNode& p, nlohmann::json provenance = nlohmann::json::object()) {
    return detail::finish(DocumentKind::plan, {{"g", p.g}, {"h", p.h}}, {{"plan", detail::plan_json(p)}},
                          std::move(provenance), p.constructive());
}

inline FamilyDocument to_document(const SearchCheckpoint& c, nlohmann::json provenance = nlohmann::json::object()) {
    nlohmann::json payload{{"instance_hash", c.instance_hash},
                           {"frame", detail::blocks_json(c.frame)},
                           {"strategy", detail::strategy_json(c.strategy)},
                           {"frontier", c.frontier},
                           {"pending_roots", c.pending_roots},
                           {"next_restart", c.next_restart},
                           {"nodes", c.nodes}};
    return detail::finish(DocumentKind::checkpoint, {{"v", c.v}, {"h", c.h}, {"k", c.k}}, std::move(payload),
                          std::move(provenance), true);
}

// ---------------------------------------------------------------------------
// Document -> object

inline Family family_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::cdf);
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    Family f;
    f.v = p.at("v").integer();
    f.h = p.at("h").integer();
    f.k = static_cast<std::size_t>(p.at("k").non_negative());
    if (f.v < 1) p.at("v").fail("group order must be positive");
    if (f.h < 1 || f.v % f.h != 0) p.at("h").fail("subgroup order must divide v");
    if (p.has("g") && p.at("g").integer() != f.v / f.h) p.at("g").fail("g must equal v / h");
    f.blocks = b.at("blocks").blocks();
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
        const auto r = b.at("blocks").at(i);
        if (f.blocks[i].size() != f.k) r.fail("block has " + std::to_string(f.blocks[i].size()) + " elements");
        if (!f.blocks[i].empty() && f.blocks[i].elements().back() >= f.v) r.fail("element outside Z_v");
    }
    return f;
}

inline DiffMatrix matrix_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::cdm);
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    DiffMatrix m;
    m.v = p.at("v").integer();
    if (m.v < 1) p.at("v").fail("matrix order must be positive");
    const auto k = static_cast<std::size_t>(p.at("k").non_negative());
    const auto rows = b.at("rows");
    if (rows.size() != k) rows.fail("expected " + std::to_string(k) + " rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = rows.at(i).residues();
        if (row.size() != static_cast<std::size_t>(m.v)) rows.at(i).fail("row length differs from v");
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] >= m.v) rows.at(i).at(j).fail("entry outside Z_v");
        m.rows.push_back(std::move(row));
    }
    return m;
}

inline PointDesign design_from(const FamilyDocument& d) {
    if (d.kind != DocumentKind::gdd && d.kind != DocumentKind::steiner)
        throw ParseError("/kind", std::string("expected a gdd or steiner document, found ") + to_string(d.kind));
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    PointDesign out;
    out.finite_points = p.at("finite_points").non_negative();
    out.has_infinity = p.at("infinity").boolean();
    out.groups = b.at("groups").point_sets();
    out.blocks = b.at("blocks").point_sets();
    const auto notes = b.at("notes");
    for (std::size_t i = 0; i < notes.size(); ++i) out.notes.push_back(notes.at(i).string());
    return out;
}

inline OocCode ooc_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::ooc);
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    OocCode c;
    c.v = p.at("v").integer();
    if (c.v < 1) p.at("v").fail("code length must be positive");
    c.k = static_cast<std::size_t>(p.at("k").non_negative());
    c.codewords = b.at("codewords").blocks();
    return c;
}

inline CwCode cwcode_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::cwcode);
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    CwCode c;
    c.n = p.at("n").integer();
    c.d = static_cast<std::size_t>(p.at("d").non_negative());
    c.w = static_cast<std::size_t>(p.at("w").non_negative());
    c.q = static_cast<int>(p.at("q").integer());
    const auto words = b.at("codewords");
    for (std::size_t i = 0; i < words.size(); ++i) {
        SetCodeword cw;
        const auto w = words.at(i);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const auto sym = w.at(j);
            if (sym.size() != 2) sym.fail("expected [position, symbol]");
            cw.push_back({sym.at(0).non_negative(), static_cast<int>(sym.at(1).integer())});
        }
        c.codewords.push_back(std::move(cw));
    }
    return c;
}

inline PlanNode plan_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::plan);
    return detail::read_plan(detail::Reader(d.payload, "/payload").at("plan"));
}

inline SearchCheckpoint checkpoint_from(const FamilyDocument& d) {
    detail::expect_kind(d, DocumentKind::checkpoint);
    const detail::Reader p(d.parameters, "/parameters"), b(d.payload, "/payload");
    SearchCheckpoint c;
    c.v = p.at("v").integer();
    c.h = p.at("h").integer();
    c.k = static_cast<std::size_t>(p.at("k").non_negative());
    c.instance_hash = b.at("instance_hash").string();
    c.frame = b.at("frame").blocks();
    c.strategy = detail::read_strategy(b.at("strategy"));
    const auto frontier = b.at("frontier");
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        std::vector<std::uint32_t> path;
        const auto row = frontier.at(i);
        for (std::size_t j = 0; j < row.size(); ++j) path.push_back(static_cast<std::uint32_t>(row.at(j).non_negative()));
        c.frontier.push_back(std::move(path));
    }
    const auto roots = b.at("pending_roots");
    for (std::size_t i = 0; i < roots.size(); ++i)
        c.pending_roots.push_back(static_cast<std::uint32_t>(roots.at(i).non_negative()));
    c.next_restart = b.at("next_restart").unsigned_integer();
    c.nodes = b.at("nodes").unsigned_integer();
    return c;
}

/// Re-verifies the object a document describes under its declared kind.
inline Certificate verify_document(const FamilyDocument& d) {
    switch (d.kind) {
        case DocumentKind::cdf: return verify_cdf(family_from(d));
        case DocumentKind::cdm: return verify_dm(matrix_from(d));
        case DocumentKind::gdd: return verify_gdd(design_from(d));
        case DocumentKind::steiner: return verify_steiner(design_from(d));
        case DocumentKind::ooc: {
            const OocCode c = ooc_from(d);
            return verify_ooc(c.codewords, c.v, c.k);
        }
        case DocumentKind::cwcode: {
            const CwCode c = cwcode_from(d);
            return verify_cw_code(c.codewords, c.n, c.d, c.w, c.q);
        }
        case DocumentKind::plan:
        case DocumentKind::checkpoint:
            break;
    }
    throw InvalidArgument(std::string("documents of kind ") + to_string(d.kind) + " carry no verifiable object");
}

// ---------------------------------------------------------------------------
// Text

inline nlohmann::json to_json(const FamilyDocument& d) {
    return {{"format_version", d.format_version},
            {"kind", to_string(d.kind)},
            {"parameters", d.parameters},
            {"payload", d.payload},
            {"provenance", d.provenance},
            {"verification", {{"valid", d.valid}, {"digest", d.digest}}}};
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
inline std::string serialize(const FamilyDocument& d) { return to_json(d).dump(2) + "\n"; }

/// Parses and checks the envelope; the digest must match the content.
inline FamilyDocument parse_document(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    const detail::Reader r(j, "");
    FamilyDocument d;
    d.format_version = static_cast<int>(r.at("format_version").integer());
    if (d.format_version != kFormatVersion)
        r.at("format_version").fail("unsupported format version " + std::to_string(d.format_version));
    const std::string kind = r.at("kind").string();
    const auto k = document_kind_from_string(kind);
    if (!k) r.at("kind").fail("unknown kind \"" + kind + "\"");
    d.kind = *k;
    d.parameters = r.at("parameters").json();
    if (!d.parameters.is_object()) r.at("parameters").fail("expected an object");
    d.payload = r.at("payload").json();
    if (!d.payload.is_object()) r.at("payload").fail("expected an object");
    d.provenance = r.has("provenance") ? r.at("provenance").json() : nlohmann::json::object();
    const auto ver = r.at("verification");
    d.valid = ver.at("valid").boolean();
    d.digest = ver.at("digest").string();
    if (d.digest != detail::content_digest(d.kind, d.parameters, d.payload))
        ver.at("digest").fail("digest does not match the document content");
    return d;
}

inline FamilyDocument round_trip(const FamilyDocument& d) { return parse_document(serialize(d)); }

inline FamilyDocument read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str());
}

inline void write_document(const FamilyDocument& d, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << serialize(d);
    if (!out) throw Error("failed writing " + path);
}

/// GAP assignment statements for a cdf or cdm document. Blocks are put in
/// canonical form (least translate containing 0) and sorted.
inline std::string export_gap(const FamilyDocument& d) {
    auto join = [](const std::vector<Residue>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
        return s + "]";
    };
    if (d.kind == DocumentKind::cdf) {
        const Family f = family_from(d);
        std::vector<Block> blocks;
        for (const Block& b : f.blocks) blocks.push_back(canonical_form(b, f.v));
        std::sort(blocks.begin(), blocks.end());
        std::string s = "v:=" + std::to_string(f.v) + "; h:=" + std::to_string(f.h) + "; blocks:=[";
        for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? ",\n" : "") + join(blocks[i].elements());
        return s + "];\n";
    }
    if (d.kind == DocumentKind::cdm) {
        const DiffMatrix m = matrix_from(d);
        std::string s = "v:=" + std::to_string(m.v) + "; k:=" + std::to_string(m.k()) + "; rows:=[";
        for (std::size_t i = 0; i < m.rows.size(); ++i) s += (i ? ",\n" : "") + join(m.rows[i]);
        return s + "];\n";
    }
    throw InvalidArgument(std::string("GAP export supports cdf and cdm documents, not ") + to_string(d.kind));
}

}  // namespace cdforge
