#include <optional>

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace cdforge;

namespace {

const Family kSmallG25{50, 2, 4, {Block{0, 1, 3, 12}, Block{0, 4, 18, 26}, Block{0, 6, 23, 43}, Block{0, 10, 15, 31}}};

// Two base codewords of weight 4 over Z_13 x {1,2} whose orbits form a cyclic
// code of minimum distance 6, by plain enumeration with 0 in each support.
std::optional<std::vector<SetCodeword>> search_ternary_code_13() {
    const Residue n = 13;
    std::vector<SetCodeword> words;
    for (Residue a = 1; a < n; ++a)
        for (Residue b = a + 1; b < n; ++b)
            for (Residue c = b + 1; c < n; ++c)
                for (int sym = 0; sym < 16; ++sym)
                    words.push_back({{0, 1 + (sym & 1)}, {a, 1 + (sym >> 1 & 1)}, {b, 1 + (sym >> 2 & 1)},
                                     {c, 1 + (sym >> 3 & 1)}});
    auto far = [&](const SetCodeword& x, const SetCodeword& y, bool same) {
        const auto vx = oracle::to_vector(x, n);
        for (Residue s = same ? 1 : 0; s < n; ++s)
            if (oracle::hamming(vx, oracle::to_vector(shifted(y, s, n), n)) < 6) return false;
        return true;
    };
    std::vector<SetCodeword> good;
    for (const SetCodeword& w : words)
        if (far(w, w, true)) good.push_back(w);
    for (std::size_t i = 0; i < good.size(); ++i)
        for (std::size_t j = i + 1; j < good.size(); ++j)
            if (far(good[i], good[j], false)) {
                std::vector<SetCodeword> code;
                for (Residue s = 0; s < n; ++s) {
                    code.push_back(shifted(good[i], s, n));
                    code.push_back(shifted(good[j], s, n));
                }
                return code;
            }
    return std::nullopt;
}

}  // namespace

TEST(GddFromCdf, Z15Type3To5) {
    const PointDesign d = gdd_from_cdf(Family{15, 3, 4, {Block{0, 1, 3, 7}}});
    EXPECT_EQ(d.blocks.size(), 15u);
    EXPECT_EQ(d.groups.size(), 5u);
    for (const auto& g : d.groups) EXPECT_EQ(g.size(), 3u);
    EXPECT_TRUE(verify_gdd(d).valid);
    EXPECT_TRUE(oracle::is_gdd(d));
}

TEST(GddFromCdf, EmptyFamilySingleGroup) {
    const PointDesign d = gdd_from_cdf(Family{12, 12, 4, {}});
    EXPECT_TRUE(d.blocks.empty());
    ASSERT_EQ(d.groups.size(), 1u);
    EXPECT_EQ(d.groups[0].size(), 12u);
    EXPECT_TRUE(verify_gdd(d).valid);
}

TEST(GddFromCdf, SmallGFamilyType2To25) {
    const PointDesign d = gdd_from_cdf(kSmallG25);
    EXPECT_EQ(d.blocks.size(), 200u);
    EXPECT_EQ(d.groups.size(), 25u);
    EXPECT_TRUE(oracle::is_gdd(d));
    EXPECT_TRUE(oracle::shift_invariant(d));
}

TEST(GddFromCdf, InvalidFamilyThrows) {
    EXPECT_THROW(gdd_from_cdf(Family{13, 1, 4, {Block{0, 1, 2, 4}}}), InvalidArgument);
}

TEST(Steiner1Rotational, Sixteen) {
    const PointDesign s = steiner_1rotational(16);
    EXPECT_EQ(s.blocks.size(), 20u);
    EXPECT_TRUE(oracle::is_steiner(s));
    EXPECT_TRUE(oracle::shift_invariant(s));
    std::size_t with_inf = 0;
    for (const auto& b : s.blocks)
        for (const Point& p : b) with_inf += p.is_infinity();
    EXPECT_EQ(with_inf, 5u);
}

TEST(Steiner1Rotational, DegenerateFour) {
    const PointDesign s = steiner_1rotational(4);
    ASSERT_EQ(s.blocks.size(), 1u);
    EXPECT_EQ(s.blocks[0], (std::vector<Point>{Point(0), Point(1), Point(2), Point::infinity()}));
    EXPECT_TRUE(verify_steiner(s).valid);
    EXPECT_FALSE(s.notes.empty());
}

TEST(Steiner1Rotational, Rejections) {
    EXPECT_THROW(steiner_1rotational(28), InvalidArgument);
    EXPECT_THROW(steiner_1rotational(13), InvalidArgument);
}

TEST(Steiner1Rotational, BlockCountAndShift) {
    for (Residue v : {16, 40, 52, 64}) {
        const PointDesign s = steiner_1rotational(v);
        EXPECT_EQ(static_cast<Residue>(s.blocks.size()), v * (v - 1) / 12);
        EXPECT_TRUE(oracle::is_steiner(s)) << v;
        EXPECT_TRUE(oracle::shift_invariant(s)) << v;
    }
}

TEST(BlocksText, InfinityToken) {
    const std::string text = blocks_text(steiner_1rotational(4));
    EXPECT_EQ(text, "0 1 2 inf\n");
}

TEST(OocFromCdf, Examples) {
    const OocReport r25 = ooc_from_cdf(kSmallG25);
    EXPECT_EQ(r25.code.codewords.size(), 4u);
    EXPECT_TRUE(r25.j_optimal);
    EXPECT_TRUE(oracle::is_ooc(r25.code.codewords, 50));

    const OocReport r13 = ooc_from_cdf(Family{13, 1, 4, {Block{0, 1, 3, 9}}});
    EXPECT_TRUE(r13.j_optimal);

    const OocReport r84 = ooc_from_cdf(*catalog_lookup(7, 12));
    EXPECT_EQ(r84.code.codewords.size(), 6u);
    EXPECT_EQ(johnson_bound(84, 4), 6u);
    EXPECT_TRUE(r84.j_optimal);
}

TEST(OocFromCdf, InvalidFamilyThrows) {
    EXPECT_THROW(ooc_from_cdf(Family{13, 1, 4, {Block{0, 1, 2, 4}}}), InvalidArgument);
}

TEST(OocFromCdf, JOptimalityIdentity) {
    for (Residue h : {1, 2, 3, 4, 6})
        for (Residue v = h; v <= 10000; v += 12) EXPECT_EQ((v - h) / 12, (v - 1) / 12) << v << "," << h;
}

TEST(TernaryCodeCheck, EmptyCodeIsSuboptimal) {
    const CodeReport r = ternary_code_check(CwCode{7, 6, 4, 3, {}});
    EXPECT_TRUE(r.certificate.valid);
    EXPECT_EQ(r.size, 0u);
    EXPECT_EQ(r.bound, 7u);
    EXPECT_EQ(r.verdict, CodeVerdict::suboptimal);
}

TEST(TernaryCodeCheck, ShiftClosureViolated) {
    const CodeReport r = ternary_code_check(CwCode{13, 6, 4, 3, {SetCodeword{{0, 1}, {1, 1}, {3, 2}, {9, 1}}}});
    EXPECT_EQ(r.verdict, CodeVerdict::invalid);
}

TEST(TernaryCodeCheck, SearchedCodeAtThirteenIsOptimal) {
    const auto code = search_ternary_code_13();
    ASSERT_TRUE(code);
    EXPECT_EQ(code->size(), 26u);
    for (std::size_t i = 0; i < code->size(); ++i)
        for (std::size_t j = i + 1; j < code->size(); ++j) {
            const std::size_t d = code_distance((*code)[i], (*code)[j], 4);
            ASSERT_EQ(d, oracle::hamming(oracle::to_vector((*code)[i], 13), oracle::to_vector((*code)[j], 13)));
            ASSERT_GE(d, 6u);
        }
    const CodeReport r = ternary_code_check(CwCode{13, 6, 4, 3, *code});
    EXPECT_TRUE(r.certificate.valid);
    EXPECT_EQ(r.size, 26u);
    EXPECT_EQ(r.bound, 26u);
    EXPECT_EQ(r.verdict, CodeVerdict::optimal);
}

TEST(TernaryCodeCheck, WrongParametersThrow) {
    EXPECT_THROW(ternary_code_check(CwCode{13, 5, 4, 3, {}}), InvalidArgument);
}
