#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace cdforge;

TEST(FrameBlocks, EmptyFrameAtTThree) {
    const FrameResult r = frame_blocks(2, 0, 3);
    EXPECT_TRUE(r.blocks.empty());
    EXPECT_EQ(r.residual.order(), 218);
    for (Residue d = 0; d < 218; ++d) EXPECT_EQ(r.residual.count(d), (d == 0 || d == 109) ? 0u : 1u);
}

TEST(FrameBlocks, FirstBlockH2X0T5) {
    const FrameResult r = frame_blocks(2, 0, 5);
    ASSERT_EQ(r.blocks.size(), 12u);
    // {0, 43t + a1 + i, 31t + a2 + 2i, 8t + a3 + 3i} with a = (1,1,2), t = 5, i = 1
    EXPECT_EQ(r.blocks[0], (Block{0, 43 * 5 + 1 + 1, 31 * 5 + 1 + 2, 8 * 5 + 2 + 3}));
    EXPECT_EQ(r.blocks[0], (Block{0, 45, 158, 217}));
}

TEST(FrameBlocks, FourthRowH3X1T5) {
    const FrameResult r = frame_blocks(3, 1, 5);
    ASSERT_EQ(r.blocks.size(), 12u);
    // {0, 35t + d1 + i, 5t + d2 + 2i, d3 + 3i} with d = (7,2,1), t = 5, i = 1
    EXPECT_EQ(r.blocks[3], (Block{0, 35 * 5 + 7 + 1, 5 * 5 + 2 + 2, 1 + 3}));
    EXPECT_EQ(r.blocks[3], (Block{0, 4, 29, 183}));
}

TEST(FrameBlocks, Errors) {
    EXPECT_THROW(frame_blocks(4, 0, 5), InvalidArgument);
    EXPECT_THROW(frame_blocks(2, 6, 5), InvalidArgument);
    EXPECT_THROW(frame_blocks(2, 0, 2), InvalidArgument);
}

TEST(FrameBlocks, ParamsForOrder) {
    const auto p = frame_params_for(362, 2);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->x, 0);
    EXPECT_EQ(p->t, 5);
    EXPECT_FALSE(frame_params_for(362, 4));
    EXPECT_FALSE(frame_params_for(146, 2));
}

TEST(FrameBlocks, EveryRowSmallT) {
    for (int h : {2, 3, 6})
        for (int x = 0; x <= 5; ++x)
            for (Residue t = 3; t <= 12; ++t) {
                const FrameResult r = frame_blocks(h, x, t);
                const Residue v = 72 * t + 12 * x + h;
                ASSERT_EQ(r.blocks.size(), static_cast<std::size_t>(6 * t - 18));
                const auto c = oracle::difference_counts(r.blocks, v);
                for (Residue d = 0; d < v; ++d) {
                    ASSERT_LE(c[d], 1);
                    if (d % (v / h) == 0) { ASSERT_EQ(c[d], 0); }
                    ASSERT_EQ(r.residual.count(d), (d % (v / h) != 0 && c[d] == 0) ? 1u : 0u);
                }
                EXPECT_EQ(r.residual.total(), static_cast<std::uint64_t>(12 * (18 + x)));
                for (const Block& b : r.blocks) EXPECT_TRUE(b.contains(0));
            }
}

TEST(FieldCdf2p, Examples) {
    const Family f7 = field_cdf_2p(7);
    ASSERT_EQ(f7.blocks.size(), 1u);
    EXPECT_EQ(f7.blocks[0], (Block{0, 1, 9, 11}));
    EXPECT_TRUE(oracle::is_cdf(f7));

    const Family f13 = field_cdf_2p(13);
    EXPECT_EQ(f13.blocks.size(), 2u);
    EXPECT_TRUE(verify_cdf(f13).valid);
    EXPECT_TRUE(oracle::is_cdf(f13));

    EXPECT_THROW(field_cdf_2p(5), InvalidArgument);
    EXPECT_THROW(field_cdf_2p(25), InvalidArgument);
}

TEST(FieldCdf3p, Examples) {
    const Family f5 = field_cdf_3p(5);
    ASSERT_EQ(f5.blocks.size(), 1u);
    EXPECT_EQ(f5.blocks[0], (Block{6, 7, 9, 13}));
    EXPECT_TRUE(oracle::is_cdf(f5));

    const Family f13 = field_cdf_3p(13);
    EXPECT_EQ(f13.blocks.size(), 3u);
    EXPECT_TRUE(verify_cdf(f13).valid);
    EXPECT_TRUE(oracle::is_cdf(f13));

    EXPECT_THROW(field_cdf_3p(7), InvalidArgument);
    EXPECT_THROW(field_cdf_3p(21), InvalidArgument);
}

// Relabeling Z_p by a multiplier u permutes the differences of each block but
// keeps the family's difference multiset a CDF with the same support shape.
TEST(FieldCdf, IndependentOfLabeling) {
    for (Residue p : {13, 19, 31, 37}) {
        const Family f = field_cdf_2p(p);
        for (Residue u = 1; u < p; ++u) {
            Family g{f.v, f.h, 4, {}};
            for (const Block& b : f.blocks) {
                std::vector<Residue> e;
                for (Residue x : b) e.push_back(crt(x % 2, 2, mul_mod(x % p, u, p), p));
                g.blocks.push_back(Block(e));
            }
            ASSERT_TRUE(oracle::is_cdf(g)) << p << " " << u;
        }
    }
}

TEST(CatalogLookup, Examples) {
    const auto f25 = catalog_lookup(25, 2);
    ASSERT_TRUE(f25);
    EXPECT_EQ(f25->v, 50);
    EXPECT_EQ(f25->blocks,
              (std::vector<Block>{Block{0, 1, 3, 12}, Block{0, 4, 18, 26}, Block{0, 6, 23, 43}, Block{0, 10, 15, 31}}));

    const auto f84 = catalog_lookup(7, 12);
    ASSERT_TRUE(f84);
    EXPECT_EQ(f84->blocks.size(), 6u);
    EXPECT_EQ(f84->blocks.front(), (Block{0, 1, 3, 9}));

    EXPECT_FALSE(catalog_lookup(11, 2));
}

TEST(CatalogLookup, EveryEntryVerifies) {
    EXPECT_EQ(catalog().size(), 12u);
    for (const auto& [key, entry] : catalog()) {
        EXPECT_EQ(entry.family.g(), key.first);
        EXPECT_EQ(entry.family.h, key.second);
        EXPECT_TRUE(verify_cdf(entry.family).valid);
        EXPECT_TRUE(oracle::is_cdf(entry.family));
    }
}

TEST(CatalogData, DriftIsRejected) {
    const std::string bad = R"({"format_version": 1, "families": [
        {"g": 25, "h": 2, "k": 4, "source": "x",
         "blocks": [[0,1,3,12],[0,4,18,26],[0,6,23,43],[0,10,15,32]]}]})";
    EXPECT_THROW(parse_catalog(bad), Error);
}

TEST(PrimitiveRoot, Examples) {
    EXPECT_EQ(primitive_root(7), 3);
    EXPECT_EQ(primitive_root(5), 2);
    EXPECT_THROW(primitive_root(4), InvalidArgument);
    for (Residue p = 3; p < 500; ++p) {
        if (!is_prime(p)) continue;
        const Residue w = primitive_root(p);
        Residue x = 1, order = 0;
        do {
            x = x * w % p;
            ++order;
        } while (x != 1);
        EXPECT_EQ(order, p - 1) << p;
    }
}
