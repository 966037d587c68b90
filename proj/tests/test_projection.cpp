#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "rmsub/construct.hpp"
#include "rmsub/projection.hpp"

using namespace rmsub;

namespace {

std::set<std::vector<bool>> codebook_set(const BinMatrix& cb) {
    std::set<std::vector<bool>> out;
    for (std::size_t i = 0; i < cb.rows(); ++i) {
        std::vector<bool> r(cb.cols());
        for (std::size_t j = 0; j < cb.cols(); ++j) r[j] = cb.get(i, j);
        out.insert(std::move(r));
    }
    return out;
}

}  // namespace

TEST(Subspaces, OneDimCount) {
    EXPECT_EQ(one_dim_subspaces(2).size(), 3u);
    EXPECT_EQ(one_dim_subspaces(6).size(), 63u);
    const auto subs = one_dim_subspaces(2);
    EXPECT_EQ(subs[0].basis, (std::vector<std::size_t>{1}));
    EXPECT_EQ(subs[1].basis, (std::vector<std::size_t>{2}));
    EXPECT_EQ(subs[2].basis, (std::vector<std::size_t>{3}));
}

TEST(Subspaces, CosetMapPartition) {
    for (const auto& B : one_dim_subspaces(2)) {
        const CosetMap cm = CosetMap::build(B);
        EXPECT_EQ(cm.n_cosets, 2u);
        for (const auto& mem : cm.members) EXPECT_EQ(mem.size(), 2u);
        std::set<std::size_t> all;
        for (const auto& mem : cm.members) all.insert(mem.begin(), mem.end());
        EXPECT_EQ(all.size(), 4u);
    }
}

TEST(Subspaces, RejectsDependentBasis) {
    Subspace bad{3, {1, 1}};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(ProjectHard, HandExample) {
    // y=(0,1,1,0), B=span{01}: cosets {00,01},{10,11} -> (1,1)
    const BinVector y = BinVector::from_bits({0, 1, 1, 0});
    const BinVector p = project_hard(y, Subspace{2, {1}});
    EXPECT_EQ(p, BinVector::from_bits({1, 1}));
}

TEST(ProjectHard, ZeroMapsToZero) {
    EXPECT_EQ(project_hard(BinVector(8), Subspace{3, {5}}), BinVector(4));
}

TEST(ProjectHard, Rm32ProjectsIntoRm21) {
    const auto rm21 = codebook_set(enumerate_codebook(rm_generator(2, 1)).codebook);
    const auto cb = enumerate_codebook(rm_generator(3, 2));
    for (const auto& B : one_dim_subspaces(3)) {
        for (std::size_t i = 0; i < cb.codebook.rows(); ++i) {
            const BinVector p = project_hard(cb.codebook.row(i), B);
            std::vector<bool> key(p.size());
            for (std::size_t j = 0; j < p.size(); ++j) key[j] = p.get(j);
            EXPECT_TRUE(rm21.count(key));
        }
    }
}

TEST(ProjectLlr, UninformativePartner) {
    const LlrVector l{0.0, 5.5, 0.0, -3.0};
    const LlrVector p = project_llr(l, Subspace{2, {1}});
    EXPECT_NEAR(p[0], 0.0, 1e-12);
    EXPECT_NEAR(p[1], 0.0, 1e-12);
}

TEST(ProjectLlr, EqualPairClosedForm) {
    // coset LLRs (2,2): ln(e^4+1) - ln(2 e^2) = 1.3250...
    const LlrVector l{2.0, 2.0};
    const LlrVector p = project_llr(l, Subspace{1, {1}});
    EXPECT_NEAR(p[0], std::log(std::exp(4.0) + 1.0) - std::log(2.0 * std::exp(2.0)), 1e-9);
    EXPECT_NEAR(p[0], 1.3250, 1e-4);
}

TEST(ProjectLlr, SaturatingPartner) {
    const double a = 1.7;
    const LlrVector l{a, 30.0};
    EXPECT_NEAR(project_llr(l, Subspace{1, {1}})[0], a, 1e-6);
}

TEST(ProjectLlr, RejectsNonFinite) {
    const LlrVector l{1.0, std::numeric_limits<double>::infinity()};
    EXPECT_THROW(project_llr(l, Subspace{1, {1}}), std::invalid_argument);
}

TEST(ProjectLlr, SignRule) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> d(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = d(rng), b = d(rng);
        const LlrVector p = project_llr({a, b}, Subspace{1, {1}});
        if (a != 0 && b != 0)
            EXPECT_EQ(p[0] > 0, (a > 0) == (b > 0));
    }
}

TEST(ProjectLlr, HardLimitMatchesProjectHard) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        BinVector y(8);
        LlrVector l(8);
        for (std::size_t j = 0; j < 8; ++j) {
            y.set(j, rng() & 1u);
            l[j] = y.get(j) ? -25.0 : 25.0;  // l > 0 <-> bit 0
        }
        for (const auto& B : one_dim_subspaces(3)) {
            const BinVector ph = project_hard(y, B);
            const LlrVector pl = project_llr(l, B);
            for (std::size_t t = 0; t < ph.size(); ++t)
                EXPECT_EQ(pl[t] < 0, ph.get(t));
        }
    }
}

TEST(ProjectGenerator, SingleCosetMerge) {
    const BinMatrix gen = BinMatrix::from_rows({{1, 0}, {0, 1}});
    const BinMatrix p = project_generator(gen, Subspace{1, {1}});
    ASSERT_EQ(p.cols(), 1u);
    EXPECT_TRUE(p.get(0, 0));
    EXPECT_TRUE(p.get(1, 0));
}

TEST(ProjectGenerator, RmProjectsToLowerRm) {
    // row space of the projected RM(m,r) generator equals the RM(m-1,r-1) codebook
    for (std::size_t m = 2; m <= 4; ++m) {
        for (std::size_t r = 1; r < m; ++r) {
            const auto target = codebook_set(enumerate_codebook(rm_generator(m - 1, r - 1)).codebook);
            for (const auto& B : one_dim_subspaces(m)) {
                const BinMatrix proj = project_generator(rm_generator(m, r), B);
                EXPECT_EQ(codebook_set(enumerate_codebook(proj).codebook), target);
            }
        }
    }
}

TEST(ProjectGenerator, EncodeProjectCommute) {
    std::mt19937_64 rng(31);
    const BinMatrix gen = rm_generator(4, 2);
    for (const auto& B : one_dim_subspaces(4)) {
        const BinMatrix pg = project_generator(gen, B);
        for (int trial = 0; trial < 5; ++trial) {
            BinVector msg(gen.rows());
            for (std::size_t i = 0; i < msg.size(); ++i) msg.set(i, rng() & 1u);
            EXPECT_EQ(project_hard(gf2_matvec(gen, msg), B), gf2_matvec(pg, msg));
        }
    }
}

TEST(Plan, OrderOneIsSingleBottomNode) {
    GeneratorSpec spec{3, 4, extra_row_candidates(3, 1)};  // full RM(3,1)
    const DecodingPlan plan = build_plan(spec);
    EXPECT_TRUE(plan.root.is_bottom);
    EXPECT_EQ(count_bottom_nodes(plan.root), 1u);
    EXPECT_EQ(plan.root.rank, 4u);
}

TEST(Plan, Spec64_14Has63BottomNodes) {
    const auto candidates = extra_row_candidates(6, 2);
    GeneratorSpec spec{6, 14, std::vector<std::size_t>(candidates.begin(), candidates.begin() + 7)};
    const DecodingPlan plan = build_plan(spec);
    EXPECT_EQ(plan.order, 2u);
    EXPECT_EQ(count_bottom_nodes(plan.root), 63u);
    for (const auto& child : plan.root.children) {
        EXPECT_TRUE(child.is_bottom);
        EXPECT_LE(child.rank, 6u);  // m - r + 2
    }
}

TEST(Plan, DepthTwoCounts) {
    // subcode of RM(5,3), k=20: levels 31 then 15, T = 465
    const auto candidates = extra_row_candidates(5, 3);
    GeneratorSpec spec{5, 20, std::vector<std::size_t>(candidates.begin(), candidates.begin() + 4)};
    const DecodingPlan plan = build_plan(spec);
    EXPECT_EQ(plan.order, 3u);
    EXPECT_EQ(plan.root.children.size(), 31u);
    EXPECT_EQ(plan.root.children[0].children.size(), 15u);
    EXPECT_EQ(count_bottom_nodes(plan.root), 465u);
}

TEST(Plan, SummaryJson) {
    GeneratorSpec spec{3, 4, extra_row_candidates(3, 1)};
    const nlohmann::json j = plan_summary(build_plan(spec));
    EXPECT_EQ(j.at("bottom_nodes"), 1);
    EXPECT_EQ(j.at("order"), 1);
}

TEST(ProjectionContainment, SubcodeProjectionsLandInLowerRm) {
    // every projected codebook of a subcode of RM(4,2) sits inside RM(3,1),
    // and contains the projection of the RM(4,1) base
    std::mt19937_64 rng(41);
    const auto rm31 = codebook_set(enumerate_codebook(rm_generator(3, 1)).codebook);
    const auto candidates = extra_row_candidates(4, 2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> pool = candidates;
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t extra = 1 + rng() % 5;
        std::vector<std::size_t> pick(pool.begin(), pool.begin() + std::ptrdiff_t(extra));
        std::sort(pick.begin(), pick.end());
        GeneratorSpec spec{4, 5 + extra, pick};
        const BinMatrix gen = subcode_generator(spec);
        for (const auto& B : one_dim_subspaces(4)) {
            const auto proj = codebook_set(
                enumerate_codebook(project_generator(gen, B)).codebook);
            for (const auto& cw : proj) EXPECT_TRUE(rm31.count(cw));
            const auto base_proj = codebook_set(
                enumerate_codebook(project_generator(rm_generator(4, 1), B)).codebook);
            for (const auto& cw : base_proj) EXPECT_TRUE(proj.count(cw));
        }
    }
}

TEST(ProjectionContainment, TwoDimProjection) {
    // s=2 projections of RM(4,2) subcodes land in RM(2,0) ... RM(2,1) range
    const auto rm20 = codebook_set(enumerate_codebook(rm_generator(2, 0)).codebook);
    const BinMatrix gen = rm_generator(4, 2);
    const Subspace B{4, {1, 2}};
    const auto proj = codebook_set(enumerate_codebook(project_generator(gen, B)).codebook);
    for (const auto& cw : rm20) EXPECT_TRUE(proj.count(cw));
    EXPECT_EQ(project_generator(gen, B).cols(), 4u);
}
