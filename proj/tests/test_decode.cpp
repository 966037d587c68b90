#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rmsub/channel.hpp"
#include "rmsub/construct.hpp"
#include "rmsub/decode.hpp"

using namespace rmsub;

namespace {

LlrVector random_llr(std::size_t n, std::mt19937_64& rng, double scale = 2.0) {
    std::normal_distribution<double> d(0.0, scale);
    LlrVector l(n);
    for (auto& v : l) v = d(rng);
    return l;
}

GeneratorSpec small_order2_spec() {
    const auto candidates = extra_row_candidates(4, 2);
    return GeneratorSpec{4, 7, std::vector<std::size_t>(candidates.begin(), candidates.begin() + 2)};
}

}  // namespace

TEST(HardDecision, SignsAndTies) {
    const BinVector v = hard_decision({1.5, -0.25, 0.0, -0.0});
    EXPECT_FALSE(v.get(0));
    EXPECT_TRUE(v.get(1));
    EXPECT_FALSE(v.get(2));  // ties resolve to 0
    EXPECT_FALSE(v.get(3));
}

TEST(Fht, HandExample) {
    std::vector<double> v{1, 1, 1, 1};
    fht(v);
    EXPECT_EQ(v, (std::vector<double>{4, 0, 0, 0}));
    std::vector<double> w{1, -1, 1, -1};
    fht(w);
    EXPECT_EQ(w, (std::vector<double>{0, 4, 0, 0}));
}

TEST(Fht, SelfInverseUpToN) {
    std::mt19937_64 rng(2);
    std::vector<double> v = random_llr(16, rng);
    std::vector<double> twice = v;
    fht(twice);
    fht(twice);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(twice[i], 16.0 * v[i], 1e-9);
    std::vector<double> bad(6, 0.0);
    EXPECT_THROW(fht(bad), std::invalid_argument);
}

TEST(FhtMapRm1, MatchesExhaustiveMap) {
    std::mt19937_64 rng(3);
    for (std::size_t m = 2; m <= 4; ++m) {
        const auto cb = enumerate_codebook(rm_generator(m, 1));
        for (int trial = 0; trial < 100; ++trial) {
            const LlrVector l = random_llr(std::size_t(1) << m, rng);
            const BinVector fast = fht_map_rm1(l, m).codeword;
            const BinVector slow = map_decode(l, cb.codebook).codeword;
            const auto s = codeword_scores(l, cb.codebook);
            double best = s[0];
            for (double x : s) best = std::max(best, x);
            double fast_score = 0;
            for (std::size_t j = 0; j < l.size(); ++j)
                fast_score += l[j] * (fast.get(j) ? -1.0 : 1.0);
            EXPECT_NEAR(fast_score, best, 1e-9);
            if (fast != slow) {
                // only permissible on exact score ties
                double slow_score = 0;
                for (std::size_t j = 0; j < l.size(); ++j)
                    slow_score += l[j] * (slow.get(j) ? -1.0 : 1.0);
                EXPECT_NEAR(fast_score, slow_score, 1e-9);
            }
        }
    }
}

TEST(MapDecode, NoiselessRecovery) {
    std::mt19937_64 rng(5);
    const auto cb = enumerate_codebook(rm_generator(3, 2));
    for (int trial = 0; trial < 20; ++trial) {
        const BinVector cw = cb.codebook.row(rng() % cb.codebook.rows());
        LlrVector l(cw.size());
        for (std::size_t j = 0; j < cw.size(); ++j) l[j] = cw.get(j) ? -4.0 : 4.0;
        EXPECT_EQ(map_decode(l, cb.codebook).codeword, cw);
    }
}

TEST(MapDecode, TieBreaksToLowestIndex) {
    const BinMatrix cb = BinMatrix::from_rows({{0, 0}, {1, 1}});
    const DecodeResult res = map_decode({1.0, -1.0}, cb);
    EXPECT_EQ(res.codeword, cb.row(0));
}

TEST(CosetFhtMap, MatchesExhaustiveMapOrder2) {
    const GeneratorSpec spec = small_order2_spec();
    const auto cb = enumerate_codebook(subcode_generator(spec));
    ASSERT_EQ(cb.codebook.rows(), std::size_t(1) << 7);
    const CosetFhtMap fast(spec);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const LlrVector l = random_llr(16, rng);
        const BinVector f = fast.decode(l);
        const BinVector s = map_decode(l, cb.codebook).codeword;
        double fs = 0, ss = 0;
        for (std::size_t j = 0; j < 16; ++j) {
            fs += l[j] * (f.get(j) ? -1.0 : 1.0);
            ss += l[j] * (s.get(j) ? -1.0 : 1.0);
        }
        EXPECT_NEAR(fs, ss, 1e-9);  // identical scores even if a tie picked another word
    }
}

TEST(CosetFhtMap, FullRm62RunsAndIsConsistent) {
    GeneratorSpec spec{6, 22, extra_row_candidates(6, 2)};
    const CosetFhtMap fast(spec);
    std::mt19937_64 rng(11);
    const BinMatrix gen = subcode_generator(spec);
    BinVector msg(22);
    for (std::size_t i = 0; i < 22; ++i) msg.set(i, rng() & 1u);
    const BinVector cw = gf2_matvec(gen, msg);
    LlrVector l(64);
    for (std::size_t j = 0; j < 64; ++j) l[j] = cw.get(j) ? -6.0 : 6.0;
    EXPECT_EQ(fast.decode(l), cw);
}

TEST(CosetFhtMap, RejectsUnsupportedOrders) {
    EXPECT_THROW(CosetFhtMap(GeneratorSpec{4, 1, {}}), std::invalid_argument);  // order 0
    const auto c3 = extra_row_candidates(4, 3);
    EXPECT_THROW(CosetFhtMap(GeneratorSpec{4, 12,
                 std::vector<std::size_t>(c3.begin(), c3.begin() + 1)}),
                 std::invalid_argument);  // order 3
}

TEST(MapDecodeNode, AgreesWithGenericMap) {
    const DecodingPlan plan = build_plan(GeneratorSpec{3, 4, extra_row_candidates(3, 1)});
    ASSERT_TRUE(plan.root.is_bottom);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const LlrVector l = random_llr(8, rng);
        EXPECT_EQ(map_decode_node(l, plan.root),
                  map_decode(l, plan.root.cb.codebook).codeword);
    }
}

TEST(InfoBitLlrs, RepetitionCode) {
    // codebook {00, 11}, U = [[0],[1]]: l_info = s(00) - s(11) = 2(l0 + l1)
    const BinMatrix cb = BinMatrix::from_rows({{0, 0}, {1, 1}});
    const BinMatrix U = BinMatrix::from_rows({{0}, {1}});
    const LlrVector out = info_bit_llrs({1.25, 0.5}, cb, U);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(out[0], 2.0 * (1.25 + 0.5), 1e-12);
}

TEST(SoftMap, SignsMatchHardMapAwayFromTies) {
    const DecodingPlan plan = build_plan(GeneratorSpec{3, 4, extra_row_candidates(3, 1)});
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const LlrVector l = random_llr(8, rng);
        const LlrVector soft = soft_map(l, plan.root);
        const BinVector hard = map_decode_node(l, plan.root);
        const auto s = codeword_scores(l, plan.root.cb.codebook);
        std::vector<double> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const bool tie = sorted[sorted.size() - 1] - sorted[sorted.size() - 2] < 1e-9;
        if (tie) continue;
        for (std::size_t j = 0; j < 8; ++j) {
            if (std::abs(soft[j]) < 1e-9) continue;
            EXPECT_EQ(soft[j] < 0, hard.get(j)) << "coordinate " << j;
        }
    }
}

TEST(SoftMap, SaturatedInputGivesConfidentOutput) {
    const DecodingPlan plan = build_plan(GeneratorSpec{3, 4, extra_row_candidates(3, 1)});
    LlrVector l(8, kSatLlr);  // strongly favors the all-zero codeword
    const LlrVector soft = soft_map(l, plan.root);
    ASSERT_EQ(soft.size(), 8u);
    for (double v : soft) {
        EXPECT_GT(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Aggregation, HardHandExample) {
    // two-coordinate toy: single projection node from RM(1,1) is bottom, so use
    // a full m=2 plan and check one aggregation step by hand instead
    const DecodingPlan plan = build_plan(small_order2_spec());
    const PlanNode& root = plan.root;
    std::mt19937_64 rng(19);
    const LlrVector l = random_llr(16, rng);
    std::vector<BinVector> decisions;
    const NodeProfile full{};
    for (std::size_t q = 0; q < root.num_children(); ++q) {
        const LlrVector lp = project_llr(l, Subspace{4, {q + 1}});
        decisions.push_back(map_decode_node(lp, root.children[q]));
    }
    const LlrVector agg = aggregate_hard(l, decisions, root, full);
    // spot-check coordinate 0 against the definition
    double expect = 0;
    for (std::size_t q = 0; q < root.num_children(); ++q) {
        const std::size_t zq = q + 1;
        const double vote = decisions[q].get(root.child_coset_of[q][0]) ? -1.0 : 1.0;
        expect += vote * l[0 ^ zq];
    }
    expect /= double(root.num_children());
    EXPECT_NEAR(agg[0], expect, 1e-12);
}

TEST(Aggregation, SubsetRestrictsVotes) {
    const DecodingPlan plan = build_plan(small_order2_spec());
    std::mt19937_64 rng(23);
    const LlrVector l = random_llr(16, rng);
    NodeProfile sub;
    sub.mode = PruneMode::subset;
    sub.subset = {0, 4, 9};
    std::vector<LlrVector> soft;
    for (std::size_t q : sub.subset) {
        const LlrVector lp = project_llr(l, Subspace{4, {q + 1}});
        soft.push_back(soft_map(lp, plan.root.children[q]));
    }
    const LlrVector a = aggregate_soft(l, soft, plan.root, sub);
    EXPECT_EQ(a.size(), 16u);
    std::vector<LlrVector> wrong(soft.begin(), soft.begin() + 2);
    EXPECT_THROW(aggregate_soft(l, wrong, plan.root, sub), std::invalid_argument);
}

TEST(Aggregation, WeightedMatchesUniformAtEqualWeights) {
    const DecodingPlan plan = build_plan(small_order2_spec());
    std::mt19937_64 rng(29);
    const LlrVector l = random_llr(16, rng);
    const std::size_t Q = plan.root.num_children();
    std::vector<LlrVector> soft;
    for (std::size_t q = 0; q < Q; ++q)
        soft.push_back(soft_map(project_llr(l, Subspace{4, {q + 1}}), plan.root.children[q]));
    const NodeProfile full{};
    NodeProfile weighted;
    weighted.mode = PruneMode::weighted;
    weighted.weights.assign(Q, 1.0 / double(Q));
    const LlrVector a = aggregate_soft(l, soft, plan.root, full);
    const LlrVector b = aggregate_soft(l, soft, plan.root, weighted);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
}

TEST(Aggregation, LogsumEqualsBoxplusAverage) {
    const DecodingPlan plan = build_plan(small_order2_spec());
    std::mt19937_64 rng(31);
    const LlrVector l = random_llr(16, rng);
    NodeProfile sub;
    sub.mode = PruneMode::subset;
    sub.subset = {2};
    const LlrVector sp = soft_map(project_llr(l, Subspace{4, {3}}), plan.root.children[2]);
    const LlrVector a = aggregate_logsum(l, {sp}, plan.root, sub);
    for (std::size_t z = 0; z < 16; ++z)
        EXPECT_NEAR(a[z], llr_boxplus(sp[plan.root.child_coset_of[2][z]], l[z ^ 3]), 1e-12);
}

TEST(SubRpa, NoiselessRecovery) {
    const GeneratorSpec spec = small_order2_spec();
    const DecodingPlan plan = build_plan(spec);
    const BinMatrix gen = subcode_generator(spec);
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 30; ++trial) {
        BinVector msg(7);
        for (std::size_t i = 0; i < 7; ++i) msg.set(i, rng() & 1u);
        const BinVector cw = gf2_matvec(gen, msg);
        LlrVector l(16);
        for (std::size_t j = 0; j < 16; ++j) l[j] = cw.get(j) ? -5.0 : 5.0;
        const DecodeResult hard = subrpa_decode(l, plan, PruningProfile::full(), 3);
        EXPECT_EQ(hard.codeword, cw);
        EXPECT_GE(hard.iterations_used, 1u);
        EXPECT_LE(hard.iterations_used, 3u);
        const DecodeResult soft = soft_subrpa_decode(l, plan, PruningProfile::full(), 3);
        EXPECT_EQ(soft.codeword, cw);
        for (std::size_t j = 0; j < 16; ++j)
            EXPECT_EQ(soft.final_llr[j] < 0, cw.get(j));
        const DecodeResult ls = soft_subrpa_decode(l, plan, PruningProfile::full(), 3,
                                                   AggregationRule::logsum);
        EXPECT_EQ(ls.codeword, cw);
    }
}

TEST(SubRpa, DepthTwoNoiselessRecovery) {
    const auto candidates = extra_row_candidates(4, 3);
    GeneratorSpec spec{4, 12, std::vector<std::size_t>(candidates.begin(), candidates.begin() + 1)};
    const DecodingPlan plan = build_plan(spec);
    EXPECT_EQ(plan.order, 3u);
    const BinMatrix gen = subcode_generator(spec);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        BinVector msg(12);
        for (std::size_t i = 0; i < 12; ++i) msg.set(i, rng() & 1u);
        const BinVector cw = gf2_matvec(gen, msg);
        LlrVector l(16);
        for (std::size_t j = 0; j < 16; ++j) l[j] = cw.get(j) ? -5.0 : 5.0;
        EXPECT_EQ(subrpa_decode(l, plan, PruningProfile::full(), 3).codeword, cw);
        EXPECT_EQ(soft_subrpa_decode(l, plan, PruningProfile::full(), 3).codeword, cw);
    }
}

TEST(SubRpa, WeightedProfileNeedsSoftDecoder) {
    const DecodingPlan plan = build_plan(small_order2_spec());
    PruningProfile prof;
    NodeProfile np;
    np.mode = PruneMode::weighted;
    np.weights.assign(plan.root.num_children(), 1.0 / double(plan.root.num_children()));
    prof.nodes[{}] = np;
    std::mt19937_64 rng(43);
    const LlrVector l = random_llr(16, rng);
    EXPECT_THROW(subrpa_decode(l, plan, prof, 3), std::invalid_argument);
    EXPECT_THROW(soft_subrpa_decode(l, plan, prof, 3, AggregationRule::logsum),
                 std::invalid_argument);
    EXPECT_NO_THROW(soft_subrpa_decode(l, plan, prof, 3, AggregationRule::soft));
}

TEST(SubRpa, PrunedStillRecoversNoiseless) {
    const DecodingPlan plan = build_plan(small_order2_spec());
    const PruningProfile prof = select_by_rank(plan, 8, RankDirection::min);
    const BinMatrix gen = subcode_generator(plan.spec);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        BinVector msg(7);
        for (std::size_t i = 0; i < 7; ++i) msg.set(i, rng() & 1u);
        const BinVector cw = gf2_matvec(gen, msg);
        LlrVector l(16);
        for (std::size_t j = 0; j < 16; ++j) l[j] = cw.get(j) ? -5.0 : 5.0;
        EXPECT_EQ(soft_subrpa_decode(l, plan, prof, 3).codeword, cw);
    }
}

TEST(Channel, LlrStatistics) {
    std::mt19937_64 rng(53);
    const double sigma = 0.8;
    BinVector zero(1024);
    const LlrVector l = awgn_llr(zero, sigma, rng);
    double mean = 0;
    for (double v : l) mean += v;
    mean /= double(l.size());
    // E[l | bit 0] = 2/sigma^2
    EXPECT_NEAR(mean, 2.0 / (sigma * sigma), 0.35);
}

TEST(Channel, TrialRngIsCounterBased) {
    std::mt19937_64 a = trial_rng(9, 2, 100);
    std::mt19937_64 b = trial_rng(9, 2, 100);
    EXPECT_EQ(a(), b());
    std::mt19937_64 c = trial_rng(9, 2, 101);
    std::mt19937_64 d = trial_rng(9, 3, 100);
    EXPECT_NE(a(), c());
    EXPECT_NE(b(), d());
}

TEST(Channel, ConfigConversions) {
    const ChannelConfig ch = ChannelConfig::awgn_from_ebn0_db(2.0, 64, 14);
    EXPECT_NEAR(ch.ebn0_db(64, 14), 2.0, 1e-12);
    const ChannelConfig s = ChannelConfig::awgn_from_snr_db(-1.5);
    EXPECT_NEAR(s.snr_db(), -1.5, 1e-12);
    EXPECT_THROW(ChannelConfig::bsc(0.75), std::invalid_argument);
}
