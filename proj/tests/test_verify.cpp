#include <gtest/gtest.h>

#include "rmab/verify.hpp"

using namespace rmab;

namespace {

SweepGrid small_grid() {
    SweepGrid g;
    g.p01_values = {0.1, 0.3};
    g.p11_values = {0.7, 0.9};
    g.n_values = {3, 4};
    g.beta_values = {0.2, 1.0};
    g.horizons = {1, 2, 3};
    g.rewards = {RewardSpec{.kind = RewardKind::or_}, RewardSpec{.kind = RewardKind::sum}};
    g.belief_samples_per_cell = 2;
    g.seed = 99;
    g.threads = 1;
    return g;
}

// Unobserved channels evolve with p01 and p11 exchanged, so a higher belief
// now predicts a lower one next slot.
struct SwappedDynamics {
    ChannelModel model;
    double tau(double w) const { return w * model.p01 + (1.0 - w) * model.p11; }
    double after_good() const { return model.p11; }
    double after_bad() const { return model.p01; }
};

}  // namespace

TEST(ExpandGrid, CountsAndOrder) {
    const auto cells = expand_grid(small_grid());
    // 4 (p) * [n=3: k in {1,2}, n=4: k in {1,2,3}] * 2 rewards * 2 beta * 3 T
    EXPECT_EQ(cells.size(), 4u * 5u * 2u * 2u * 3u);
    EXPECT_EQ(cells[0].index, 0u);
    EXPECT_DOUBLE_EQ(cells[0].model.p01, 0.1);
    EXPECT_DOUBLE_EQ(cells[0].model.p11, 0.7);
    EXPECT_EQ(cells[0].horizon, 1);
    EXPECT_EQ(cells[1].horizon, 2);
}

TEST(ExpandGrid, LevelsRewardOnlyAppliesToMatchingK) {
    SweepGrid g = small_grid();
    RewardSpec levels{.kind = RewardKind::levels};
    levels.levels = {0, 1, 3};
    g.rewards = {levels};
    for (const auto& c : expand_grid(g)) EXPECT_EQ(c.k, 2u);
}

TEST(ExpandGrid, RejectsBadCells) {
    SweepGrid g = small_grid();
    g.p11_values = {0.05};
    EXPECT_THROW(expand_grid(g), InputError);
    g = small_grid();
    g.k_values = {3};
    EXPECT_THROW(expand_grid(g), InputError);
    g = small_grid();
    g.beta_values = {1.2};
    EXPECT_THROW(expand_grid(g), InputError);
}

TEST(ExpandGrid, EmptyGridHasNoCells) {
    EXPECT_TRUE(expand_grid(SweepGrid{}).empty());
    const auto r = search_counterexamples(SweepGrid{});
    EXPECT_TRUE(r.cells.empty());
    EXPECT_TRUE(r.sound());
}

TEST(SearchCounterexamples, SmallGridIsSoundAndDeterministic) {
    const auto a = search_counterexamples(small_grid());
    EXPECT_TRUE(a.sound());
    SweepGrid threaded = small_grid();
    threaded.threads = 3;
    const auto b = search_counterexamples(threaded);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].worst_initial, b.cells[i].worst_initial);
        EXPECT_EQ(a.cells[i].optimal_value, b.cells[i].optimal_value);
    }
}

TEST(SearchCounterexamples, OutOfBoxBeliefsProduceFlaggedGaps) {
    SweepGrid g;
    g.p01_values = {0.1};
    g.p11_values = {0.6};
    g.n_values = {4};
    g.k_values = {2};
    g.beta_values = {1.0};
    g.horizons = {3};
    g.rewards = {RewardSpec{.kind = RewardKind::or_}};
    g.belief_samples_per_cell = 64;
    g.sample_outside_box = true;
    g.seed = 5;
    const auto r = search_counterexamples(g);
    ASSERT_FALSE(r.reports.empty());
    for (const auto& rep : r.reports) {
        EXPECT_GT(rep.gap, kGapThreshold);
        EXPECT_TRUE(rep.beta_exceeds_bound);
    }
    EXPECT_TRUE(r.sound());
}

TEST(SearchCounterexamples, CostGuard) {
    SweepGrid g = small_grid();
    g.belief_samples_per_cell = 100000;
    EXPECT_THROW(search_counterexamples(g), CostGuardError);
}

TEST(LemmaSuite, PassesOnAdmittedCells) {
    const auto report = run_lemma_suite(small_grid(), 30);
    EXPECT_TRUE(report.passed());
    for (const char* name : {"L1-symmetry", "L1-full-permutation", "L2-affine", "L3-monotone", "L4-standard",
                             "L8-future-symmetry"}) {
        const auto* p = report.find(name);
        ASSERT_NE(p, nullptr) << name;
        EXPECT_GT(p->checks, 0u) << name;
    }
}

TEST(LemmaSuite, SwappedDynamicsBreakMonotonicity) {
    const auto report = run_lemma_suite<SwappedDynamics>(small_grid(), 30);
    const auto* l3 = report.find("L3-monotone");
    ASSERT_NE(l3, nullptr);
    EXPECT_FALSE(l3->passed());
    ASSERT_TRUE(l3->witness.has_value());
    EXPECT_FALSE(report.passed());
}

TEST(ExchangeSuite, PassesOnAdmittedCells) {
    const auto report = run_exchange_suite(small_grid(), 30);
    EXPECT_TRUE(report.passed());
    for (const char* name : {"L5-unsensed-exchange", "L6-rotation-bound", "L7-boundary-exchange"})
        ASSERT_NE(report.find(name), nullptr) << name;
}

TEST(PropertyResult, RecordsFirstWitnessAndWorstMargin) {
    PropertyResult p("demo");
    p.record(0.5, 1e-9, "a");
    p.record(-1e-10, 1e-9, "b");
    EXPECT_TRUE(p.passed());
    p.record(-0.1, 1e-9, "c");
    p.record(-0.2, 1e-9, "d");
    EXPECT_EQ(p.failures, 2u);
    EXPECT_DOUBLE_EQ(p.worst_margin, -0.2);
    ASSERT_TRUE(p.witness.has_value());
    EXPECT_NE(p.witness->find("c"), std::string::npos);
}
