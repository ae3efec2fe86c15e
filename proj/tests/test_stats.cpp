#include <gtest/gtest.h>

#include <percept/rng.hpp>
#include <percept/stats.hpp>

using namespace percept;

namespace {

std::vector<GroupSample> three_groups() {
    return {{"g1", {1.2, 2.3, 1.9, 2.8, 2.1}}, {"g2", {2.9, 3.4, 2.7, 3.9, 3.1}}, {"g3", {2.0, 2.6, 1.7, 2.4, 2.2}}};
}

std::vector<GroupSample> unequal_groups() {
    return {{"h1", {1, 2, 3, 2.5}}, {"h2", {3, 4, 3.5, 4.5, 5, 4.2}}, {"h3", {2, 2.2, 2.9}}};
}

std::vector<GroupSample> transformed(std::vector<GroupSample> g, double scale, double shift) {
    for (auto& s : g)
        for (auto& x : s.observations) x = scale * x + shift;
    return g;
}

}  // namespace

TEST(FTail, KnownValues) {
    EXPECT_EQ(f_tail(0.0, 1, 4), 1.0);
    // scipy.stats.f.sf(1.5, 1, 4)
    EXPECT_NEAR(f_tail(1.5, 1, 4), 0.2878641347266907, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(2, 3, 0.4), 0.5248, 1e-12);
    EXPECT_EQ(f_tail(std::numeric_limits<double>::infinity(), 2, 5), 0.0);
}

TEST(FTail, MonotoneInStatistic) {
    double prev = 1.0;
    for (double f = 0.1; f < 40; f += 0.37) {
        const double p = f_tail(f, 3, 17);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(StudentizedRange, MatchesReferenceTail) {
    struct Case {
        double q;
        int k;
        double df;
        double p;
    };
    // scipy.stats.studentized_range.sf
    const Case cases[] = {
        {3.77, 3, 12, 0.05018236176055357},  {3.5, 3, 12, 0.06999548527518362},
        {2.0, 3, 12, 0.36477201436894036},   {4.0, 4, 20, 0.047068851837372305},
        {3.0, 2, 10, 0.05989032442555742},   {5.0, 5, 8, 0.044805127692616686},
        {1.0, 3, 12, 0.7639818960772521},    {3.0, 10, 30, 0.5277014014933771},
        {3.5, 3, 1000, 0.03594703977928948},
    };
    for (const auto& c : cases) EXPECT_NEAR(studentized_range_tail(c.q, c.k, c.df), c.p, 1e-5) << c.q << " " << c.k;
    EXPECT_EQ(studentized_range_tail(0.0, 3, 12), 1.0);
    EXPECT_NEAR(dist_tail(TailKind::StudentizedRange, 3.77, 3, 12), 0.05018236176055357, 1e-5);
    EXPECT_NEAR(dist_tail(TailKind::F, 1.5, 1, 4), 0.2878641347266907, 1e-12);
    EXPECT_THROW(studentized_range_tail(2.0, 1, 12), ConfigError);
}

TEST(StudentizedRange, MonotoneInStatistic) {
    double prev = 1.0;
    for (double q = 0.25; q < 8; q += 0.25) {
        const double p = studentized_range_tail(q, 4, 15);
        EXPECT_LT(p, prev) << q;
        prev = p;
    }
}

TEST(Anova, HandCase) {
    const auto r = anova_oneway({{"a", {1, 2, 3}}, {"b", {2, 3, 4}}});
    EXPECT_EQ(r.f, 1.5);
    EXPECT_EQ(r.df_between, 1u);
    EXPECT_EQ(r.df_within, 4u);
    EXPECT_EQ(r.ss_between, 1.5);
    EXPECT_EQ(r.ss_within, 4.0);
    EXPECT_NEAR(r.p, 0.2878641347266907, 1e-12);
}

TEST(Anova, IdenticalGroupsGiveZero) {
    const auto r = anova_oneway({{"a", {1, 2, 3}}, {"b", {1, 2, 3}}});
    EXPECT_EQ(r.f, 0.0);
    EXPECT_EQ(r.p, 1.0);
}

TEST(Anova, ReferenceValues) {
    // scipy.stats.f_oneway
    const auto r = anova_oneway(three_groups());
    EXPECT_NEAR(r.f, 8.592700729927005, 1e-9);
    EXPECT_NEAR(r.p, 0.0048316275230258, 1e-9);
    const auto u = anova_oneway(unequal_groups());
    EXPECT_NEAR(u.f, 10.278925235383875, 1e-9);
    EXPECT_NEAR(u.p, 0.0037530641943726503, 1e-9);
    EXPECT_NEAR(u.ms_within, 0.51675, 1e-12);
}

TEST(Anova, Errors) {
    EXPECT_THROW(anova_oneway({{"a", {1, 2, 3}}}), ConfigError);
    EXPECT_THROW(anova_oneway({{"a", {1, 2, 3}}, {"b", {4}}}), InsufficientRunsError);
    EXPECT_THROW(anova_oneway({{"a", {1, 1}}, {"b", {2, 2}}}), DegenerateVarianceError);
    EXPECT_THROW(anova_oneway({{"a", {1, 1}}, {"b", {1, 1}}}), DegenerateVarianceError);
    EXPECT_THROW(tukey_hsd({{"a", {1, 1}}, {"b", {2, 2}}}), DegenerateVarianceError);
}

TEST(Tukey, EqualSizesMatchReference) {
    // scipy.stats.tukey_hsd
    const auto r = tukey_hsd(three_groups());
    ASSERT_EQ(r.entries.size(), 3u);
    const double q[] = {5.334640958919726, 0.5615411535704977, 4.773099805349228};
    const double p[] = {0.0069426225411448605, 0.9173479315415438, 0.014138137096437298};
    const double diff[] = {-1.14, -0.12, 1.02};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(r.entries[i].q, q[i], 1e-9);
        EXPECT_NEAR(r.entries[i].p, p[i], 1e-5);
        EXPECT_NEAR(r.entries[i].difference, diff[i], 1e-12);
    }
    EXPECT_TRUE(r.entry("g1", "g2").significant);
    EXPECT_FALSE(r.entry("g1", "g3").significant);
}

TEST(Tukey, UnequalSizesMatchReference) {
    const auto r = tukey_hsd(unequal_groups());
    const double q[] = {5.81613679223054, 0.6224910477077054, 4.637015019855028};
    const double p[] = {0.005415054862459856, 0.8997453953700556, 0.02069371883763449};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(r.entries[i].q, q[i], 1e-9);
        EXPECT_NEAR(r.entries[i].p, p[i], 1e-5);
    }
    EXPECT_NEAR(r.entries[0].difference, -1.9083333333333333, 1e-12);
}

TEST(Tukey, EntryOrientationAndSymmetry) {
    const auto r = tukey_hsd(three_groups());
    for (const auto& e : r.entries) {
        const auto back = r.entry(e.b, e.a);
        EXPECT_EQ(back.difference, -e.difference);
        EXPECT_EQ(back.q, e.q);
        EXPECT_EQ(back.significant, e.significant);
        EXPECT_GE(e.q, 0.0);
    }
    EXPECT_THROW(r.entry("g1", "nope"), ConfigError);
}

TEST(Tukey, IdenticalGroups) {
    const auto r = tukey_hsd({{"a", {1, 2, 3}}, {"b", {1, 2, 3}}, {"c", {1, 2, 3}}});
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.difference, 0.0);
        EXPECT_EQ(e.q, 0.0);
        EXPECT_EQ(e.p, 1.0);
    }
}

TEST(Invariance, AffineTransformsLeaveStatisticsUnchanged) {
    const auto base = anova_oneway(three_groups());
    const auto tk = tukey_hsd(three_groups());
    for (auto [scale, shift] : {std::pair{1.0, 7.5}, std::pair{3.0, 0.0}, std::pair{0.25, -4.0}}) {
        const auto g = transformed(three_groups(), scale, shift);
        EXPECT_NEAR(anova_oneway(g).f, base.f, 1e-9 * base.f);
        const auto t = tukey_hsd(g);
        for (std::size_t i = 0; i < t.entries.size(); ++i) {
            EXPECT_NEAR(t.entries[i].q, tk.entries[i].q, 1e-9 * tk.entries[i].q);
            EXPECT_NEAR(t.entries[i].difference, scale * tk.entries[i].difference, 1e-9);
        }
    }
}

TEST(Consistency, AnovaAndTukeyAgreeOnRandomInputs) {
    // The implication is not exact, so disagreements are counted and logged.
    Rng rng(11);
    int checked = 0, findings = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<GroupSample> g;
        for (int j = 0; j < 3; ++j) {
            GroupSample s{"g" + std::to_string(j), {}};
            for (int i = 0; i < 5; ++i) s.observations.push_back(rng.uniform01() + 0.2 * j * rng.uniform01());
            g.push_back(s);
        }
        const auto a = anova_oneway(g);
        if (a.p <= 0.05) continue;
        ++checked;
        for (const auto& e : tukey_hsd(g).entries) findings += e.significant;
    }
    if (findings) std::cout << "[finding] " << findings << " Tukey pairs significant with ANOVA p > 0.05\n";
    EXPECT_GT(checked, 0);
    EXPECT_LE(findings, checked);
}
