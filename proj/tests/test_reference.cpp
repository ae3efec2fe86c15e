#include <gtest/gtest.h>

#include <percept/reference_scores.hpp>

#include <cmath>
#include <set>

using namespace percept;

TEST(ReferenceScoresTest, DataFileMatchesCompiledTable) {
    const auto file = nlohmann::json::parse(read_text_file(PERCEPT_REFERENCE_DATA));
    EXPECT_EQ(file, reference_catalogue_json());
}

TEST(ReferenceScoresTest, KnownValues) {
    const auto swin = reference_scores("Table 3 Swin");
    ASSERT_TRUE(swin.table.has_value());
    EXPECT_EQ(*swin.table, 3);
    EXPECT_DOUBLE_EQ(swin.tasks.at("length").mean, -1.38);

    const auto human = reference_scores("Table 2 Human");
    EXPECT_DOUBLE_EQ(human.tasks.at("point-cloud-average").mean, 4.95);
}

TEST(ReferenceScoresTest, UnknownSourceThrows) {
    EXPECT_THROW(reference_scores("Table 99 Nobody"), ReferenceError);
    EXPECT_THROW(reference_scores(""), ReferenceError);
}

TEST(ReferenceScoresTest, SourcesAreUniqueAndResolvable) {
    const auto sources = reference_sources();
    EXPECT_EQ(std::set<std::string>(sources.begin(), sources.end()).size(), sources.size());
    std::size_t total = 0;
    for (const auto& s : sources) total += reference_scores(s).tasks.size();
    EXPECT_EQ(total, std::size(kReferenceEntries));
}

TEST(ReferenceScoresTest, WeakestPublishedIsTableMaximum) {
    const auto w = weakest_published(3, "length");
    ASSERT_TRUE(w.has_value());
    for (const auto& e : kReferenceEntries)
        if (e.table == 3 && e.task == "length") EXPECT_LE(e.mean, *w);
    EXPECT_FALSE(weakest_published(3, "no-such-task").has_value());
}

TEST(ReferenceScoresTest, LoadFromFileAgreesWithCompiled) {
    for (const auto& s : {"Table 3 Swin", "Table 2 Human"}) {
        const auto a = reference_scores(s);
        const auto b = load_reference_scores(PERCEPT_REFERENCE_DATA, s);
        EXPECT_EQ(a.table, b.table);
        ASSERT_EQ(a.tasks.size(), b.tasks.size());
        for (const auto& [task, v] : a.tasks) {
            EXPECT_EQ(v.mean, b.tasks.at(task).mean);
            EXPECT_EQ(v.std, b.tasks.at(task).std);
        }
    }
    EXPECT_THROW(load_reference_scores(PERCEPT_REFERENCE_DATA, "Table 0 X"), ReferenceError);
}
