#include "ecoscapes/evaluation.hpp"

#include "ecoscapes/error.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <functional>

using namespace ecoscapes;
using namespace ecoscapes::evaluation;
using testsupport::code_of;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

namespace {

ScoreStore shipped() { return ScoreStore::open(testsupport::data_dir() / "scores" / "evaluation_runs.csv"); }

ScoreRecord rec(std::string loc, System s, Criterion c, int run, int value) {
    return {std::move(loc), s, c, run, value};
}

}  // namespace

TEST(Names, RoundTrip) {
    for (auto s : {System::CC, System::CCEcoScapes, System::EcoScapes}) {
        EXPECT_EQ(parse_system(system_name(s)), s);
    }
    for (auto c : {Criterion::Correctness, Criterion::DepthCoverage, Criterion::Usability, Criterion::Relevancy}) {
        EXPECT_EQ(parse_criterion(criterion_name(c)), c);
    }
    EXPECT_EQ(system_name(System::CCEcoScapes), "CC+EcoScapes");
    EXPECT_FALSE(parse_system("cc").has_value());
    EXPECT_FALSE(parse_criterion("Depth").has_value());
}

TEST(Rubric, CriteriaSets) {
    EXPECT_THAT(rubric(Target::EcoScapesReport).criteria,
                ElementsAre(Criterion::Correctness, Criterion::DepthCoverage));
    EXPECT_THAT(rubric(Target::AdaptationStrategy).criteria,
                ElementsAre(Criterion::Usability, Criterion::Correctness, Criterion::Relevancy));
    EXPECT_EQ(target_of(System::EcoScapes), Target::EcoScapesReport);
    EXPECT_EQ(target_of(System::CC), Target::AdaptationStrategy);
    EXPECT_TRUE(applies(System::EcoScapes, Criterion::DepthCoverage));
    EXPECT_FALSE(applies(System::EcoScapes, Criterion::Usability));
    EXPECT_FALSE(applies(System::CCEcoScapes, Criterion::DepthCoverage));
}

TEST(Rubric, LevelDescriptions) {
    EXPECT_EQ(level_description(Target::EcoScapesReport, Criterion::Correctness, 5), "No mistakes");
    for (int v = 0; v <= 5; ++v) {
        EXPECT_FALSE(level_description(Target::AdaptationStrategy, Criterion::Relevancy, v).empty());
    }
    EXPECT_EQ(code_of([] { level_description(Target::EcoScapesReport, Criterion::Correctness, 6); }),
              Errc::OutOfRange);
    EXPECT_EQ(code_of([] { level_description(Target::EcoScapesReport, Criterion::Usability, 3); }),
              Errc::OutOfRange);
}

TEST(RecordScore, ValidatesAndIsIdempotent) {
    ScoreStore store;
    EXPECT_EQ(code_of([&] { record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 1, 6)); }),
              Errc::OutOfRange);
    EXPECT_EQ(code_of([&] { record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 1, -1)); }),
              Errc::OutOfRange);
    EXPECT_EQ(code_of([&] { record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 0, 3)); }),
              Errc::OutOfRange);
    EXPECT_EQ(code_of([&] { record_score(store, rec("", System::CC, Criterion::Usability, 1, 3)); }),
              Errc::OutOfRange);
    EXPECT_EQ(code_of([&] { record_score(store, rec("Roßtal", System::CC, Criterion::DepthCoverage, 1, 3)); }),
              Errc::OutOfRange);
    EXPECT_TRUE(store.empty());

    const auto r = rec("Roßtal", System::CC, Criterion::Usability, 1, 3);
    record_score(store, r);
    record_score(store, r);
    EXPECT_EQ(store.records().size(), 1u);
    EXPECT_EQ(store.records()[0], r);
    EXPECT_EQ(code_of([&] { record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 1, 4)); }),
              Errc::DuplicateKey);
}

TEST(ScoreStore, ValuesOrderedByRun) {
    ScoreStore store;
    for (int run : {3, 1, 2}) record_score(store, rec("A", System::CC, Criterion::Relevancy, run, run + 1));
    EXPECT_THAT(store.values("A", System::CC, Criterion::Relevancy), ElementsAre(2, 3, 4));
    EXPECT_TRUE(store.values("B", System::CC, Criterion::Relevancy).empty());
}

TEST(ScoreStore, CsvRoundTripAndQuoting) {
    ScoreStore store;
    record_score(store, rec("Roßtal", System::CCEcoScapes, Criterion::Correctness, 1, 5));
    record_score(store, rec("Frankfurt, am Main", System::CC, Criterion::Usability, 2, 0));
    record_score(store, rec("say \"hi\"", System::EcoScapes, Criterion::DepthCoverage, 1, 2));
    const auto csv = store.to_csv();
    EXPECT_TRUE(csv.starts_with(std::string(kCsvHeader) + "\n"));
    EXPECT_THAT(csv, HasSubstr("\"Frankfurt, am Main\""));
    EXPECT_EQ(ScoreStore::parse(csv).records(), store.records());
}

TEST(ScoreStore, ParseErrors) {
    EXPECT_EQ(code_of([] { ScoreStore::parse("loc,sys\n"); }), Errc::InvalidArgument);
    const std::string h = std::string(kCsvHeader) + "\n";
    EXPECT_EQ(code_of([&] { ScoreStore::parse(h + "A,Nope,Correctness,1,3\n"); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { ScoreStore::parse(h + "A,CC,Usability,x,3\n"); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { ScoreStore::parse(h + "A,CC,Usability,1\n"); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { ScoreStore::parse(h + "A,CC,Usability,1,9\n"); }), Errc::OutOfRange);
    EXPECT_EQ(code_of([&] { ScoreStore::parse(h + "A,CC,Usability,1,3\nA,CC,Usability,1,4\n"); }),
              Errc::DuplicateKey);
    EXPECT_TRUE(ScoreStore::parse(h).empty());
}

TEST(ScoreStore, BoundFileAppendsAndReloads) {
    testsupport::TempDir tmp;
    const auto path = tmp.path() / "scores.csv";
    {
        auto store = ScoreStore::open(path);
        EXPECT_TRUE(store.empty());
        record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 1, 3));
    }
    {
        auto store = ScoreStore::open(path);
        record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 1, 3));
        record_score(store, rec("Roßtal", System::CC, Criterion::Usability, 2, 3));
    }
    const auto reloaded = ScoreStore::open(path);
    EXPECT_THAT(reloaded.values("Roßtal", System::CC, Criterion::Usability), ElementsAre(3, 3));
    EXPECT_EQ(testsupport::read_text(path), reloaded.to_csv());
}

TEST(ScoreStore, ShippedTablesSaveAndReloadIdentically) {
    testsupport::TempDir tmp;
    const auto store = shipped();
    EXPECT_EQ(store.records().size(), 80u);
    store.save(tmp.path() / "copy.csv");
    EXPECT_EQ(ScoreStore::open(tmp.path() / "copy.csv").records(), store.records());
}

TEST(Summarize, Examples) {
    const std::vector<int> rosstal{4, 5, 4, 5, 5};
    EXPECT_EQ(summarize(rosstal), (FiveNumberSummary{4, 4, 5, 5, 5}));
    const std::vector<int> usability{3, 3, 4, 3, 3};
    EXPECT_EQ(summarize(usability).median, 3);
    const std::vector<int> one{2};
    EXPECT_EQ(summarize(one), (FiveNumberSummary{2, 2, 2, 2, 2}));
    const std::vector<int> four{1, 2, 3, 4};
    EXPECT_EQ(summarize(four), (FiveNumberSummary{1, 1.5, 2.5, 3.5, 4}));
    EXPECT_EQ(code_of([] { summarize(std::vector<int>{}); }), Errc::EmptyInput);
}

TEST(Summarize, ExhaustiveAgainstOracleUpToSeven) {
    std::size_t checked = 0;
    std::vector<int> xs;
    std::function<void()> walk = [&] {
        if (!xs.empty()) {
            const auto got = summarize(xs);
            const auto want = oracle::summarize(xs);
            ASSERT_EQ(got, want);
            ASSERT_LE(got.min, got.q1);
            ASSERT_LE(got.q1, got.median);
            ASSERT_LE(got.median, got.q3);
            ASSERT_LE(got.q3, got.max);
            ++checked;
        }
        if (xs.size() == 7) return;
        for (int v = 0; v <= 5; ++v) {
            xs.push_back(v);
            walk();
            xs.pop_back();
        }
    };
    walk();
    EXPECT_EQ(checked, 335922u);  // 6 + 6^2 + ... + 6^7
}

TEST(CompareSystems, ShippedTables) {
    const auto store = shipped();
    const auto rel = compare_systems(store, "Roßtal", Criterion::Relevancy);
    ASSERT_EQ(rel.size(), 2u);
    EXPECT_EQ(rel[0].system, System::CC);
    EXPECT_EQ(rel[0].summary.median, 3);
    EXPECT_EQ(rel[1].system, System::CCEcoScapes);
    EXPECT_EQ(rel[1].summary.median, 5);
    EXPECT_EQ(rel[1].count, 5u);
    EXPECT_EQ(compare_systems(store, "Erlangen", Criterion::Correctness, std::vector{System::CC})[0].summary.median,
              5);
    EXPECT_EQ(compare_systems(store, "Erlangen", Criterion::Correctness).size(), 3u);
}

TEST(CompareSystems, EveryShippedGroupMatchesOracle) {
    const auto store = shipped();
    std::size_t groups = 0;
    for (const char* loc : {"Roßtal", "Erlangen"}) {
        for (auto c : {Criterion::Correctness, Criterion::DepthCoverage, Criterion::Usability, Criterion::Relevancy}) {
            for (const auto& row : compare_systems(store, loc, c)) {
                const auto values = store.values(loc, row.system, c);
                EXPECT_EQ(values.size(), 5u);
                EXPECT_EQ(row.summary, oracle::summarize(values));
                ++groups;
            }
        }
    }
    EXPECT_EQ(groups, 16u);
}

TEST(CompareSystems, NoData) {
    const auto store = shipped();
    EXPECT_EQ(code_of([&] { compare_systems(store, "Atlantis", Criterion::Correctness); }), Errc::NoData);
    try {
        compare_systems(store, "Roßtal", Criterion::Usability, std::vector{System::EcoScapes});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoData);
        EXPECT_THAT(e.message(), HasSubstr("EcoScapes"));
    }
}

TEST(FormatComparison, AlignedTable) {
    const auto rows = compare_systems(shipped(), "Roßtal", Criterion::Relevancy);
    const auto text = format_comparison("Roßtal", Criterion::Relevancy, rows);
    EXPECT_THAT(text, HasSubstr("Roßtal"));
    EXPECT_THAT(text, HasSubstr("Relevancy"));
    EXPECT_THAT(text, HasSubstr("CC+EcoScapes"));
    EXPECT_THAT(text, HasSubstr("median"));
}
