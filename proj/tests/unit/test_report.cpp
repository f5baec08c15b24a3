#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feedback_lens/errors.hpp"
#include "feedback_lens/report.hpp"

#include <sstream>

using namespace feedback_lens;

namespace {

ProportionTable sample_table() {
    std::vector<FeedbackLabel> ls = {FeedbackLabel::of(FeedbackClass::positive, MatchSite::full_short),
                                     FeedbackLabel::of(FeedbackClass::positive, MatchSite::initial),
                                     FeedbackLabel::of(FeedbackClass::neutral, MatchSite::full_short),
                                     FeedbackLabel::other()};
    return class_proportions(ls, Denominator::all_utterances);
}

}  // namespace

TEST_CASE("format_fixed2") {
    CHECK(format_fixed2(10.794) == "10.79");
    CHECK(format_fixed2(-7.07) == "-7.07");
    CHECK(format_fixed2(-0.001) == "0.00");
    CHECK(format_fixed2(0) == "0.00");
}

TEST_CASE("proportion stats round-trip") {
    const ProportionTable t = sample_table();
    const std::string text = proportions_to_json(t, "demo");
    CHECK(stats_kind(text) == "feedback_proportions");
    const ProportionTable back = proportions_from_json(text);
    CHECK(back.total == t.total);
    CHECK(back.denominator == t.denominator);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(back.rows[i].label == t.rows[i].label);
        CHECK(back.rows[i].count == t.rows[i].count);
        CHECK(back.rows[i].proportion == t.rows[i].proportion);
    }
    CHECK_THROWS_AS(lengths_from_json(text), ValidationError);
}

TEST_CASE("group stats and length stats round-trip") {
    const GroupProportions g = group_proportions(std::vector<DAGroup>{DAGroup::backchannel, DAGroup::other});
    const GroupProportions gb = group_proportions_from_json(group_proportions_to_json(g, "x"));
    CHECK(gb.total == 2);
    CHECK(gb.percent(DAGroup::backchannel) == 50.0);
    CHECK(gb.rows[3].group == DAGroup::backchannel);

    LengthHistogram h;
    h.bins[1] = {3, 1};
    h.bins[20] = {0, 2};
    h.empty = 4;
    const LengthHistogram hb = lengths_from_json(lengths_to_json(h, "x"));
    CHECK(hb.bins.size() == 2);
    CHECK(hb.bins.at(1).feedback == 3);
    CHECK(hb.empty == 4);
    CHECK(hb.max_length == 20);
}

TEST_CASE("percent rows accept percent or proportion") {
    const auto rows = read_percent_rows(R"({"rows":[{"label":"a","percent":12.5},{"label":"b","proportion":0.25},
        {"label":"c","percent":1,"proportion":0.9}]})");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].percent == 12.5);
    CHECK(rows[1].percent == 25.0);
    CHECK(rows[2].percent == 1.0);
    CHECK_THROWS_AS(read_percent_rows(R"({"rows":[{"label":"a"}]})"), ValidationError);
    CHECK_THROWS_AS(read_percent_rows(R"({"nope":[]})"), ValidationError);
    CHECK_THROWS_AS(read_percent_rows("not json"), ValidationError);
}

TEST_CASE("compare percentages") {
    const std::vector<PercentRow> a = {{"backchannel", 10.79}, {"assessment", 5.0}};
    const std::vector<PercentRow> b = {{"assessment", 6.5}, {"backchannel", 3.72}, {"other", 1.0}};
    const auto d = compare_percentages(a, b);
    REQUIRE(d.size() == 3);
    CHECK(d[0].label == "backchannel");
    CHECK(d[0].delta_pp == doctest::Approx(-7.07));
    CHECK(d[1].delta_pp == doctest::Approx(1.5));
    CHECK(d[2].label == "other");
    CHECK(d[2].a_percent == 0.0);
    std::ostringstream out;
    write_delta_csv(out, d);
    CHECK(out.str() ==
          "label,a_percent,b_percent,delta_pp\nbackchannel,10.79,3.72,-7.07\nassessment,5.00,6.50,1.50\n"
          "other,0.00,1.00,1.00\n");
}

TEST_CASE("CSV writers") {
    std::ostringstream top;
    write_top_items_csv(top, {{"yeah", 7, "positive"}, {"a,b", 2, "neutral"}});
    CHECK(top.str() == "rank,item,count,label\n1,yeah,7,positive\n2,\"a,b\",2,neutral\n");

    LengthHistogram h;
    h.max_length = 3;
    h.bins[1] = {2, 0};
    h.bins[3] = {0, 5};
    h.empty = 1;
    std::ostringstream len;
    write_lengths_csv(len, h);
    CHECK(len.str() == "length,feedback,other\n1,2,0\n3+,0,5\nempty,0,1\n");
}

TEST_CASE("terms CSV round-trip") {
    const TermComparison cmp =
        compare_term_counts({{{"oh", "yeah"}, 3}, {{"x"}, 1}}, 10, {{{"x"}, 2}, {{"what"}, 4}}, 8, 5);
    std::ostringstream out;
    write_terms_csv(out, cmp.table);
    std::istringstream in(out.str());
    const auto back = read_terms_csv(in);
    REQUIRE(back.size() == cmp.table.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].term == cmp.table[i].term);
        CHECK(back[i].count_b == cmp.table[i].count_b);
        CHECK(back[i].fscore_a == doctest::Approx(cmp.table[i].fscore_a).epsilon(1e-6));
    }
    std::istringstream bad("a,b\n");
    CHECK_THROWS_AS(read_terms_csv(bad), ValidationError);
}
