#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feedback_lens/cue_lexicon.hpp"
#include "feedback_lens/errors.hpp"
#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>

using namespace feedback_lens;
using test_support::lexicon;

namespace {

bool has(const CueLexicon& lex, FeedbackClass c, const Cue& cue) { return lex.cues(c).count(cue) > 0; }

}  // namespace

TEST_CASE("en lexicon contents") {
    const CueLexicon& en = test_support::en();
    CHECK(en.language() == Language::en);
    CHECK(has(en, FeedbackClass::positive, {"yeah"}));
    CHECK(has(en, FeedbackClass::neutral, {"um-hum"}));
    CHECK(has(en, FeedbackClass::negative, {"no", "way"}));
    CHECK(has(en, FeedbackClass::clarification, {"what"}));
    CHECK(has(en, FeedbackClass::positive, {"well", "that's", "great"}));
    CHECK(en.extras().count("politeness"));
    CHECK(en.extras().count("emoji"));
}

TEST_CASE("hu lexicon dual listings") {
    LexiconLoadReport report;
    const CueLexicon hu = load_lexicon(test_support::source_dir() / "data/lexicons/hu.json", &report);
    CHECK(has(hu, FeedbackClass::positive, {"ja"}));
    CHECK(has(hu, FeedbackClass::neutral, {"ja"}));
    CHECK(std::find(report.cross_class_duplicates.begin(), report.cross_class_duplicates.end(), Cue{"ja"}) !=
          report.cross_class_duplicates.end());
    // The bundled list also places "tényleg" under both positive and clarification.
    CHECK(report.cross_class_duplicates.size() == 2);
    CHECK(hu.cross_class_duplicates() == report.cross_class_duplicates);
}

TEST_CASE("every bundled lexicon loads") {
    for (Language lang : kAllLanguages) {
        const CueLexicon& lex = lexicon(lang);
        CHECK(lex.language() == lang);
        for (FeedbackClass c : kFeedbackClasses) {
            CHECK_MESSAGE(!lex.cues(c).empty(), to_string(lang));
            for (const Cue& cue : lex.cues(c)) {
                CHECK(!cue.empty());
                CHECK(cue.size() <= kMaxCueTokens);
            }
        }
    }
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_lexicon(R"({"language":"en","classes":{"positive":["a"],"neutral":["b"],
        "clarification":["c"]}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_lexicon(R"({"language":"sv","classes":{"positive":["a"],"neutral":["b"],
        "negative":["n"],"clarification":["c"]}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_lexicon(R"({"language":"en","classes":{"positive":["..."],"neutral":["b"],
        "negative":["n"],"clarification":["c"]}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_lexicon(R"({"language":"en","classes":{"positive":["a b c d e f"],"neutral":["b"],
        "negative":["n"],"clarification":["c"]}})"),
                    ValidationError);
    CHECK_THROWS_AS(load_lexicon("/nonexistent/lexicon.json"), IoError);
}

TEST_CASE("within-class duplicates are counted") {
    LexiconLoadReport report;
    const CueLexicon lex = parse_lexicon(R"({"language":"en","classes":{"positive":["Yeah","yeah!","ok"],
        "neutral":["mm"],"negative":["no"],"clarification":["what"]}})",
                                         "x", &report);
    CHECK(report.within_class_duplicates == 1);
    CHECK(lex.cues(FeedbackClass::positive).size() == 2);
}

TEST_CASE("lookup examples") {
    CHECK(lookup_cue(test_support::en(), tokenize("oh really", Language::en)) == FeedbackClass::clarification);
    CHECK(lookup_cue(lexicon(Language::hu), tokenize("ja", Language::hu)) == FeedbackClass::positive);
    CHECK(!lookup_cue(test_support::en(), tokenize("telephone", Language::en)));
    CHECK(!lookup_cue(test_support::en(), tokenize("", Language::en)));
}

TEST_CASE("precedence") {
    const CueLexicon& hu = lexicon(Language::hu);
    // Default order: negative, clarification, positive, neutral.
    CHECK(hu.lookup({"tényleg"}) == FeedbackClass::clarification);
    const CueLexicon flipped = hu.with_precedence(
        {FeedbackClass::neutral, FeedbackClass::positive, FeedbackClass::clarification, FeedbackClass::negative});
    CHECK(flipped.lookup({"ja"}) == FeedbackClass::neutral);
    CHECK(flipped.lookup({"tényleg"}) == FeedbackClass::positive);
    CHECK_THROWS_AS(validate_precedence({FeedbackClass::neutral, FeedbackClass::neutral, FeedbackClass::positive,
                                         FeedbackClass::negative}),
                    ValidationError);
    CHECK(hu.classes_of({"ja"}) == std::vector<FeedbackClass>{FeedbackClass::positive, FeedbackClass::neutral});
}

TEST_CASE("extras lookup") {
    const CueLexicon& en = test_support::en();
    CHECK(en.lookup_extra({"thank", "you"}) == "politeness");
    CHECK(en.lookup_extra({"👍"}) == "emoji");
    CHECK(!en.lookup_extra({"yeah"}));
}

TEST_CASE("lookup is independent of file ordering") {
    const CueLexicon& en = test_support::en();
    std::mt19937 rng(5);
    std::array<std::vector<std::string>, 4> lists;
    for (FeedbackClass c : kFeedbackClasses) {
        for (const Cue& cue : en.cues(c)) {
            std::string s;
            for (const auto& t : cue) s += (s.empty() ? "" : " ") + t;
            lists[static_cast<std::size_t>(c)].push_back(s);
        }
    }
    auto build = [&](std::array<std::vector<std::string>, 4> l) {
        for (auto& v : l) std::shuffle(v.begin(), v.end(), rng);
        nlohmann::json j = {{"language", "en"},
                            {"classes",
                             {{"positive", l[0]}, {"neutral", l[1]}, {"negative", l[2]}, {"clarification", l[3]}}}};
        return parse_lexicon(j.dump());
    };
    const CueLexicon a = build(lists);
    const CueLexicon b = build(lists);
    for (FeedbackClass c : kFeedbackClasses) {
        for (const Cue& cue : en.cues(c)) {
            CHECK(a.lookup(cue) == en.lookup(cue));
            CHECK(b.lookup(cue) == en.lookup(cue));
        }
    }
}

TEST_CASE("every listed cue is found in its own class") {
    for (Language lang : kAllLanguages) {
        const CueLexicon& lex = lexicon(lang);
        for (FeedbackClass c : kFeedbackClasses) {
            for (const Cue& cue : lex.cues(c)) {
                const auto classes = lex.classes_of(cue);
                CHECK(std::find(classes.begin(), classes.end(), c) != classes.end());
                CHECK(lex.lookup(cue).has_value());
            }
        }
    }
}
