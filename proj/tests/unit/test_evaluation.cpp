#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feedback_lens/errors.hpp"
#include "feedback_lens/evaluation.hpp"
#include "support.hpp"

#include <json.hpp>

#include <random>

using namespace feedback_lens;

namespace {

using Labels = std::vector<std::string>;

Corpus tagged(const std::vector<std::pair<std::string, std::optional<std::string>>>& rows) {
    std::vector<std::string> texts;
    for (const auto& r : rows) texts.push_back(r.first);
    Corpus c = test_support::make_corpus(texts);
    for (std::size_t i = 0; i < rows.size(); ++i) c.utterances[i].gold_da_tag = rows[i].second;
    return c;
}

}  // namespace

TEST_CASE("confusion matrix example") {
    const Labels gold = {"F", "F", "O", "O"}, pred = {"F", "O", "O", "O"};
    const ConfusionMatrix cm = confusion_matrix(gold, pred);
    CHECK(cm.labels() == Labels{"F", "O"});
    CHECK(cm.cell(0, 0) == 1);
    CHECK(cm.cell(0, 1) == 1);
    CHECK(cm.cell(1, 0) == 0);
    CHECK(cm.cell(1, 1) == 2);
    CHECK(cm.total() == 4);
}

TEST_CASE("identical lists give a diagonal matrix") {
    const Labels l = {"a", "b", "c", "a", "c"};
    const ConfusionMatrix cm = confusion_matrix(l, l);
    for (std::size_t i = 0; i < cm.size(); ++i) {
        for (std::size_t j = 0; j < cm.size(); ++j) {
            if (i != j) CHECK(cm.cell(i, j) == 0);
        }
    }
    CHECK(cm.trace() == 5);
}

TEST_CASE("confusion matrix errors") {
    CHECK_THROWS_AS(confusion_matrix(Labels{}, Labels{}), ValidationError);
    CHECK_THROWS_AS(confusion_matrix(Labels{"a"}, Labels{"a", "b"}), ValidationError);
    CHECK_THROWS_AS(confusion_matrix(Labels{"a"}, Labels{"z"}, Labels{"a"}), ValidationError);
    CHECK_THROWS_AS(ConfusionMatrix(Labels{"a", "a"}), ValidationError);
    ConfusionMatrix a(Labels{"x", "y"}), b(Labels{"y", "x"});
    CHECK_THROWS_AS(a.merge(b), ValidationError);
}

TEST_CASE("merge adds counts") {
    ConfusionMatrix a = confusion_matrix(Labels{"F", "O"}, Labels{"F", "F"}, Labels{"F", "O"});
    const ConfusionMatrix b = confusion_matrix(Labels{"O"}, Labels{"O"}, Labels{"F", "O"});
    a.merge(b);
    CHECK(a.total() == 3);
    CHECK(a.cell(1, 1) == 1);
    CHECK(a.cell(1, 0) == 1);
}

TEST_CASE("metrics example") {
    const MetricsReport r = prf_metrics(confusion_matrix(Labels{"F", "F", "O", "O"}, Labels{"F", "O", "O", "O"}));
    const ClassMetrics* f = r.find("F");
    REQUIRE(f);
    CHECK(f->precision == doctest::Approx(1.0));
    CHECK(f->recall == doctest::Approx(0.5));
    CHECK(f->f1 == doctest::Approx(2.0 / 3));
    CHECK(r.accuracy == doctest::Approx(0.75));
    CHECK(r.find("O")->precision == doctest::Approx(2.0 / 3));
    CHECK(r.find("O")->recall == doctest::Approx(1.0));
}

TEST_CASE("perfect predictions") {
    const Labels l = {"a", "b", "b", "c"};
    const MetricsReport r = prf_metrics(confusion_matrix(l, l));
    for (const auto& c : r.classes) {
        CHECK(c.precision == 1.0);
        CHECK(c.recall == 1.0);
        CHECK(c.f1 == 1.0);
    }
    CHECK(r.accuracy == 1.0);
    CHECK(r.macro.f1 == 1.0);
    CHECK(r.weighted.f1 == 1.0);
}

TEST_CASE("class absent from both lists") {
    const MetricsReport r = prf_metrics(confusion_matrix(Labels{"a", "b"}, Labels{"a", "a"}, Labels{"a", "b", "z"}));
    const ClassMetrics* z = r.find("z");
    REQUIRE(z);
    CHECK(z->precision == 0.0);
    CHECK(z->recall == 0.0);
    CHECK(z->f1 == 0.0);
    CHECK(z->support == 0);
    // Weighted averages ignore it; macro averages include it.
    const double fa = 2 * 0.5 * 1.0 / 1.5;
    CHECK(r.weighted.f1 == doctest::Approx(0.5 * fa));
    CHECK(r.macro.f1 == doctest::Approx(fa / 3));
}

TEST_CASE("metrics agree with a per-item scorer") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 2 + rng() % 4, n = 1 + rng() % 50;
        Labels gold, pred;
        for (std::size_t i = 0; i < n; ++i) {
            gold.push_back(std::string(1, static_cast<char>('a' + rng() % k)));
            pred.push_back(std::string(1, static_cast<char>('a' + rng() % k)));
        }
        const MetricsReport r = prf_metrics(confusion_matrix(gold, pred));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) correct += gold[i] == pred[i];
        CHECK(r.accuracy == static_cast<double>(correct) / static_cast<double>(n));
        for (const auto& c : r.classes) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                tp += gold[i] == c.label && pred[i] == c.label;
                fp += gold[i] != c.label && pred[i] == c.label;
                fn += gold[i] == c.label && pred[i] != c.label;
            }
            const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
            const double rc = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
            CHECK(c.precision == p);
            CHECK(c.recall == rc);
            CHECK(c.f1 == (p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0));
            CHECK(c.support == tp + fn);
        }
    }
}

TEST_CASE("metrics table and JSON") {
    const MetricsReport r = prf_metrics(confusion_matrix(Labels{"F", "F", "O", "O"}, Labels{"F", "O", "O", "O"}));
    const std::string table = format_metrics_table(r);
    CHECK(table.find("1.00") != std::string::npos);
    CHECK(table.find("0.50") != std::string::npos);
    CHECK(table.find("0.67") != std::string::npos);
    CHECK(table.find("Macro avg") != std::string::npos);
    CHECK(table.find("Weighted avg") != std::string::npos);
    CHECK(table.find("Accuracy") != std::string::npos);
    CHECK(table.find("0.75") != std::string::npos);
    const auto j = nlohmann::json::parse(metrics_to_json(r));
    CHECK(j["accuracy"].get<double>() == 0.75);
    CHECK(j["classes"][0]["f1"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(j["total"] == 4);
}

TEST_CASE("binary cue evaluation: perfect alignment") {
    const Corpus c = tagged({{"yeah", "b"}, {"uh-huh", "b"}, {"that's great", "ba"}, {"i went home", "sd"},
                             {"did you go", "qy"}, {"we stayed late", "sd"}});
    const BinaryCueEvaluation r = evaluate_binary_cues(c, test_support::en());
    CHECK(r.evaluated == 6);
    CHECK(r.report.find("feedback")->f1 == 1.0);
    CHECK(r.report.accuracy == 1.0);
}

TEST_CASE("binary cue evaluation: one false positive") {
    // "well" at the start of a statement triggers an initial match.
    const Corpus c = tagged({{"yeah", "b"},
                             {"uh-huh", "b"},
                             {"okay", "b"},
                             {"well i think we should go", "sd"},
                             {"i went home", "sd"},
                             {"so", std::nullopt},
                             {"", "%"}});
    const BinaryCueEvaluation r = evaluate_binary_cues(c, test_support::en());
    CHECK(r.evaluated == 6);
    CHECK(r.skipped_untagged == 1);
    const ClassMetrics* f = r.report.find("feedback");
    CHECK(f->precision == doctest::Approx(3.0 / 4));
    CHECK(f->recall == doctest::Approx(1.0));
    CHECK(r.report.accuracy == doctest::Approx(5.0 / 6));
    CHECK(r.matrix.cell(1, 0) == 1);
}

TEST_CASE("binary cue evaluation errors") {
    CHECK_THROWS_AS(evaluate_binary_cues(tagged({{"yeah", std::nullopt}}), test_support::en()), ValidationError);
    Corpus de = tagged({{"ja", "b"}});
    de.manifest.language = Language::de;
    CHECK_THROWS_AS(evaluate_binary_cues(de, test_support::en()), ValidationError);
}
