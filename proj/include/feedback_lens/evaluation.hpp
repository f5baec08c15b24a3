#pragma once

#include "feedback_lens/corpus_io.hpp"
#include "feedback_lens/cue_lexicon.hpp"
#include "feedback_lens/da_pipeline.hpp"
#include "feedback_lens/rule_classifier.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace feedback_lens {

/// Square count matrix; cell(g, p) counts items with gold g predicted p.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> labels);

    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    std::uint64_t cell(std::size_t gold, std::size_t pred) const { return cells_[gold * size() + pred]; }
    std::uint64_t total() const;
    std::uint64_t trace() const;

    /// Throws ValidationError if either label is outside the universe.
    void add(const std::string& gold, const std::string& pred, std::uint64_t n = 1);
    /// Cellwise sum; both matrices must share the same label list.
    void merge(const ConfusionMatrix& other);

    std::optional<std::size_t> index_of(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::uint64_t> cells_;
};

/// Counts gold/pred pairs. The universe defaults to the sorted union of both
/// lists. Throws ValidationError on length mismatch, empty input, or labels
/// missing from an explicit universe.
ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred,
                                 std::optional<std::vector<std::string>> universe = std::nullopt);

struct ClassMetrics {
    std::string label;
    double precision = 0, recall = 0, f1 = 0;
    std::uint64_t support = 0;
};

struct AverageMetrics {
    double precision = 0, recall = 0, f1 = 0;
};

struct MetricsReport {
    std::vector<ClassMetrics> classes;
    double accuracy = 0;
    AverageMetrics macro;
    AverageMetrics weighted;
    std::uint64_t total = 0;

    const ClassMetrics* find(const std::string& label) const;
};

/// Zero-denominator precision, recall and F1 are reported as 0. Macro
/// averages run over every class in the universe; weighted averages use gold
/// support. Throws ValidationError on an empty matrix.
MetricsReport prf_metrics(const ConfusionMatrix& cm);

/// Aligned text table with two-decimal values.
std::string format_metrics_table(const MetricsReport& report, const std::string& first_column = "Label");
/// Full-precision JSON object.
std::string metrics_to_json(const MetricsReport& report, int indent = 2);

struct BinaryCueEvaluation {
    MetricsReport report;
    ConfusionMatrix matrix{{"feedback", "other"}};
    std::size_t evaluated = 0;
    std::size_t skipped_untagged = 0;
};

/// Gold is the binary group of each utterance's SWBD tag; prediction is
/// feedback iff the rule classifier assigns a label other than other.
/// Utterances without a tag are skipped and counted. Throws ValidationError
/// if nothing is left to score or the languages differ.
BinaryCueEvaluation evaluate_binary_cues(const Corpus& c, const CueLexicon& lex,
                                         const SwbdMapping& mapping = SwbdMapping::builtin(),
                                         const ClassifierOptions& opts = {});

}  // namespace feedback_lens
