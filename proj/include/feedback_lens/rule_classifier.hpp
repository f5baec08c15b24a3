#pragma once

#include "feedback_lens/corpus_io.hpp"
#include "feedback_lens/cue_lexicon.hpp"
#include "feedback_lens/normalize.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace feedback_lens {

enum class LabelKind { positive, neutral, negative, clarification, extra, other };
enum class MatchSite { full_short, initial, none };

std::string_view to_string(MatchSite site);
std::optional<MatchSite> parse_match_site(std::string_view name);

/// Feedback label of one utterance. `kind == other` iff `site == none`.
/// `extra` names the extras category when `kind == extra`.
struct FeedbackLabel {
    LabelKind kind = LabelKind::other;
    MatchSite site = MatchSite::none;
    std::string extra;

    static FeedbackLabel other() { return {}; }
    static FeedbackLabel of(FeedbackClass c, MatchSite site);

    bool is_feedback() const { return kind != LabelKind::other; }

    /// "positive", ..., "other", or the extras category name.
    std::string name() const;

    friend bool operator==(const FeedbackLabel&, const FeedbackLabel&) = default;
};

/// Parses a label name; names that are not a core class or "other" become extras.
FeedbackLabel parse_label(std::string_view name, MatchSite site);

struct ClassifierOptions {
    /// Allow single-token matches on the first token (INITIAL site).
    bool include_initial = true;
    /// Also try the INITIAL match for 2..limit token utterances without a full match.
    bool initial_in_short = true;
    /// Consult the lexicon's extras categories after the four core classes.
    bool include_extras = false;
    std::size_t short_limit = 3;
    /// Worker threads for classify_corpus; 0 or 1 runs inline.
    std::size_t threads = 1;
};

FeedbackLabel classify_utterance(const TokenSeq& seq, const CueLexicon& lex,
                                 const ClassifierOptions& opts = {});

struct LabeledUtterance {
    std::string id;
    FeedbackLabel label;
};

struct ClassificationSummary {
    std::size_t total = 0;
    std::map<std::string, std::size_t> counts;  // by label name
    std::size_t full_short = 0;
    std::size_t initial = 0;
};

struct LabeledCorpus {
    std::vector<LabeledUtterance> records;
    ClassificationSummary summary;
};

/// Labels every utterance in file order. Throws ValidationError when the
/// corpus and lexicon languages differ.
LabeledCorpus classify_corpus(const Corpus& c, const CueLexicon& lex, const ClassifierOptions& opts = {});

/// Same as classify_corpus but over pre-tokenized utterances.
std::vector<FeedbackLabel> classify_tokens(std::span<const TokenSeq> seqs, const CueLexicon& lex,
                                           const ClassifierOptions& opts = {});

/// Label output line: {"id", "label", "site"}.
std::string serialize_label_record(const LabeledUtterance& rec);
std::vector<LabeledUtterance> parse_label_records(std::istream& in, std::string_view source_name = "labels");

enum class Denominator { all_utterances, feedback_only };

std::string_view to_string(Denominator d);

struct ProportionRow {
    std::string label;
    std::size_t count = 0;
    double proportion = 0.0;
};

/// Rows are always positive, neutral, negative, clarification, then extras
/// categories by name, then other (only under all_utterances).
struct ProportionTable {
    Denominator denominator = Denominator::all_utterances;
    std::size_t total = 0;
    std::vector<ProportionRow> rows;

    const ProportionRow* find(std::string_view label) const;
    double proportion(std::string_view label) const;
};

/// Throws ValidationError on empty input, or when feedback_only has no
/// non-other labels to divide by.
ProportionTable class_proportions(std::span<const FeedbackLabel> labels, Denominator denominator);

}  // namespace feedback_lens
