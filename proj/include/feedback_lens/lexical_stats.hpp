#pragma once

#include "feedback_lens/corpus_io.hpp"
#include "feedback_lens/normalize.hpp"
#include "feedback_lens/rule_classifier.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace feedback_lens {

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::uint64_t>;

enum class NgramScope { very_short_only, all };

/// Multiset union; commutative and associative.
void merge_counts(NgramCounts& into, const NgramCounts& from);

/// Counts every 1..n_max-gram. With very_short_only, only utterances of at
/// most `short_limit` tokens contribute. Throws std::invalid_argument if n_max < 1.
NgramCounts extract_ngrams(std::span<const TokenSeq> seqs, std::size_t n_max = 3,
                           NgramScope scope = NgramScope::very_short_only, std::size_t short_limit = 3);
NgramCounts extract_ngrams(const Corpus& c, std::size_t n_max = 3,
                           NgramScope scope = NgramScope::very_short_only, std::size_t short_limit = 3);

/// Harmonic mean of term precision and term frequency; 0 when both are 0.
/// Throws std::invalid_argument for inputs outside [0, 1].
double scaled_fscore(double precision, double frequency);

struct TermStats {
    Ngram term;
    std::uint64_t count_a = 0;
    std::uint64_t count_b = 0;
    double precision_a = 0, frequency_a = 0, fscore_a = 0;
    double precision_b = 0, frequency_b = 0, fscore_b = 0;
};

struct TermComparisonOptions {
    std::size_t n_max = 1;
    std::size_t top_k = 20;
    NgramScope scope = NgramScope::very_short_only;
    std::size_t short_limit = 3;
};

struct TermComparison {
    std::uint64_t tokens_a = 0;
    std::uint64_t tokens_b = 0;
    std::vector<TermStats> table;  // every term of the union, sorted by term
    std::vector<TermStats> top_a;  // by fscore_a descending, ties by term
    std::vector<TermStats> top_b;
};

/// Term precision is count in one corpus over count in both; term frequency
/// is count over the number of tokens in scope for that corpus.
TermComparison compare_term_counts(const NgramCounts& a, std::uint64_t tokens_a, const NgramCounts& b,
                                   std::uint64_t tokens_b, std::size_t top_k);

/// Throws ValidationError on a language mismatch or when either side has no
/// tokens in scope.
TermComparison compare_corpora_terms(const Corpus& a, const Corpus& b, const TermComparisonOptions& opts = {});

/// CSV with header term,count_a,count_b,precision_a,frequency_a,fscore_a,precision_b,frequency_b,fscore_b.
void write_terms_csv(std::ostream& out, const std::vector<TermStats>& rows);

struct LengthBin {
    std::size_t feedback = 0;
    std::size_t other = 0;
};

/// Token-length histogram split by feedback vs other. Lengths >= max_length
/// land in the max_length tail bin; empty utterances are only tallied.
struct LengthHistogram {
    std::size_t max_length = 20;
    std::map<std::size_t, LengthBin> bins;
    std::size_t empty = 0;

    std::size_t total() const;
};

/// Throws ValidationError when the label list is not aligned with the utterances.
LengthHistogram length_distribution(std::span<const TokenSeq> seqs, std::span<const FeedbackLabel> labels,
                                    std::size_t max_length = 20);

struct FeedbackItem {
    std::string form;  // normalized tokens joined by spaces
    std::size_t count = 0;
    std::string label;
};

/// Most frequent normalized forms among non-other utterances, ties broken
/// lexicographically. A form seen under several labels reports its most
/// frequent one.
std::vector<FeedbackItem> top_feedback_items(std::span<const TokenSeq> seqs,
                                             std::span<const FeedbackLabel> labels, std::size_t k);

/// Tokenizes every utterance with the corpus language.
std::vector<TokenSeq> tokenize_corpus(const Corpus& c);

}  // namespace feedback_lens
