#pragma once

#include "feedback_lens/language.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace feedback_lens {

/// One dialogue turn or segment.
struct Utterance {
    std::string id;
    std::string dialogue_id;
    std::uint64_t index = 0;
    std::optional<std::string> speaker;
    std::string text;
    std::optional<std::string> gold_da_tag;
    std::map<std::string, std::string> meta;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

enum class CorpusSource { spontaneous, subtitle, synthetic };
enum class Audience { hearing_impaired, foreign };

std::string_view to_string(CorpusSource source);
std::string_view to_string(Audience audience);

struct CorpusManifest {
    std::string name;
    Language language = Language::en;
    CorpusSource source = CorpusSource::spontaneous;
    std::optional<std::string> genre;
    std::optional<Audience> audience;
    std::optional<int> year;

    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

struct Corpus {
    CorpusManifest manifest;
    std::vector<Utterance> utterances;
};

// --- parsing and serialization -------------------------------------------

/// Reads a JSONL corpus and its JSON manifest. Throws IoError if either file
/// cannot be read and ValidationError (with file and line context) on schema
/// or invariant violations: malformed JSON, duplicate ids, non-increasing
/// index within a dialogue, unsupported language, audience on a non-subtitle
/// corpus.
Corpus parse_corpus(const std::filesystem::path& corpus_path,
                    const std::filesystem::path& manifest_path);

CorpusManifest parse_manifest(std::string_view json_text, std::string_view source_name = "manifest");
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Parses JSONL utterances from a stream. `source_name` prefixes error messages.
std::vector<Utterance> parse_utterances(std::istream& in, std::string_view source_name = "corpus");

/// Canonical form: one compact JSON object per line, keys sorted, LF endings.
std::string serialize_utterance(const Utterance& u);
std::string serialize_manifest(const CorpusManifest& m);
void write_utterances(std::ostream& out, const std::vector<Utterance>& utterances);

// --- markup --------------------------------------------------------------

struct BracketPair {
    std::string open;
    std::string close;
};

/// Markup rules applied by strip_markup. Bracket pairs in `remove` are deleted
/// together with their content; pairs in `unwrap` lose only the delimiters.
/// Whitespace-separated tokens fully matching one of `remove_tokens` are deleted.
struct MarkupRuleSet {
    std::vector<BracketPair> remove;
    std::vector<BracketPair> unwrap;
    std::vector<std::regex> remove_tokens;

    /// `((...))` deleted, `<...>` unwrapped, ASCII smileys deleted.
    static MarkupRuleSet defaults();
};

struct MarkupWarnings {
    std::size_t unmatched_brackets = 0;
};

/// Applies the markup rules and re-normalizes whitespace. The original text is
/// kept in meta["raw_text"] (an existing raw_text entry is left untouched, so
/// repeated application is a no-op). Unmatched delimiters stay verbatim and
/// are counted in `warnings`.
Utterance strip_markup(const Utterance& u, const MarkupRuleSet& rules,
                       MarkupWarnings* warnings = nullptr);

// --- filtering -----------------------------------------------------------

struct FilterPolicy {
    int min_year = 1990;
    std::size_t min_utterances = 100;
    std::vector<std::string> excluded_genres = default_excluded_genres();
    bool drop_single_character_utterances = true;
    bool drop_empty_utterances = true;
    /// Whole-corpus rules (year, genre, minimum size) only apply to subtitle corpora unless cleared.
    bool corpus_rules_subtitles_only = true;
    /// When set, utterances are stripped before the utterance-level rules run.
    std::optional<MarkupRuleSet> markup;

    static std::vector<std::string> default_excluded_genres();
};

struct FilterReport {
    std::size_t input_utterances = 0;
    std::size_t kept = 0;
    std::size_t removed_single_character = 0;
    std::size_t removed_empty = 0;
    std::size_t unmatched_brackets = 0;
    std::optional<std::string> rejection_reason;
};

struct FilterResult {
    Corpus corpus;
    FilterReport report;
};

FilterResult filter_corpus(const Corpus& c, const FilterPolicy& policy);

}  // namespace feedback_lens
