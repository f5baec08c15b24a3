#pragma once

#include "feedback_lens/language.hpp"
#include "feedback_lens/normalize.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace feedback_lens {

enum class FeedbackClass { positive, neutral, negative, clarification };

inline constexpr std::array<FeedbackClass, 4> kFeedbackClasses = {
    FeedbackClass::positive, FeedbackClass::neutral, FeedbackClass::negative,
    FeedbackClass::clarification};

std::string_view to_string(FeedbackClass c);
std::optional<FeedbackClass> parse_feedback_class(std::string_view name);

using Cue = std::vector<std::string>;

inline constexpr std::size_t kMaxCueTokens = 5;

/// Order in which classes win when a cue is listed under several of them.
using ClassPrecedence = std::array<FeedbackClass, 4>;

inline constexpr ClassPrecedence kDefaultPrecedence = {
    FeedbackClass::negative, FeedbackClass::clarification, FeedbackClass::positive,
    FeedbackClass::neutral};

/// Per-language feedback cue lists. Immutable once built.
class CueLexicon {
public:
    CueLexicon(Language language, std::array<std::set<Cue>, 4> classes,
               std::map<std::string, std::set<Cue>> extras,
               ClassPrecedence precedence = kDefaultPrecedence);

    Language language() const { return language_; }
    const std::set<Cue>& cues(FeedbackClass c) const { return classes_[static_cast<std::size_t>(c)]; }
    const std::map<std::string, std::set<Cue>>& extras() const { return extras_; }
    const ClassPrecedence& precedence() const { return precedence_; }

    /// Cues listed under more than one class, in sorted order.
    std::vector<Cue> cross_class_duplicates() const;

    /// Every class whose list contains exactly `tokens`, in enum order.
    std::vector<FeedbackClass> classes_of(const std::vector<std::string>& tokens) const;

    /// Exact full-sequence match; ties between classes resolved by precedence.
    std::optional<FeedbackClass> lookup(const std::vector<std::string>& tokens) const;

    /// First extras category (by name) containing exactly `tokens`.
    std::optional<std::string> lookup_extra(const std::vector<std::string>& tokens) const;

    CueLexicon with_precedence(ClassPrecedence precedence) const;

private:
    static std::string key(const std::vector<std::string>& tokens);

    Language language_;
    std::array<std::set<Cue>, 4> classes_;
    std::map<std::string, std::set<Cue>> extras_;
    ClassPrecedence precedence_;
    std::unordered_map<std::string, unsigned> class_mask_;
    std::unordered_map<std::string, std::string> extra_index_;
};

/// Counts gathered while loading a lexicon file.
struct LexiconLoadReport {
    std::size_t within_class_duplicates = 0;
    std::vector<Cue> cross_class_duplicates;
};

/// Parses lexicon JSON: {"language", "classes": {positive, neutral, negative,
/// clarification}, "extras": {name: [cue]}}. Each cue string is tokenized with
/// tokenize(). Throws ValidationError on a missing class key, an empty cue,
/// a cue longer than kMaxCueTokens, or an unsupported language.
CueLexicon parse_lexicon(std::string_view json_text, std::string_view source_name = "lexicon",
                         LexiconLoadReport* report = nullptr);
CueLexicon load_lexicon(const std::filesystem::path& path, LexiconLoadReport* report = nullptr);

std::optional<FeedbackClass> lookup_cue(const CueLexicon& lex, const TokenSeq& seq);

/// Throws ValidationError unless `precedence` is a permutation of the four classes.
void validate_precedence(const ClassPrecedence& precedence);

}  // namespace feedback_lens
