#pragma once

#include "feedback_lens/language.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedback_lens {

/// Normalized tokens of one utterance.
///
/// Tokens are case-folded, non-empty, and free of whitespace. Leading and
/// trailing punctuation is stripped from each token; the utterance-final
/// `.`, `!`, `?` or `…` (if any) is kept in `terminal_punct`.
struct TokenSeq {
    std::vector<std::string> tokens;
    std::optional<char32_t> terminal_punct;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    /// Tokens joined with single spaces.
    std::string joined() const;

    friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

/// Splits on Unicode whitespace, strips edge punctuation, and applies default
/// case folding. For ja/zh text with no whitespace between CJK characters,
/// CJK runs are split into one token per character while Latin and digit runs
/// stay whole. Symbols and emoji survive as tokens.
TokenSeq tokenize(std::string_view text, Language lang);

/// True iff 1 <= token count <= limit. Throws std::invalid_argument if limit < 1.
bool is_very_short(const TokenSeq& seq, std::size_t limit = 3);

/// Number of Unicode scalar values in a UTF-8 string. Malformed bytes count
/// as one scalar each.
std::size_t codepoint_count(std::string_view text);

/// Copy of `text` with leading and trailing Unicode whitespace removed.
std::string trim_whitespace(std::string_view text);

/// Collapses every run of Unicode whitespace to one ASCII space and trims.
std::string collapse_whitespace(std::string_view text);

}  // namespace feedback_lens
