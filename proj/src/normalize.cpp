#include "feedback_lens/normalize.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace feedback_lens {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        out.push_back(c < 0 ? kReplacement : static_cast<char32_t>(c));
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(cp));
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

bool is_punct(char32_t cp) { return u_ispunct(static_cast<UChar32>(cp)); }

bool is_cjk(char32_t cp) {
    // Prolonged sound mark and iteration marks carry the Common script.
    if (cp == 0x30FC || cp == 0x3005 || cp == 0x3006 || cp == 0x303B) return true;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(static_cast<UChar32>(cp), &status);
    if (U_FAILURE(status)) return false;
    return script == USCRIPT_HAN || script == USCRIPT_HIRAGANA ||
           script == USCRIPT_KATAKANA || script == USCRIPT_HANGUL;
}

std::optional<char32_t> terminal_mark(char32_t cp) {
    switch (cp) {
        case U'.': case 0x3002: case 0xFF0E: return U'.';
        case U'!': case 0xFF01: return U'!';
        case U'?': case 0xFF1F: return U'?';
        case 0x2026: return 0x2026;
        default: return std::nullopt;
    }
}

using Span = std::pair<std::size_t, std::size_t>;  // [begin, end) into the code points

// Strips edge punctuation and case-folds; appends nothing if the result is empty.
void emit(const std::vector<char32_t>& cps, Span span, std::vector<std::string>& tokens) {
    auto [b, e] = span;
    while (b < e && is_punct(cps[b])) ++b;
    while (e > b && is_punct(cps[e - 1])) --e;
    if (b == e) return;
    std::string token;
    token.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        append_utf8(token, static_cast<char32_t>(
                               u_foldCase(static_cast<UChar32>(cps[i]), U_FOLD_CASE_DEFAULT)));
    }
    tokens.push_back(std::move(token));
}

void emit_per_character(const std::vector<char32_t>& cps, Span span,
                        std::vector<std::string>& tokens) {
    std::size_t run_begin = span.first;
    for (std::size_t i = span.first; i < span.second; ++i) {
        if (!is_cjk(cps[i])) continue;
        emit(cps, {run_begin, i}, tokens);
        emit(cps, {i, i + 1}, tokens);
        run_begin = i + 1;
    }
    emit(cps, {run_begin, span.second}, tokens);
}

// True if some whitespace run has a CJK character on both sides.
bool whitespace_segmented(const std::vector<char32_t>& cps, const std::vector<Span>& words) {
    for (std::size_t w = 1; w < words.size(); ++w) {
        if (is_cjk(cps[words[w - 1].second - 1]) && is_cjk(cps[words[w].first])) return true;
    }
    return false;
}

}  // namespace

std::string TokenSeq::joined() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

TokenSeq tokenize(std::string_view text, Language lang) {
    const std::vector<char32_t> cps = decode(text);
    TokenSeq seq;

    for (std::size_t i = cps.size(); i-- > 0;) {
        if (is_space(cps[i])) continue;
        if (!is_punct(cps[i])) break;
        if (auto mark = terminal_mark(cps[i])) {
            seq.terminal_punct = mark;
            break;
        }
    }

    std::vector<Span> words;
    for (std::size_t i = 0; i < cps.size();) {
        while (i < cps.size() && is_space(cps[i])) ++i;
        const std::size_t b = i;
        while (i < cps.size() && !is_space(cps[i])) ++i;
        if (i > b) words.emplace_back(b, i);
    }

    const bool per_character = is_cjk_language(lang) && !whitespace_segmented(cps, words);
    seq.tokens.reserve(words.size());
    for (const Span& w : words) {
        if (per_character) {
            emit_per_character(cps, w, seq.tokens);
        } else {
            emit(cps, w, seq.tokens);
        }
    }
    return seq;
}

bool is_very_short(const TokenSeq& seq, std::size_t limit) {
    if (limit < 1) throw std::invalid_argument("very-short limit must be at least 1");
    return !seq.tokens.empty() && seq.tokens.size() <= limit;
}

std::size_t codepoint_count(std::string_view text) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    std::size_t count = 0;
    for (int32_t i = 0; i < length; ++count) {
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        (void)c;
    }
    return count;
}

std::string trim_whitespace(std::string_view text) {
    const std::vector<char32_t> cps = decode(text);
    std::size_t b = 0, e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) append_utf8(out, cps[i]);
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char32_t cp : decode(text)) {
        if (is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        append_utf8(out, cp);
    }
    return out;
}

}  // namespace feedback_lens
