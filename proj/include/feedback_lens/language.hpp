#pragma once

#include <array>
#include <string>
#include <string_view>

namespace feedback_lens {

enum class Language { de, en, fr, hu, it, ja, no, zh };

inline constexpr std::array<Language, 8> kAllLanguages = {
    Language::de, Language::en, Language::fr, Language::hu,
    Language::it, Language::ja, Language::no, Language::zh};

std::string_view to_string(Language lang);

/// Throws ValidationError listing the supported codes when `code` is not one of them.
Language parse_language(std::string_view code);

/// Japanese and Chinese get the per-character fallback for unsegmented text.
constexpr bool is_cjk_language(Language lang) {
    return lang == Language::ja || lang == Language::zh;
}

}  // namespace feedback_lens
