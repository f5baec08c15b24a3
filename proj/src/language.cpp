#include "feedback_lens/language.hpp"

#include "feedback_lens/errors.hpp"

namespace feedback_lens {

std::string_view to_string(Language lang) {
    switch (lang) {
        case Language::de: return "de";
        case Language::en: return "en";
        case Language::fr: return "fr";
        case Language::hu: return "hu";
        case Language::it: return "it";
        case Language::ja: return "ja";
        case Language::no: return "no";
        case Language::zh: return "zh";
    }
    return "?";
}

Language parse_language(std::string_view code) {
    for (Language lang : kAllLanguages) {
        if (to_string(lang) == code) return lang;
    }
    std::string valid;
    for (Language lang : kAllLanguages) {
        if (!valid.empty()) valid += ", ";
        valid += to_string(lang);
    }
    throw ValidationError("unsupported language code \"" + std::string(code) +
                          "\" (supported: " + valid + ")");
}

}  // namespace feedback_lens
