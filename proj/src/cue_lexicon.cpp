#include "feedback_lens/cue_lexicon.hpp"

#include "feedback_lens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace feedback_lens {

using nlohmann::json;

std::string_view to_string(FeedbackClass c) {
    switch (c) {
        case FeedbackClass::positive: return "positive";
        case FeedbackClass::neutral: return "neutral";
        case FeedbackClass::negative: return "negative";
        case FeedbackClass::clarification: return "clarification";
    }
    return "?";
}

std::optional<FeedbackClass> parse_feedback_class(std::string_view name) {
    for (FeedbackClass c : kFeedbackClasses) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

void validate_precedence(const ClassPrecedence& precedence) {
    unsigned seen = 0;
    for (FeedbackClass c : precedence) seen |= 1u << static_cast<unsigned>(c);
    if (seen != 0b1111u) throw ValidationError("class precedence must list each feedback class exactly once");
}

CueLexicon::CueLexicon(Language language, std::array<std::set<Cue>, 4> classes,
                       std::map<std::string, std::set<Cue>> extras, ClassPrecedence precedence)
    : language_(language),
      classes_(std::move(classes)),
      extras_(std::move(extras)),
      precedence_(precedence) {
    validate_precedence(precedence_);
    for (FeedbackClass c : kFeedbackClasses) {
        for (const Cue& cue : cues(c)) class_mask_[key(cue)] |= 1u << static_cast<unsigned>(c);
    }
    for (const auto& [name, set] : extras_) {
        for (const Cue& cue : set) extra_index_.try_emplace(key(cue), name);
    }
}

std::string CueLexicon::key(const std::vector<std::string>& tokens) {
    std::string k;
    for (const auto& t : tokens) {
        k += t;
        k += '\x1f';
    }
    return k;
}

std::vector<Cue> CueLexicon::cross_class_duplicates() const {
    std::set<Cue> dups;
    for (FeedbackClass c : kFeedbackClasses) {
        for (const Cue& cue : cues(c)) {
            if (classes_of(cue).size() > 1) dups.insert(cue);
        }
    }
    return {dups.begin(), dups.end()};
}

std::vector<FeedbackClass> CueLexicon::classes_of(const std::vector<std::string>& tokens) const {
    std::vector<FeedbackClass> out;
    auto it = class_mask_.find(key(tokens));
    if (it == class_mask_.end()) return out;
    for (FeedbackClass c : kFeedbackClasses) {
        if (it->second & (1u << static_cast<unsigned>(c))) out.push_back(c);
    }
    return out;
}

std::optional<FeedbackClass> CueLexicon::lookup(const std::vector<std::string>& tokens) const {
    auto it = class_mask_.find(key(tokens));
    if (it == class_mask_.end()) return std::nullopt;
    for (FeedbackClass c : precedence_) {
        if (it->second & (1u << static_cast<unsigned>(c))) return c;
    }
    return std::nullopt;
}

std::optional<std::string> CueLexicon::lookup_extra(const std::vector<std::string>& tokens) const {
    auto it = extra_index_.find(key(tokens));
    if (it == extra_index_.end()) return std::nullopt;
    return it->second;
}

CueLexicon CueLexicon::with_precedence(ClassPrecedence precedence) const {
    return CueLexicon(language_, classes_, extras_, precedence);
}

namespace {

std::set<Cue> parse_cue_list(const json& list, Language lang, const std::string& where,
                             std::size_t& within_duplicates) {
    if (!list.is_array()) throw ValidationError(where + " must be an array of strings");
    std::set<Cue> out;
    for (const auto& item : list) {
        if (!item.is_string()) throw ValidationError(where + " must contain only strings");
        const auto text = item.get<std::string>();
        TokenSeq seq = tokenize(text, lang);
        if (seq.empty()) throw ValidationError(where + ": empty cue \"" + text + "\"");
        if (seq.size() > kMaxCueTokens) {
            throw ValidationError(where + ": cue \"" + text + "\" has more than " +
                                  std::to_string(kMaxCueTokens) + " tokens");
        }
        if (!out.insert(std::move(seq.tokens)).second) ++within_duplicates;
    }
    return out;
}

}  // namespace

CueLexicon parse_lexicon(std::string_view json_text, std::string_view source_name, LexiconLoadReport* report) {
    const std::string where(source_name);
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw ValidationError(where + ": lexicon must be a JSON object");

    auto lang_it = obj.find("language");
    if (lang_it == obj.end() || !lang_it->is_string()) {
        throw ValidationError(where + ": missing string key \"language\"");
    }
    Language lang;
    try {
        lang = parse_language(lang_it->get<std::string>());
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }

    auto classes_it = obj.find("classes");
    if (classes_it == obj.end() || !classes_it->is_object()) {
        throw ValidationError(where + ": missing object key \"classes\"");
    }
    for (const auto& [name, value] : classes_it->items()) {
        if (!parse_feedback_class(name)) throw ValidationError(where + ": unknown feedback class \"" + name + "\"");
    }

    LexiconLoadReport local;
    std::array<std::set<Cue>, 4> classes;
    for (FeedbackClass c : kFeedbackClasses) {
        const std::string name(to_string(c));
        auto it = classes_it->find(name);
        if (it == classes_it->end()) throw ValidationError(where + ": missing class \"" + name + "\"");
        classes[static_cast<std::size_t>(c)] =
            parse_cue_list(*it, lang, where + ": classes." + name, local.within_class_duplicates);
    }

    std::map<std::string, std::set<Cue>> extras;
    if (auto it = obj.find("extras"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw ValidationError(where + ": \"extras\" must be an object");
        for (const auto& [name, list] : it->items()) {
            if (name.empty() || name == "other" || parse_feedback_class(name)) {
                throw ValidationError(where + ": invalid extras category name \"" + name + "\"");
            }
            extras.emplace(name, parse_cue_list(list, lang, where + ": extras." + name,
                                                local.within_class_duplicates));
        }
    }

    CueLexicon lex(lang, std::move(classes), std::move(extras));
    local.cross_class_duplicates = lex.cross_class_duplicates();
    if (report) *report = std::move(local);
    return lex;
}

CueLexicon load_lexicon(const std::filesystem::path& path, LexiconLoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_lexicon(ss.str(), path.string(), report);
}

std::optional<FeedbackClass> lookup_cue(const CueLexicon& lex, const TokenSeq& seq) {
    if (seq.empty()) return std::nullopt;
    return lex.lookup(seq.tokens);
}

}  // namespace feedback_lens
