#include "feedback_lens/corpus_io.hpp"

#include "feedback_lens/errors.hpp"
#include "feedback_lens/normalize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace feedback_lens {

using nlohmann::json;

namespace {

std::string context(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ValidationError(where + "\"" + key + "\" must be a string or null");
    return it->get<std::string>();
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(where + "missing required key \"" + key + "\"");
    if (!it->is_string()) throw ValidationError(where + "\"" + key + "\" must be a string");
    return it->get<std::string>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError(where + "unknown key \"" + key + "\"");
        }
    }
}

CorpusSource parse_source(const std::string& s, const std::string& where) {
    if (s == "spontaneous") return CorpusSource::spontaneous;
    if (s == "subtitle") return CorpusSource::subtitle;
    if (s == "synthetic") return CorpusSource::synthetic;
    throw ValidationError(where + "source must be one of spontaneous, subtitle, synthetic (got \"" + s + "\")");
}

Audience parse_audience(const std::string& s, const std::string& where) {
    if (s == "hearing_impaired") return Audience::hearing_impaired;
    if (s == "foreign") return Audience::foreign;
    throw ValidationError(where + "audience must be hearing_impaired, foreign or null (got \"" + s + "\")");
}

Utterance utterance_from_json(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + "expected a JSON object");
    reject_unknown_keys(obj, {"id", "dialogue_id", "index", "speaker", "text", "da_tag", "meta"}, where);

    Utterance u;
    u.id = required_string(obj, "id", where);
    if (u.id.empty()) throw ValidationError(where + "\"id\" must be non-empty");
    u.dialogue_id = required_string(obj, "dialogue_id", where);

    auto index = obj.find("index");
    if (index == obj.end()) throw ValidationError(where + "missing required key \"index\"");
    if (!index->is_number_integer() || (!index->is_number_unsigned() && index->get<std::int64_t>() < 0)) {
        throw ValidationError(where + "\"index\" must be a non-negative integer");
    }
    u.index = index->get<std::uint64_t>();

    u.speaker = optional_string(obj, "speaker", where);
    u.text = required_string(obj, "text", where);
    u.gold_da_tag = optional_string(obj, "da_tag", where);

    if (auto meta = obj.find("meta"); meta != obj.end() && !meta->is_null()) {
        if (!meta->is_object()) throw ValidationError(where + "\"meta\" must be an object");
        for (const auto& [key, value] : meta->items()) {
            if (!value.is_string()) throw ValidationError(where + "meta value for \"" + key + "\" must be a string");
            u.meta.emplace(key, value.get<std::string>());
        }
    }
    return u;
}

std::string dump(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- markup ----

struct Range {
    std::size_t begin;
    std::size_t end;
};

// Balanced delimiter pair found by match_pairs. Equal open/close strings toggle.
struct PairMatch {
    Range open;
    Range close;
};

std::vector<PairMatch> match_pairs(const std::string& text, const BracketPair& pair, std::size_t& unmatched) {
    std::vector<PairMatch> matches;
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < text.size();) {
        const bool at_close = text.compare(i, pair.close.size(), pair.close) == 0;
        const bool at_open = text.compare(i, pair.open.size(), pair.open) == 0;
        if (at_close && !stack.empty()) {
            const std::size_t j = stack.back();
            stack.pop_back();
            matches.push_back({{j, j + pair.open.size()}, {i, i + pair.close.size()}});
            i += pair.close.size();
        } else if (at_open) {
            stack.push_back(i);
            i += pair.open.size();
        } else if (at_close) {
            ++unmatched;
            i += pair.close.size();
        } else {
            ++i;
        }
    }
    unmatched += stack.size();
    return matches;
}

// Replaces each marked byte range with `filler`; overlapping ranges are merged.
std::string erase_ranges(const std::string& text, std::vector<Range> ranges, std::string_view filler) {
    if (ranges.empty()) return text;
    std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) { return a.begin < b.begin; });
    std::string out;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < ranges.size();) {
        std::size_t b = ranges[k].begin, e = ranges[k].end;
        for (++k; k < ranges.size() && ranges[k].begin < e; ++k) e = std::max(e, ranges[k].end);
        if (b >= pos) {
            out.append(text, pos, b - pos);
            out += filler;
        }
        pos = std::max(pos, e);
    }
    out.append(text, pos, std::string::npos);
    return out;
}

std::string strip_pass(const std::string& text, const MarkupRuleSet& rules, std::size_t& unmatched) {
    std::string cur = text;
    for (const auto& pair : rules.remove) {
        if (pair.open.empty() || pair.close.empty()) continue;
        std::vector<Range> ranges;
        for (const auto& m : match_pairs(cur, pair, unmatched)) ranges.push_back({m.open.begin, m.close.end});
        cur = erase_ranges(cur, std::move(ranges), " ");
    }
    for (const auto& pair : rules.unwrap) {
        if (pair.open.empty() || pair.close.empty()) continue;
        std::vector<Range> ranges;
        for (const auto& m : match_pairs(cur, pair, unmatched)) {
            ranges.push_back(m.open);
            ranges.push_back(m.close);
        }
        cur = erase_ranges(cur, std::move(ranges), "");
    }
    cur = collapse_whitespace(cur);
    if (!rules.remove_tokens.empty() && !cur.empty()) {
        std::string kept;
        std::istringstream words(cur);
        for (std::string w; words >> w;) {
            const bool drop = std::any_of(rules.remove_tokens.begin(), rules.remove_tokens.end(),
                                          [&](const std::regex& re) { return std::regex_match(w, re); });
            if (drop) continue;
            if (!kept.empty()) kept += ' ';
            kept += w;
        }
        cur = std::move(kept);
    }
    return cur;
}

bool genre_excluded(const std::string& genre_field, const std::vector<std::string>& excluded,
                    std::string& hit) {
    std::string token;
    auto check = [&]() {
        const std::string g = lower_ascii(trim_whitespace(token));
        token.clear();
        if (g.empty()) return false;
        for (const auto& e : excluded) {
            if (lower_ascii(e) == g) {
                hit = g;
                return true;
            }
        }
        return false;
    };
    for (char c : genre_field) {
        if (c == ',' || c == '|' || c == ';' || c == '/') {
            if (check()) return true;
        } else {
            token += c;
        }
    }
    return check();
}

}  // namespace

std::string_view to_string(CorpusSource source) {
    switch (source) {
        case CorpusSource::spontaneous: return "spontaneous";
        case CorpusSource::subtitle: return "subtitle";
        case CorpusSource::synthetic: return "synthetic";
    }
    return "?";
}

std::string_view to_string(Audience audience) {
    return audience == Audience::hearing_impaired ? "hearing_impaired" : "foreign";
}

CorpusManifest parse_manifest(std::string_view json_text, std::string_view source_name) {
    const std::string where = std::string(source_name) + ": ";
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + "malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw ValidationError(where + "manifest must be a JSON object");
    reject_unknown_keys(obj, {"name", "language", "source", "genre", "audience", "year"}, where);

    CorpusManifest m;
    m.name = required_string(obj, "name", where);
    try {
        m.language = parse_language(required_string(obj, "language", where));
    } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
    }
    m.source = parse_source(required_string(obj, "source", where), where);
    m.genre = optional_string(obj, "genre", where);
    if (auto a = optional_string(obj, "audience", where)) m.audience = parse_audience(*a, where);
    if (auto y = obj.find("year"); y != obj.end() && !y->is_null()) {
        if (!y->is_number_integer()) throw ValidationError(where + "\"year\" must be an integer or null");
        m.year = y->get<int>();
    }
    if (m.audience && m.source != CorpusSource::subtitle) {
        throw ValidationError(where + "audience is only allowed for subtitle corpora (source is " +
                              std::string(to_string(m.source)) + ")");
    }
    return m;
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path), path.string());
}

std::vector<Utterance> parse_utterances(std::istream& in, std::string_view source_name) {
    std::vector<Utterance> out;
    std::unordered_map<std::string, std::size_t> id_lines;
    std::unordered_map<std::string, std::uint64_t> last_index;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = context(source_name, line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + "malformed JSON: " + e.what());
        }
        Utterance u = utterance_from_json(obj, where);

        auto [it, inserted] = id_lines.emplace(u.id, line_no);
        if (!inserted) {
            throw ValidationError(std::string(source_name) + ": duplicate utterance id \"" + u.id +
                                  "\" on lines " + std::to_string(it->second) + " and " +
                                  std::to_string(line_no));
        }
        auto [last, first_in_dialogue] = last_index.emplace(u.dialogue_id, u.index);
        if (!first_in_dialogue) {
            if (u.index <= last->second) {
                throw ValidationError(where + "index " + std::to_string(u.index) +
                                      " is not greater than the previous index " +
                                      std::to_string(last->second) + " of dialogue \"" +
                                      u.dialogue_id + "\"");
            }
            last->second = u.index;
        }
        out.push_back(std::move(u));
    }
    if (in.bad()) throw IoError(std::string(source_name) + ": read error");
    return out;
}

Corpus parse_corpus(const std::filesystem::path& corpus_path, const std::filesystem::path& manifest_path) {
    Corpus c;
    c.manifest = read_manifest(manifest_path);
    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + corpus_path.string());
    c.utterances = parse_utterances(in, corpus_path.string());
    return c;
}

std::string serialize_utterance(const Utterance& u) {
    json obj = {
        {"id", u.id},
        {"dialogue_id", u.dialogue_id},
        {"index", u.index},
        {"speaker", u.speaker ? json(*u.speaker) : json(nullptr)},
        {"text", u.text},
        {"da_tag", u.gold_da_tag ? json(*u.gold_da_tag) : json(nullptr)},
        {"meta", json::object()},
    };
    for (const auto& [k, v] : u.meta) obj["meta"][k] = v;
    return dump(obj);
}

std::string serialize_manifest(const CorpusManifest& m) {
    json obj = {
        {"name", m.name},
        {"language", std::string(to_string(m.language))},
        {"source", std::string(to_string(m.source))},
        {"genre", m.genre ? json(*m.genre) : json(nullptr)},
        {"audience", m.audience ? json(std::string(to_string(*m.audience))) : json(nullptr)},
        {"year", m.year ? json(*m.year) : json(nullptr)},
    };
    return dump(obj);
}

void write_utterances(std::ostream& out, const std::vector<Utterance>& utterances) {
    for (const auto& u : utterances) out << serialize_utterance(u) << '\n';
}

MarkupRuleSet MarkupRuleSet::defaults() {
    MarkupRuleSet rules;
    rules.remove.push_back({"((", "))"});
    rules.unwrap.push_back({"<", ">"});
    rules.remove_tokens.emplace_back(R"([:;=8][-o']?[()\[\]DPpOo3/\\|*]+)");
    return rules;
}

Utterance strip_markup(const Utterance& u, const MarkupRuleSet& rules, MarkupWarnings* warnings) {
    Utterance out = u;
    std::size_t unmatched = 0;
    std::string cur = strip_pass(u.text, rules, unmatched);
    // Deleting content can bring new delimiters together; run to a fixpoint.
    for (std::size_t ignored = 0;;) {
        std::string next = strip_pass(cur, rules, ignored);
        if (next == cur) break;
        cur = std::move(next);
    }
    out.text = std::move(cur);
    out.meta.try_emplace("raw_text", u.text);
    if (warnings) warnings->unmatched_brackets += unmatched;
    return out;
}

std::vector<std::string> FilterPolicy::default_excluded_genres() {
    return {"Documentary", "Reality-TV", "Biography", "Sport", "Musical",
            "Music", "Adult", "Animation", "Short", "Game-Show"};
}

FilterResult filter_corpus(const Corpus& c, const FilterPolicy& policy) {
    FilterResult result;
    result.corpus.manifest = c.manifest;
    FilterReport& report = result.report;
    report.input_utterances = c.utterances.size();

    const bool corpus_rules = !policy.corpus_rules_subtitles_only || c.manifest.source == CorpusSource::subtitle;
    if (corpus_rules) {
        std::string genre_hit;
        if (c.manifest.year && *c.manifest.year < policy.min_year) {
            report.rejection_reason = "year < " + std::to_string(policy.min_year);
        } else if (c.manifest.genre && genre_excluded(*c.manifest.genre, policy.excluded_genres, genre_hit)) {
            report.rejection_reason = "excluded genre: " + genre_hit;
        } else if (c.utterances.size() < policy.min_utterances) {
            report.rejection_reason = "below minimum utterances";
        }
        if (report.rejection_reason) return result;
    }

    result.corpus.utterances.reserve(c.utterances.size());
    for (const Utterance& u : c.utterances) {
        Utterance kept = u;
        if (policy.markup) {
            MarkupWarnings w;
            kept = strip_markup(u, *policy.markup, &w);
            report.unmatched_brackets += w.unmatched_brackets;
        }
        const std::string trimmed = trim_whitespace(kept.text);
        if (policy.drop_empty_utterances && trimmed.empty()) {
            ++report.removed_empty;
            continue;
        }
        if (policy.drop_single_character_utterances && codepoint_count(trimmed) == 1) {
            ++report.removed_single_character;
            continue;
        }
        result.corpus.utterances.push_back(std::move(kept));
    }
    report.kept = result.corpus.utterances.size();
    return result;
}

}  // namespace feedback_lens
