#include "feedback_lens/rule_classifier.hpp"

#include "feedback_lens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <future>
#include <istream>
#include <set>

namespace feedback_lens {

using nlohmann::json;

std::string_view to_string(MatchSite site) {
    switch (site) {
        case MatchSite::full_short: return "full_short";
        case MatchSite::initial: return "initial";
        case MatchSite::none: return "none";
    }
    return "?";
}

std::optional<MatchSite> parse_match_site(std::string_view name) {
    if (name == "full_short") return MatchSite::full_short;
    if (name == "initial") return MatchSite::initial;
    if (name == "none") return MatchSite::none;
    return std::nullopt;
}

std::string_view to_string(Denominator d) {
    return d == Denominator::all_utterances ? "all_utterances" : "feedback_only";
}

FeedbackLabel FeedbackLabel::of(FeedbackClass c, MatchSite site) {
    return {static_cast<LabelKind>(c), site, {}};
}

std::string FeedbackLabel::name() const {
    switch (kind) {
        case LabelKind::positive: return "positive";
        case LabelKind::neutral: return "neutral";
        case LabelKind::negative: return "negative";
        case LabelKind::clarification: return "clarification";
        case LabelKind::extra: return extra;
        case LabelKind::other: return "other";
    }
    return "other";
}

FeedbackLabel parse_label(std::string_view name, MatchSite site) {
    if (name == "other") return FeedbackLabel::other();
    if (auto c = parse_feedback_class(name)) return FeedbackLabel::of(*c, site);
    return {LabelKind::extra, site, std::string(name)};
}

namespace {

std::optional<FeedbackLabel> match(const std::vector<std::string>& tokens, const CueLexicon& lex,
                                   const ClassifierOptions& opts, MatchSite site) {
    if (auto c = lex.lookup(tokens)) return FeedbackLabel::of(*c, site);
    if (opts.include_extras) {
        if (auto e = lex.lookup_extra(tokens)) return FeedbackLabel{LabelKind::extra, site, *e};
    }
    return std::nullopt;
}

std::optional<FeedbackLabel> match_initial(const TokenSeq& seq, const CueLexicon& lex,
                                           const ClassifierOptions& opts) {
    return match({seq.tokens.front()}, lex, opts, MatchSite::initial);
}

}  // namespace

FeedbackLabel classify_utterance(const TokenSeq& seq, const CueLexicon& lex, const ClassifierOptions& opts) {
    if (seq.empty()) return FeedbackLabel::other();
    if (is_very_short(seq, opts.short_limit)) {
        if (auto full = match(seq.tokens, lex, opts, MatchSite::full_short)) return *full;
        if (seq.size() >= 2 && opts.include_initial && opts.initial_in_short) {
            if (auto init = match_initial(seq, lex, opts)) return *init;
        }
        return FeedbackLabel::other();
    }
    if (opts.include_initial) {
        if (auto init = match_initial(seq, lex, opts)) return *init;
    }
    return FeedbackLabel::other();
}

std::vector<FeedbackLabel> classify_tokens(std::span<const TokenSeq> seqs, const CueLexicon& lex,
                                           const ClassifierOptions& opts) {
    std::vector<FeedbackLabel> out(seqs.size());
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = classify_utterance(seqs[i], lex, opts);
    };
    const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(opts.threads, 1), seqs.size());
    if (workers <= 1) {
        run(0, seqs.size());
        return out;
    }
    // Each worker owns a contiguous slice of `out`, so the result is independent of scheduling.
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (seqs.size() + workers - 1) / workers;
    for (std::size_t b = 0; b < seqs.size(); b += chunk) {
        jobs.push_back(std::async(std::launch::async, run, b, std::min(seqs.size(), b + chunk)));
    }
    for (auto& j : jobs) j.get();
    return out;
}

LabeledCorpus classify_corpus(const Corpus& c, const CueLexicon& lex, const ClassifierOptions& opts) {
    if (c.manifest.language != lex.language()) {
        throw ValidationError("language mismatch: corpus \"" + c.manifest.name + "\" is " +
                              std::string(to_string(c.manifest.language)) + " but the lexicon is " +
                              std::string(to_string(lex.language())));
    }
    std::vector<TokenSeq> seqs;
    seqs.reserve(c.utterances.size());
    for (const auto& u : c.utterances) seqs.push_back(tokenize(u.text, c.manifest.language));
    std::vector<FeedbackLabel> labels = classify_tokens(seqs, lex, opts);

    LabeledCorpus out;
    out.records.reserve(labels.size());
    out.summary.total = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const FeedbackLabel& l = labels[i];
        ++out.summary.counts[l.name()];
        if (l.site == MatchSite::full_short) ++out.summary.full_short;
        if (l.site == MatchSite::initial) ++out.summary.initial;
        out.records.push_back({c.utterances[i].id, l});
    }
    return out;
}

std::string serialize_label_record(const LabeledUtterance& rec) {
    json obj = {{"id", rec.id}, {"label", rec.label.name()}, {"site", std::string(to_string(rec.label.site))}};
    return obj.dump();
}

std::vector<LabeledUtterance> parse_label_records(std::istream& in, std::string_view source_name) {
    std::vector<LabeledUtterance> out;
    std::set<std::string> ids;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + "malformed JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() || !obj.contains("label") ||
            !obj["label"].is_string() || !obj.contains("site") || !obj["site"].is_string()) {
            throw ValidationError(where + "expected {\"id\": str, \"label\": str, \"site\": str}");
        }
        auto site = parse_match_site(obj["site"].get<std::string>());
        if (!site) throw ValidationError(where + "unknown site \"" + obj["site"].get<std::string>() + "\"");
        FeedbackLabel label = parse_label(obj["label"].get<std::string>(), *site);
        if ((label.kind == LabelKind::other) != (*site == MatchSite::none)) {
            throw ValidationError(where + "label \"other\" must pair with site \"none\" and vice versa");
        }
        std::string id = obj["id"].get<std::string>();
        if (!ids.insert(id).second) throw ValidationError(where + "duplicate id \"" + id + "\"");
        out.push_back({std::move(id), std::move(label)});
    }
    return out;
}

const ProportionRow* ProportionTable::find(std::string_view label) const {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

double ProportionTable::proportion(std::string_view label) const {
    const ProportionRow* r = find(label);
    return r ? r->proportion : 0.0;
}

ProportionTable class_proportions(std::span<const FeedbackLabel> labels, Denominator denominator) {
    if (labels.empty()) throw ValidationError("cannot compute proportions of an empty label list");

    std::map<std::string, std::size_t> counts;
    std::set<std::string> extras;
    std::size_t other = 0;
    for (const auto& l : labels) {
        if (l.kind == LabelKind::other) {
            ++other;
            continue;
        }
        ++counts[l.name()];
        if (l.kind == LabelKind::extra) extras.insert(l.extra);
    }

    ProportionTable table;
    table.denominator = denominator;
    table.total = denominator == Denominator::all_utterances ? labels.size() : labels.size() - other;
    if (table.total == 0) {
        throw ValidationError("feedback-only proportions need at least one non-other label");
    }

    std::vector<std::string> order;
    for (FeedbackClass c : kFeedbackClasses) order.emplace_back(to_string(c));
    order.insert(order.end(), extras.begin(), extras.end());
    for (const auto& name : order) {
        const std::size_t n = counts[name];
        table.rows.push_back({name, n, static_cast<double>(n) / static_cast<double>(table.total)});
    }
    if (denominator == Denominator::all_utterances) {
        table.rows.push_back({"other", other, static_cast<double>(other) / static_cast<double>(table.total)});
    }
    return table;
}

}  // namespace feedback_lens
