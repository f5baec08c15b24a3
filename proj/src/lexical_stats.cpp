#include "feedback_lens/lexical_stats.hpp"

#include "feedback_lens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace feedback_lens {

void merge_counts(NgramCounts& into, const NgramCounts& from) {
    for (const auto& [gram, n] : from) into[gram] += n;
}

NgramCounts extract_ngrams(std::span<const TokenSeq> seqs, std::size_t n_max, NgramScope scope,
                           std::size_t short_limit) {
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
    NgramCounts counts;
    for (const TokenSeq& seq : seqs) {
        if (scope == NgramScope::very_short_only && !is_very_short(seq, short_limit)) continue;
        const auto& t = seq.tokens;
        for (std::size_t n = 1; n <= n_max && n <= t.size(); ++n) {
            for (std::size_t i = 0; i + n <= t.size(); ++i) {
                ++counts[Ngram(t.begin() + static_cast<std::ptrdiff_t>(i),
                               t.begin() + static_cast<std::ptrdiff_t>(i + n))];
            }
        }
    }
    return counts;
}

std::vector<TokenSeq> tokenize_corpus(const Corpus& c) {
    std::vector<TokenSeq> seqs;
    seqs.reserve(c.utterances.size());
    for (const auto& u : c.utterances) seqs.push_back(tokenize(u.text, c.manifest.language));
    return seqs;
}

NgramCounts extract_ngrams(const Corpus& c, std::size_t n_max, NgramScope scope, std::size_t short_limit) {
    const auto seqs = tokenize_corpus(c);
    return extract_ngrams(seqs, n_max, scope, short_limit);
}

double scaled_fscore(double precision, double frequency) {
    if (!(precision >= 0.0 && precision <= 1.0) || !(frequency >= 0.0 && frequency <= 1.0)) {
        throw std::invalid_argument("scaled_fscore inputs must lie in [0, 1]");
    }
    const double sum = precision + frequency;
    if (sum == 0.0) return 0.0;
    return 2.0 * precision * frequency / sum;
}

namespace {

std::vector<TermStats> top_by(const std::vector<TermStats>& table, std::size_t k, double TermStats::*score) {
    std::vector<TermStats> sorted = table;
    std::stable_sort(sorted.begin(), sorted.end(), [score](const TermStats& x, const TermStats& y) {
        if (x.*score != y.*score) return x.*score > y.*score;
        return x.term < y.term;
    });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

std::uint64_t tokens_in_scope(std::span<const TokenSeq> seqs, NgramScope scope, std::size_t short_limit) {
    std::uint64_t n = 0;
    for (const auto& s : seqs) {
        if (scope == NgramScope::very_short_only && !is_very_short(s, short_limit)) continue;
        n += s.size();
    }
    return n;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string join(const Ngram& g) {
    std::string out;
    for (const auto& t : g) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

TermComparison compare_term_counts(const NgramCounts& a, std::uint64_t tokens_a, const NgramCounts& b,
                                   std::uint64_t tokens_b, std::size_t top_k) {
    TermComparison out;
    out.tokens_a = tokens_a;
    out.tokens_b = tokens_b;

    auto fill = [&](const Ngram& term) {
        TermStats s;
        s.term = term;
        if (auto it = a.find(term); it != a.end()) s.count_a = it->second;
        if (auto it = b.find(term); it != b.end()) s.count_b = it->second;
        const double both = static_cast<double>(s.count_a + s.count_b);
        if (both > 0) {
            s.precision_a = static_cast<double>(s.count_a) / both;
            s.precision_b = static_cast<double>(s.count_b) / both;
        }
        if (tokens_a > 0) s.frequency_a = std::min(1.0, static_cast<double>(s.count_a) / static_cast<double>(tokens_a));
        if (tokens_b > 0) s.frequency_b = std::min(1.0, static_cast<double>(s.count_b) / static_cast<double>(tokens_b));
        s.fscore_a = scaled_fscore(s.precision_a, s.frequency_a);
        s.fscore_b = scaled_fscore(s.precision_b, s.frequency_b);
        out.table.push_back(std::move(s));
    };

    // Walk both sorted maps once to visit the union in term order.
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            fill((ia++)->first);
        } else if (ia == a.end() || ib->first < ia->first) {
            fill((ib++)->first);
        } else {
            fill(ia->first);
            ++ia;
            ++ib;
        }
    }
    out.top_a = top_by(out.table, top_k, &TermStats::fscore_a);
    out.top_b = top_by(out.table, top_k, &TermStats::fscore_b);
    return out;
}

TermComparison compare_corpora_terms(const Corpus& a, const Corpus& b, const TermComparisonOptions& opts) {
    if (a.manifest.language != b.manifest.language) {
        throw ValidationError("cannot compare corpora in different languages (" +
                              std::string(to_string(a.manifest.language)) + " vs " +
                              std::string(to_string(b.manifest.language)) + ")");
    }
    const auto seqs_a = tokenize_corpus(a);
    const auto seqs_b = tokenize_corpus(b);
    const auto tokens_a = tokens_in_scope(seqs_a, opts.scope, opts.short_limit);
    const auto tokens_b = tokens_in_scope(seqs_b, opts.scope, opts.short_limit);
    if (tokens_a == 0 || tokens_b == 0) {
        throw ValidationError("cannot compare terms: corpus \"" + (tokens_a == 0 ? a : b).manifest.name +
                              "\" has no tokens in scope");
    }
    return compare_term_counts(extract_ngrams(seqs_a, opts.n_max, opts.scope, opts.short_limit), tokens_a,
                               extract_ngrams(seqs_b, opts.n_max, opts.scope, opts.short_limit), tokens_b,
                               opts.top_k);
}

void write_terms_csv(std::ostream& out, const std::vector<TermStats>& rows) {
    out << "term,count_a,count_b,precision_a,frequency_a,fscore_a,precision_b,frequency_b,fscore_b\n";
    for (const auto& r : rows) {
        out << csv_field(join(r.term)) << ',' << r.count_a << ',' << r.count_b << ',' << fixed6(r.precision_a)
            << ',' << fixed6(r.frequency_a) << ',' << fixed6(r.fscore_a) << ',' << fixed6(r.precision_b) << ','
            << fixed6(r.frequency_b) << ',' << fixed6(r.fscore_b) << '\n';
    }
}

std::size_t LengthHistogram::total() const {
    std::size_t n = empty;
    for (const auto& [len, bin] : bins) n += bin.feedback + bin.other;
    return n;
}

LengthHistogram length_distribution(std::span<const TokenSeq> seqs, std::span<const FeedbackLabel> labels,
                                    std::size_t max_length) {
    if (seqs.size() != labels.size()) {
        throw ValidationError("label list has " + std::to_string(labels.size()) + " entries but there are " +
                              std::to_string(seqs.size()) + " utterances");
    }
    if (max_length < 1) throw std::invalid_argument("max_length must be at least 1");
    LengthHistogram h;
    h.max_length = max_length;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (seqs[i].empty()) {
            ++h.empty;
            continue;
        }
        LengthBin& bin = h.bins[std::min(seqs[i].size(), max_length)];
        if (labels[i].is_feedback()) {
            ++bin.feedback;
        } else {
            ++bin.other;
        }
    }
    return h;
}

std::vector<FeedbackItem> top_feedback_items(std::span<const TokenSeq> seqs, std::span<const FeedbackLabel> labels,
                                             std::size_t k) {
    if (seqs.size() != labels.size()) {
        throw ValidationError("label list is not aligned with the utterances");
    }
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    std::map<std::string, std::map<std::string, std::size_t>> by_form;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (!labels[i].is_feedback() || seqs[i].empty()) continue;
        ++by_form[seqs[i].joined()][labels[i].name()];
    }
    std::vector<FeedbackItem> items;
    items.reserve(by_form.size());
    for (const auto& [form, per_label] : by_form) {
        FeedbackItem item{form, 0, {}};
        std::size_t best = 0;
        for (const auto& [label, n] : per_label) {
            item.count += n;
            if (n > best) {
                best = n;
                item.label = label;
            }
        }
        items.push_back(std::move(item));
    }
    std::stable_sort(items.begin(), items.end(), [](const FeedbackItem& x, const FeedbackItem& y) {
        if (x.count != y.count) return x.count > y.count;
        return x.form < y.form;
    });
    if (items.size() > k) items.resize(k);
    return items;
}

}  // namespace feedback_lens
