#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feedback_lens/errors.hpp"
#include "feedback_lens/lexical_stats.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace feedback_lens;

namespace {

TokenSeq seq(std::vector<std::string> t) { return {std::move(t), std::nullopt}; }

// Counts every contiguous window by direct enumeration over positions.
std::map<std::vector<std::string>, std::uint64_t> brute_ngrams(const std::vector<TokenSeq>& seqs, std::size_t n_max,
                                                               std::size_t limit, bool short_only) {
    std::map<std::vector<std::string>, std::uint64_t> out;
    for (const auto& s : seqs) {
        if (short_only && (s.size() == 0 || s.size() > limit)) continue;
        for (std::size_t start = 0; start < s.size(); ++start) {
            for (std::size_t end = start + 1; end <= s.size() && end - start <= n_max; ++end) {
                ++out[std::vector<std::string>(s.tokens.begin() + start, s.tokens.begin() + end)];
            }
        }
    }
    return out;
}

FeedbackLabel pos() { return FeedbackLabel::of(FeedbackClass::positive, MatchSite::full_short); }
FeedbackLabel neu() { return FeedbackLabel::of(FeedbackClass::neutral, MatchSite::full_short); }

}  // namespace

TEST_CASE("ngram enumeration") {
    const std::vector<TokenSeq> s = {seq({"yeah", "yeah"})};
    const NgramCounts c = extract_ngrams(s, 2);
    CHECK(c.size() == 2);
    CHECK(c.at({"yeah"}) == 2);
    CHECK(c.at({"yeah", "yeah"}) == 1);
}

TEST_CASE("ngram scope excludes long utterances") {
    const std::vector<TokenSeq> s = {seq({"a", "b", "c", "d", "e"})};
    CHECK(extract_ngrams(s, 3).empty());
    CHECK(extract_ngrams(s, 3, NgramScope::all).size() == 12);
    CHECK_THROWS_AS(extract_ngrams(s, 0), std::invalid_argument);
}

TEST_CASE("ngram counts match hand enumeration") {
    const std::vector<TokenSeq> s = {seq({"oh", "yeah"}), seq({"yeah"}), seq({"oh", "oh", "yeah"}),
                                     seq({"i", "went", "there", "today"})};
    const NgramCounts c = extract_ngrams(s, 3);
    const NgramCounts expected = {{{"oh"}, 3},
                                  {{"yeah"}, 3},
                                  {{"oh", "yeah"}, 2},
                                  {{"oh", "oh"}, 1},
                                  {{"oh", "oh", "yeah"}, 1}};
    CHECK(c == expected);
}

TEST_CASE("ngram conservation and brute-force agreement") {
    std::mt19937 rng(29);
    const std::vector<std::string> vocab = {"a", "b", "c", "yeah", "no"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<TokenSeq> seqs;
        const int n = 1 + static_cast<int>(rng() % 10);
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> t;
            const int len = static_cast<int>(rng() % 7);
            for (int k = 0; k < len; ++k) t.push_back(vocab[rng() % vocab.size()]);
            seqs.push_back(seq(t));
        }
        const std::size_t n_max = 1 + rng() % 4;
        for (bool short_only : {true, false}) {
            const NgramCounts c =
                extract_ngrams(seqs, n_max, short_only ? NgramScope::very_short_only : NgramScope::all, 3);
            CHECK(c == brute_ngrams(seqs, n_max, 3, short_only));
            // Unigram total equals the token count in scope.
            std::uint64_t unigrams = 0, tokens = 0;
            for (const auto& [g, k] : c) {
                if (g.size() == 1) unigrams += k;
            }
            for (const auto& s : seqs) {
                if (!short_only || (s.size() >= 1 && s.size() <= 3)) tokens += s.size();
            }
            CHECK(unigrams == tokens);
        }
        // Merging split halves equals counting the whole.
        const std::size_t mid = seqs.size() / 2;
        NgramCounts merged = extract_ngrams(std::span<const TokenSeq>(seqs).subspan(0, mid), n_max);
        merge_counts(merged, extract_ngrams(std::span<const TokenSeq>(seqs).subspan(mid), n_max));
        CHECK(merged == extract_ngrams(seqs, n_max));
    }
}

TEST_CASE("scaled_fscore examples") {
    CHECK(scaled_fscore(0.5, 0.25) == doctest::Approx(1.0 / 3));
    for (double p : {0.0, 0.1, 0.5, 0.77, 1.0}) CHECK(scaled_fscore(p, p) == doctest::Approx(p));
    CHECK(scaled_fscore(0.0, 0.9) == 0.0);
    CHECK(scaled_fscore(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(scaled_fscore(1.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(scaled_fscore(0.5, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(scaled_fscore(std::nan(""), 0.5), std::invalid_argument);
}

TEST_CASE("scaled_fscore symmetry, monotonicity and bounds") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const double p = u(rng), f = u(rng), d = u(rng) * (1 - p);
        const double h = scaled_fscore(p, f);
        CHECK(h == doctest::Approx(scaled_fscore(f, p)));
        CHECK(scaled_fscore(p + d, f) >= h - 1e-15);
        CHECK(h >= std::min(p, f) - 1e-15);
        CHECK(h <= 2 * std::min(p, f) + 1e-15);
        CHECK(h <= (p + f) / 2 + 1e-15);
    }
}

TEST_CASE("term comparison basics") {
    const NgramCounts a = {{{"yeah"}, 4}, {{"only_a"}, 1}};
    const NgramCounts b = {{{"yeah"}, 4}, {{"only_b"}, 2}};
    const TermComparison cmp = compare_term_counts(a, 10, b, 10, 5);
    REQUIRE(cmp.table.size() == 3);
    const auto find = [&](const std::string& t) {
        return *std::find_if(cmp.table.begin(), cmp.table.end(), [&](const TermStats& s) { return s.term[0] == t; });
    };
    CHECK(find("only_a").precision_a == 1.0);
    CHECK(find("only_a").precision_b == 0.0);
    CHECK(find("yeah").fscore_a == doctest::Approx(find("yeah").fscore_b));
    CHECK(find("only_b").frequency_b == doctest::Approx(0.2));
    CHECK(cmp.top_a.front().term == Ngram{"yeah"});
    CHECK(cmp.top_b.size() == 3);
}

TEST_CASE("term table matches a brute-force computation") {
    const Corpus a = test_support::make_corpus({"yeah", "oh yeah", "i went home", "mm", "yeah right", "no",
                                                "what", "okay okay", "we drove all the way there", "yeah"},
                                               Language::en, "a");
    const Corpus b = test_support::make_corpus({"what", "what?", "no way", "uh", "really", "get out of here",
                                                "yeah", "oh", "what now", "hmm"},
                                               Language::en, "b");
    const TermComparison cmp = compare_corpora_terms(a, b, {2, 100, NgramScope::very_short_only, 3});

    // Oracle: count windows directly from raw token lists.
    auto tokens_of = [](const Corpus& c) {
        std::vector<TokenSeq> v;
        for (const auto& u : c.utterances) v.push_back(tokenize(u.text, c.manifest.language));
        return v;
    };
    const auto sa = tokens_of(a), sb = tokens_of(b);
    const auto ca = brute_ngrams(sa, 2, 3, true), cb = brute_ngrams(sb, 2, 3, true);
    std::uint64_t ta = 0, tb = 0;
    for (const auto& s : sa) ta += s.size() <= 3 ? s.size() : 0;
    for (const auto& s : sb) tb += s.size() <= 3 ? s.size() : 0;
    CHECK(cmp.tokens_a == ta);
    CHECK(cmp.tokens_b == tb);

    std::set<std::vector<std::string>> terms;
    for (const auto& [t, k] : ca) terms.insert(t);
    for (const auto& [t, k] : cb) terms.insert(t);
    REQUIRE(cmp.table.size() == terms.size());
    std::size_t i = 0;
    for (const auto& t : terms) {
        const TermStats& s = cmp.table[i++];
        CHECK(s.term == t);
        const double na = ca.count(t) ? static_cast<double>(ca.at(t)) : 0.0;
        const double nb = cb.count(t) ? static_cast<double>(cb.at(t)) : 0.0;
        const double pa = na / (na + nb), pb = nb / (na + nb);
        const double fa = na / static_cast<double>(ta), fb = nb / static_cast<double>(tb);
        const double ha = pa + fa > 0 ? 2 * pa * fa / (pa + fa) : 0;
        const double hb = pb + fb > 0 ? 2 * pb * fb / (pb + fb) : 0;
        CHECK(s.count_a == na);
        CHECK(s.count_b == nb);
        CHECK(s.precision_a == doctest::Approx(pa).epsilon(1e-12));
        CHECK(s.frequency_b == doctest::Approx(fb).epsilon(1e-12));
        CHECK(s.fscore_a == doctest::Approx(ha).epsilon(1e-12));
        CHECK(s.fscore_b == doctest::Approx(hb).epsilon(1e-12));
    }
    // Top lists are sorted by their score with term order breaking ties.
    for (std::size_t k = 1; k < cmp.top_a.size(); ++k) {
        const auto& x = cmp.top_a[k - 1];
        const auto& y = cmp.top_a[k];
        CHECK((x.fscore_a > y.fscore_a || (x.fscore_a == y.fscore_a && x.term < y.term)));
    }
}

TEST_CASE("term comparison errors") {
    const Corpus a = test_support::make_corpus({"yeah"}, Language::en);
    const Corpus b = test_support::make_corpus({"ja"}, Language::de);
    CHECK_THROWS_AS(compare_corpora_terms(a, b), ValidationError);
    const Corpus no_short = test_support::make_corpus({"this one is long enough"}, Language::en);
    CHECK_THROWS_AS(compare_corpora_terms(a, no_short), ValidationError);
}

TEST_CASE("terms CSV") {
    const TermComparison cmp = compare_term_counts({{{"a", "b"}, 1}}, 2, {{{"c,d"}, 1}}, 1, 5);
    std::ostringstream out;
    write_terms_csv(out, cmp.table);
    const std::string csv = out.str();
    CHECK(csv.rfind("term,count_a,count_b,precision_a,frequency_a,fscore_a,precision_b,frequency_b,fscore_b\n", 0) ==
          0);
    CHECK(csv.find("a b,1,0,1.000000,0.500000,0.666667,") != std::string::npos);
    CHECK(csv.find("\"c,d\",0,1") != std::string::npos);
}

TEST_CASE("length histogram") {
    std::vector<TokenSeq> seqs(10, seq({"yeah"}));
    std::vector<FeedbackLabel> ls(10, pos());
    LengthHistogram h = length_distribution(seqs, ls);
    CHECK(h.bins.size() == 1);
    CHECK(h.bins.at(1).feedback == 10);
    CHECK(h.bins.at(1).other == 0);

    seqs.push_back(seq({}));
    ls.push_back(FeedbackLabel::other());
    std::vector<std::string> many(30, "w");
    seqs.push_back(seq(many));
    ls.push_back(FeedbackLabel::other());
    h = length_distribution(seqs, ls, 20);
    CHECK(h.empty == 1);
    CHECK(h.bins.at(20).other == 1);
    CHECK(h.bins.count(0) == 0);
    CHECK(h.total() == 12);

    ls.pop_back();
    CHECK_THROWS_AS(length_distribution(seqs, ls), ValidationError);
}

TEST_CASE("length profiles") {
    // Spontaneous profile: short turns are mostly backchannels.
    std::vector<std::string> spoken, subs;
    for (int i = 0; i < 40; ++i) spoken.push_back(i % 4 ? "uh-huh" : "so we drove up to the lake");
    for (int i = 0; i < 40; ++i) subs.push_back(i % 4 ? "get in the car" : "what");
    const auto& lex = test_support::en();
    auto hist = [&](const std::vector<std::string>& texts) {
        const Corpus c = test_support::make_corpus(texts);
        const auto seqs = tokenize_corpus(c);
        return length_distribution(seqs, classify_tokens(seqs, lex));
    };
    const LengthHistogram a = hist(spoken), b = hist(subs);
    const auto share = [](const LengthHistogram& h) {
        std::size_t fb = 0, all = 0;
        for (std::size_t len = 1; len <= 2; ++len) {
            if (!h.bins.count(len)) continue;
            fb += h.bins.at(len).feedback;
            all += h.bins.at(len).feedback + h.bins.at(len).other;
        }
        return all ? static_cast<double>(fb) / static_cast<double>(all) : 0.0;
    };
    CHECK(share(a) > 0.9);
    CHECK(b.bins.at(4).other == 30);
    CHECK(share(a) > share(b) - 1e-12);
}

TEST_CASE("top feedback items") {
    std::vector<TokenSeq> seqs;
    std::vector<FeedbackLabel> ls;
    for (int i = 0; i < 7; ++i) {
        seqs.push_back(seq({"yeah"}));
        ls.push_back(pos());
    }
    for (int i = 0; i < 3; ++i) {
        seqs.push_back(seq({"mh"}));
        ls.push_back(neu());
    }
    seqs.push_back(seq({"went", "home"}));
    ls.push_back(FeedbackLabel::other());
    const auto top = top_feedback_items(seqs, ls, 5);
    REQUIRE(top.size() == 2);
    CHECK(top[0].form == "yeah");
    CHECK(top[0].count == 7);
    CHECK(top[0].label == "positive");
    CHECK(top[1].form == "mh");

    CHECK(top_feedback_items(std::vector<TokenSeq>{seq({"x"})}, std::vector<FeedbackLabel>{FeedbackLabel::other()}, 5)
              .empty());

    std::vector<TokenSeq> tie;
    std::vector<FeedbackLabel> tie_labels;
    for (int i = 0; i < 5; ++i) {
        tie.push_back(seq({"ok"}));
        tie.push_back(seq({"oh"}));
        tie_labels.push_back(pos());
        tie_labels.push_back(neu());
    }
    const auto t = top_feedback_items(tie, tie_labels, 2);
    REQUIRE(t.size() == 2);
    CHECK(t[0].form == "oh");
    CHECK(t[1].form == "ok");
    CHECK(top_feedback_items(tie, tie_labels, 1).size() == 1);
}
