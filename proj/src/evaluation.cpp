#include "feedback_lens/evaluation.hpp"

#include "feedback_lens/errors.hpp"
#include "feedback_lens/normalize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

namespace feedback_lens {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), cells_(labels_.size() * labels_.size(), 0) {
    std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) throw ValidationError("confusion matrix labels must be distinct");
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t n = 0;
    for (auto c : cells_) n += c;
    return n;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) n += cell(i, i);
    return n;
}

std::optional<std::size_t> ConfusionMatrix::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(const std::string& gold, const std::string& pred, std::uint64_t n) {
    auto g = index_of(gold);
    auto p = index_of(pred);
    if (!g) throw ValidationError("gold label \"" + gold + "\" is not in the label universe");
    if (!p) throw ValidationError("predicted label \"" + pred + "\" is not in the label universe");
    cells_[*g * size() + *p] += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.labels_ != labels_) throw ValidationError("cannot merge confusion matrices over different labels");
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
}

ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred,
                                 std::optional<std::vector<std::string>> universe) {
    if (gold.size() != pred.size()) {
        throw ValidationError("gold has " + std::to_string(gold.size()) + " labels but pred has " +
                              std::to_string(pred.size()));
    }
    if (gold.empty()) throw ValidationError("cannot build a confusion matrix from empty label lists");
    if (!universe) {
        std::set<std::string> all(gold.begin(), gold.end());
        all.insert(pred.begin(), pred.end());
        universe.emplace(all.begin(), all.end());
    }
    ConfusionMatrix cm(std::move(*universe));
    for (std::size_t i = 0; i < gold.size(); ++i) cm.add(gold[i], pred[i]);
    return cm;
}

const ClassMetrics* MetricsReport::find(const std::string& label) const {
    for (const auto& c : classes) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

MetricsReport prf_metrics(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw ValidationError("cannot score an empty confusion matrix");
    MetricsReport r;
    r.total = total;
    r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

    const std::size_t n = cm.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t predicted = 0, support = 0;
        for (std::size_t j = 0; j < n; ++j) {
            predicted += cm.cell(j, k);
            support += cm.cell(k, j);
        }
        const auto tp = static_cast<double>(cm.cell(k, k));
        ClassMetrics m;
        m.label = cm.labels()[k];
        m.support = support;
        m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
        m.recall = support ? tp / static_cast<double>(support) : 0.0;
        m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        r.classes.push_back(m);

        r.macro.precision += m.precision;
        r.macro.recall += m.recall;
        r.macro.f1 += m.f1;
        const auto w = static_cast<double>(support);
        r.weighted.precision += w * m.precision;
        r.weighted.recall += w * m.recall;
        r.weighted.f1 += w * m.f1;
    }
    const auto classes = static_cast<double>(n);
    r.macro.precision /= classes;
    r.macro.recall /= classes;
    r.macro.f1 /= classes;
    const auto t = static_cast<double>(total);
    r.weighted.precision /= t;
    r.weighted.recall /= t;
    r.weighted.f1 /= t;
    return r;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pad_right(const std::string& s, std::size_t width) {
    const std::size_t len = codepoint_count(s);
    return len >= width ? s : s + std::string(width - len, ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
    const std::size_t len = codepoint_count(s);
    return len >= width ? s : std::string(width - len, ' ') + s;
}

std::string with_thousands(std::uint64_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return out;
}

nlohmann::json averages_json(const AverageMetrics& a) {
    return {{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}

}  // namespace

std::string format_metrics_table(const MetricsReport& report, const std::string& first_column) {
    std::size_t name_width = std::max<std::size_t>(codepoint_count(first_column), 12);
    for (const auto& c : report.classes) name_width = std::max(name_width, codepoint_count(c.label));
    const std::size_t num = 6, count = 13;

    std::string out;
    auto row = [&](const std::string& name, double p, double r, double f, std::uint64_t support) {
        out += pad_right(name, name_width) + pad_left(fixed2(p), num) + pad_left(fixed2(r), num) +
               pad_left(fixed2(f), num) + pad_left(with_thousands(support), count) + "\n";
    };
    const std::string header = pad_right(first_column, name_width) + pad_left("P", num) + pad_left("R", num) +
                               pad_left("F1", num) + pad_left("# instances", count);
    const std::string rule(codepoint_count(header), '-');
    out += header + "\n" + rule + "\n";
    for (const auto& c : report.classes) row(c.label, c.precision, c.recall, c.f1, c.support);
    out += rule + "\n";
    row("Macro avg", report.macro.precision, report.macro.recall, report.macro.f1, report.total);
    row("Weighted avg", report.weighted.precision, report.weighted.recall, report.weighted.f1, report.total);
    out += pad_right("Accuracy", name_width) + pad_left(fixed2(report.accuracy), num) + "\n";
    return out;
}

std::string metrics_to_json(const MetricsReport& report, int indent) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : report.classes) {
        classes.push_back({{"label", c.label},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support}});
    }
    nlohmann::json j = {{"classes", classes},
                        {"accuracy", report.accuracy},
                        {"macro_avg", averages_json(report.macro)},
                        {"weighted_avg", averages_json(report.weighted)},
                        {"total", report.total}};
    return j.dump(indent);
}

BinaryCueEvaluation evaluate_binary_cues(const Corpus& c, const CueLexicon& lex, const SwbdMapping& mapping,
                                         const ClassifierOptions& opts) {
    if (c.manifest.language != lex.language()) {
        throw ValidationError("language mismatch between corpus \"" + c.manifest.name + "\" and the lexicon");
    }
    BinaryCueEvaluation out;
    for (const Utterance& u : c.utterances) {
        if (!u.gold_da_tag || normalize_tag(*u.gold_da_tag).empty()) {
            ++out.skipped_untagged;
            continue;
        }
        const BinaryGroup gold = to_binary_group(*u.gold_da_tag, mapping);
        const FeedbackLabel label = classify_utterance(tokenize(u.text, c.manifest.language), lex, opts);
        const BinaryGroup pred = label.is_feedback() ? BinaryGroup::feedback : BinaryGroup::other;
        out.matrix.add(std::string(to_string(gold)), std::string(to_string(pred)));
        ++out.evaluated;
    }
    if (out.evaluated == 0) throw ValidationError("no utterances with gold dialogue act tags to evaluate");
    out.report = prf_metrics(out.matrix);
    return out;
}

}  // namespace feedback_lens
