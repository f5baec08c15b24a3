#include "feedback_lens/chart.hpp"

#include "feedback_lens/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace feedback_lens {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 70;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* const kFeedbackColor = "#3b6fb6";
const char* const kOtherColor = "#c8453b";

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

class Svg {
public:
    Svg() {
        body_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
                "\" font-family=\"sans-serif\" font-size=\"11\">\n"
                "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                "\" fill=\"#ffffff\"/>\n";
    }

    void rect(double x, double y, double w, double h, const char* fill, const std::string& tooltip = "") {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                 "\" fill=\"" + fill + "\"";
        if (tooltip.empty()) {
            body_ += "/>\n";
        } else {
            body_ += "><title>" + escape(tooltip) + "</title></rect>\n";
        }
    }

    void line(double x1, double y1, double x2, double y2, const char* stroke = "#333333") {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                 "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
    }

    void circle(double cx, double cy, double r, const char* fill, const std::string& tooltip) {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                 "\" fill-opacity=\"0.7\"><title>" + escape(tooltip) + "</title></circle>\n";
    }

    void text(double x, double y, const std::string& s, const char* anchor = "middle", double rotate = 0) {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"";
        if (rotate != 0) body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
        body_ += ">" + escape(s) + "</text>\n";
    }

    void title(const std::string& s) {
        if (!s.empty()) {
            body_ += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
                     escape(s) + "</text>\n";
        }
    }

    std::string finish() { return body_ + "</svg>\n"; }

private:
    std::string body_;
};

void axes(Svg& svg) {
    svg.line(kLeft, kTop + kPlotH, kLeft + kPlotW, kTop + kPlotH);
    svg.line(kLeft, kTop, kLeft, kTop + kPlotH);
}

struct Bar {
    std::string label;
    double value;  // in [0, 1]
};

std::string bar_chart(const std::vector<Bar>& bars, const std::string& title, const std::string& y_label) {
    Svg svg;
    svg.title(title);
    axes(svg);
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = kTop + kPlotH - kPlotH * tick / 4.0;
        svg.line(kLeft - 4, y, kLeft, y);
        svg.text(kLeft - 6, y + 4, num(tick * 25.0) + "%", "end");
    }
    svg.text(16, kTop + kPlotH / 2, y_label, "middle", -90);
    const double slot = kPlotW / static_cast<double>(bars.size());
    const double width = slot * 0.7;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = kPlotH * bars[i].value;
        const double x = kLeft + slot * static_cast<double>(i) + (slot - width) / 2;
        const std::string pct = num(100.0 * bars[i].value) + "%";
        svg.rect(x, kTop + kPlotH - h, width, h, bars[i].label == "other" ? kOtherColor : kFeedbackColor,
                 bars[i].label + ": " + pct);
        svg.text(x + width / 2, kTop + kPlotH - h - 4, pct);
        svg.text(x + width / 2, kTop + kPlotH + 16, bars[i].label);
    }
    return svg.finish();
}

void write(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string render_proportions_svg(const ProportionTable& table, const std::string& title) {
    if (table.rows.empty()) throw ValidationError("cannot chart an empty proportion table");
    std::vector<Bar> bars;
    for (const auto& r : table.rows) bars.push_back({r.label, r.proportion});
    return bar_chart(bars, title,
                     table.denominator == Denominator::all_utterances ? "share of all utterances"
                                                                     : "share of feedback utterances");
}

std::string render_group_proportions_svg(const GroupProportions& table, const std::string& title) {
    if (table.total == 0) throw ValidationError("cannot chart an empty group table");
    std::vector<Bar> bars;
    for (const auto& r : table.rows) bars.push_back({std::string(to_string(r.group)), r.percent / 100.0});
    return bar_chart(bars, title, "share of utterances");
}

std::string render_lengths_svg(const LengthHistogram& hist, const std::string& title) {
    if (hist.bins.empty()) throw ValidationError("cannot chart an empty length histogram");
    Svg svg;
    svg.title(title);
    axes(svg);
    std::size_t peak = 1;
    for (const auto& [len, bin] : hist.bins) peak = std::max(peak, bin.feedback + bin.other);
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = kTop + kPlotH - kPlotH * tick / 4.0;
        svg.line(kLeft - 4, y, kLeft, y);
        svg.text(kLeft - 6, y + 4, num(static_cast<double>(peak) * tick / 4.0), "end");
    }
    svg.text(kLeft + kPlotW / 2, kHeight - 30, "utterance length (tokens)");
    const double slot = kPlotW / static_cast<double>(hist.max_length);
    const double width = slot * 0.8;
    for (const auto& [len, bin] : hist.bins) {
        const double x = kLeft + slot * static_cast<double>(len - 1) + (slot - width) / 2;
        const double hf = kPlotH * static_cast<double>(bin.feedback) / static_cast<double>(peak);
        const double ho = kPlotH * static_cast<double>(bin.other) / static_cast<double>(peak);
        const std::string name = len == hist.max_length ? std::to_string(len) + "+" : std::to_string(len);
        svg.rect(x, kTop + kPlotH - hf, width, hf, kFeedbackColor,
                 name + " tokens, feedback: " + std::to_string(bin.feedback));
        svg.rect(x, kTop + kPlotH - hf - ho, width, ho, kOtherColor,
                 name + " tokens, other: " + std::to_string(bin.other));
        svg.text(x + width / 2, kTop + kPlotH + 14, name);
    }
    svg.rect(kLeft + kPlotW - 150, kTop, 10, 10, kFeedbackColor);
    svg.text(kLeft + kPlotW - 135, kTop + 9, "feedback", "start");
    svg.rect(kLeft + kPlotW - 80, kTop, 10, 10, kOtherColor);
    svg.text(kLeft + kPlotW - 65, kTop + 9, "other", "start");
    return svg.finish();
}

std::string render_terms_svg(const std::vector<TermStats>& terms, const std::string& title) {
    if (terms.empty()) throw ValidationError("cannot chart an empty term table");
    Svg svg;
    svg.title(title);
    axes(svg);
    // Both axes share one scale so the diagonal still marks equal association.
    double scale = 0;
    for (const auto& t : terms) scale = std::max({scale, t.fscore_a, t.fscore_b});
    if (scale <= 0) scale = 1;
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = tick / 4.0;
        svg.text(kLeft + kPlotW * v, kTop + kPlotH + 14, num(v * scale));
        svg.text(kLeft - 6, kTop + kPlotH - kPlotH * v + 4, num(v * scale), "end");
    }
    svg.line(kLeft, kTop + kPlotH, kLeft + kPlotW, kTop, "#bbbbbb");
    svg.text(kLeft + kPlotW / 2, kHeight - 30, "fscore_a");
    svg.text(16, kTop + kPlotH / 2, "fscore_b", "middle", -90);
    for (const auto& t : terms) {
        std::string term;
        for (const auto& tok : t.term) term += (term.empty() ? "" : " ") + tok;
        const char* color = t.fscore_a >= t.fscore_b ? kOtherColor : kFeedbackColor;
        svg.circle(kLeft + kPlotW * t.fscore_a / scale, kTop + kPlotH - kPlotH * t.fscore_b / scale, 3, color,
                   term + " (" + num(t.fscore_a) + ", " + num(t.fscore_b) + ")");
    }
    return svg.finish();
}

void emit_chart(const ProportionTable& table, const std::filesystem::path& path, const std::string& title) {
    write(path, render_proportions_svg(table, title));
}

void emit_chart(const GroupProportions& table, const std::filesystem::path& path, const std::string& title) {
    write(path, render_group_proportions_svg(table, title));
}

void emit_chart(const LengthHistogram& hist, const std::filesystem::path& path, const std::string& title) {
    write(path, render_lengths_svg(hist, title));
}

void emit_chart(const std::vector<TermStats>& terms, const std::filesystem::path& path, const std::string& title) {
    write(path, render_terms_svg(terms, title));
}

}  // namespace feedback_lens
