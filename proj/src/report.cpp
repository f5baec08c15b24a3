#include "feedback_lens/report.hpp"

#include "feedback_lens/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace feedback_lens {

using nlohmann::json;

namespace {

json parse_object(std::string_view text, std::string_view source_name) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(source_name) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw ValidationError(std::string(source_name) + ": expected a JSON object");
    return obj;
}

void expect_kind(const json& obj, std::string_view kind, std::string_view source_name) {
    if (!obj.contains("kind") || obj["kind"] != kind) {
        throw ValidationError(std::string(source_name) + ": expected a stats file of kind \"" + std::string(kind) +
                              "\"");
    }
}

const json& rows_of(const json& obj, std::string_view source_name) {
    if (!obj.contains("rows") || !obj["rows"].is_array()) {
        throw ValidationError(std::string(source_name) + ": missing array key \"rows\"");
    }
    return obj["rows"];
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

}  // namespace

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string proportions_to_json(const ProportionTable& table, const std::string& name) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"label", r.label}, {"count", r.count}, {"proportion", r.proportion},
                        {"percent", 100.0 * r.proportion}});
    }
    json j = {{"kind", "feedback_proportions"},
              {"name", name},
              {"denominator", std::string(to_string(table.denominator))},
              {"total", table.total},
              {"rows", rows}};
    return j.dump(2);
}

std::string group_proportions_to_json(const GroupProportions& table, const std::string& name) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"label", std::string(to_string(r.group))}, {"count", r.count},
                        {"proportion", r.percent / 100.0}, {"percent", r.percent}});
    }
    json j = {{"kind", "da_group_proportions"},
              {"name", name},
              {"denominator", "all_utterances"},
              {"total", table.total},
              {"rows", rows}};
    return j.dump(2);
}

std::string lengths_to_json(const LengthHistogram& hist, const std::string& name) {
    json bins = json::array();
    for (const auto& [len, bin] : hist.bins) {
        bins.push_back({{"length", len}, {"feedback", bin.feedback}, {"other", bin.other}});
    }
    json j = {{"kind", "length_histogram"},
              {"name", name},
              {"max_length", hist.max_length},
              {"empty", hist.empty},
              {"bins", bins}};
    return j.dump(2);
}

std::string stats_kind(std::string_view json_text, std::string_view source_name) {
    const json obj = parse_object(json_text, source_name);
    if (!obj.contains("kind") || !obj["kind"].is_string()) {
        throw ValidationError(std::string(source_name) + ": missing string key \"kind\"");
    }
    return obj["kind"].get<std::string>();
}

ProportionTable proportions_from_json(std::string_view json_text, std::string_view source_name) {
    const json obj = parse_object(json_text, source_name);
    expect_kind(obj, "feedback_proportions", source_name);
    ProportionTable t;
    try {
        t.denominator = obj.at("denominator") == "feedback_only" ? Denominator::feedback_only
                                                                  : Denominator::all_utterances;
        t.total = obj.at("total").get<std::size_t>();
        for (const auto& r : rows_of(obj, source_name)) {
            t.rows.push_back({r.at("label").get<std::string>(), r.at("count").get<std::size_t>(),
                              r.at("proportion").get<double>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string(source_name) + ": " + e.what());
    }
    return t;
}

GroupProportions group_proportions_from_json(std::string_view json_text, std::string_view source_name) {
    const json obj = parse_object(json_text, source_name);
    expect_kind(obj, "da_group_proportions", source_name);
    GroupProportions t;
    for (DAGroup g : kDAGroups) t.rows[static_cast<std::size_t>(g)].group = g;
    try {
        t.total = obj.at("total").get<std::size_t>();
        for (const auto& r : rows_of(obj, source_name)) {
            auto g = parse_da_group(r.at("label").get<std::string>());
            if (!g) throw ValidationError(std::string(source_name) + ": unknown group " + r.at("label").dump());
            auto& row = t.rows[static_cast<std::size_t>(*g)];
            row.count = r.at("count").get<std::size_t>();
            row.percent = r.at("percent").get<double>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string(source_name) + ": " + e.what());
    }
    return t;
}

LengthHistogram lengths_from_json(std::string_view json_text, std::string_view source_name) {
    const json obj = parse_object(json_text, source_name);
    expect_kind(obj, "length_histogram", source_name);
    LengthHistogram h;
    try {
        h.max_length = obj.at("max_length").get<std::size_t>();
        h.empty = obj.at("empty").get<std::size_t>();
        for (const auto& b : obj.at("bins")) {
            h.bins[b.at("length").get<std::size_t>()] = {b.at("feedback").get<std::size_t>(),
                                                         b.at("other").get<std::size_t>()};
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string(source_name) + ": " + e.what());
    }
    return h;
}

std::vector<PercentRow> read_percent_rows(std::string_view json_text, std::string_view source_name) {
    const json obj = parse_object(json_text, source_name);
    std::vector<PercentRow> out;
    for (const auto& r : rows_of(obj, source_name)) {
        if (!r.is_object() || !r.contains("label") || !r["label"].is_string()) {
            throw ValidationError(std::string(source_name) + ": every row needs a string \"label\"");
        }
        PercentRow row{r["label"].get<std::string>(), 0.0};
        if (r.contains("percent") && r["percent"].is_number()) {
            row.percent = r["percent"].get<double>();
        } else if (r.contains("proportion") && r["proportion"].is_number()) {
            row.percent = 100.0 * r["proportion"].get<double>();
        } else {
            throw ValidationError(std::string(source_name) + ": row \"" + row.label +
                                  "\" has neither \"percent\" nor \"proportion\"");
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<DeltaRow> compare_percentages(const std::vector<PercentRow>& a, const std::vector<PercentRow>& b) {
    auto lookup = [](const std::vector<PercentRow>& rows, const std::string& label) {
        for (const auto& r : rows) {
            if (r.label == label) return r.percent;
        }
        return 0.0;
    };
    std::vector<DeltaRow> out;
    auto seen = [&](const std::string& label) {
        for (const auto& d : out) {
            if (d.label == label) return true;
        }
        return false;
    };
    for (const auto* side : {&a, &b}) {
        for (const auto& r : *side) {
            if (seen(r.label)) continue;
            DeltaRow d{r.label, lookup(a, r.label), lookup(b, r.label), 0.0};
            d.delta_pp = d.b_percent - d.a_percent;
            out.push_back(std::move(d));
        }
    }
    return out;
}

void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& rows) {
    out << "label,a_percent,b_percent,delta_pp\n";
    for (const auto& r : rows) {
        out << r.label << ',' << format_fixed2(r.a_percent) << ',' << format_fixed2(r.b_percent) << ','
            << format_fixed2(r.delta_pp) << '\n';
    }
}

void write_top_items_csv(std::ostream& out, const std::vector<FeedbackItem>& items) {
    out << "rank,item,count,label\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::string item = items[i].form;
        if (item.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : item) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            item = quoted + "\"";
        }
        out << (i + 1) << ',' << item << ',' << items[i].count << ',' << items[i].label << '\n';
    }
}

void write_lengths_csv(std::ostream& out, const LengthHistogram& hist) {
    out << "length,feedback,other\n";
    for (const auto& [len, bin] : hist.bins) {
        out << (len == hist.max_length ? std::to_string(len) + "+" : std::to_string(len)) << ',' << bin.feedback
            << ',' << bin.other << '\n';
    }
    out << "empty,0," << hist.empty << '\n';
}

std::vector<TermStats> read_terms_csv(std::istream& in, std::string_view source_name) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "term,count_a,count_b,precision_a,frequency_a,fscore_a,precision_b,frequency_b,fscore_b") {
        throw ValidationError(std::string(source_name) + ": not a term statistics CSV");
    }
    std::vector<TermStats> out;
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) {
            throw ValidationError(std::string(source_name) + ":" + std::to_string(line_no) + ": expected 9 fields");
        }
        TermStats t;
        std::istringstream words(f[0]);
        for (std::string w; words >> w;) t.term.push_back(w);
        try {
            t.count_a = std::stoull(f[1]);
            t.count_b = std::stoull(f[2]);
            t.precision_a = std::stod(f[3]);
            t.frequency_a = std::stod(f[4]);
            t.fscore_a = std::stod(f[5]);
            t.precision_b = std::stod(f[6]);
            t.frequency_b = std::stod(f[7]);
            t.fscore_b = std::stod(f[8]);
        } catch (const std::exception&) {
            throw ValidationError(std::string(source_name) + ":" + std::to_string(line_no) + ": bad number");
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace feedback_lens
