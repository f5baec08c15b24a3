#include "feedback_lens/da_pipeline.hpp"

#include "feedback_lens/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace feedback_lens {

using nlohmann::json;

std::string_view to_string(DAGroup g) {
    switch (g) {
        case DAGroup::forward_looking: return "forward_looking";
        case DAGroup::other: return "other";
        case DAGroup::assessment: return "assessment";
        case DAGroup::backchannel: return "backchannel";
        case DAGroup::yes_no_answer: return "yes_no_answer";
    }
    return "?";
}

std::optional<DAGroup> parse_da_group(std::string_view name) {
    for (DAGroup g : kDAGroups) {
        if (to_string(g) == name) return g;
    }
    return std::nullopt;
}

std::string_view to_string(BinaryGroup g) { return g == BinaryGroup::feedback ? "feedback" : "other"; }

std::string normalize_tag(std::string_view tag) {
    std::string out;
    out.reserve(tag.size());
    for (unsigned char c : tag) {
        if (std::isspace(c)) continue;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

SwbdMapping::SwbdMapping(std::map<std::string, DAGroup> map, DAGroup fallback) : fallback_(fallback) {
    for (auto& [tag, group] : map) map_.emplace(normalize_tag(tag), group);
}

const SwbdMapping& SwbdMapping::builtin() {
    static const SwbdMapping mapping = [] {
        std::map<std::string, DAGroup> m;
        auto add = [&](DAGroup g, std::initializer_list<const char*> tags) {
            for (const char* t : tags) m[t] = g;
        };
        // Table rows, with slash pairs also listed by component. "bf" appears in
        // both the forward-looking and backchannel rows; it is a summarize/reformulate
        // backchannel, so only the backchannel entry is kept.
        add(DAGroup::forward_looking, {"sd", "fx/sv", "fx", "sv", "na", "ny^e", "arp", "nd", "no", "cc", "co",
                                       "oo", "ad", "qr/qy", "qr", "qy", "qw", "qw^d", "qh", "qo", "arp_nd",
                                       "oo_co_cc"});
        add(DAGroup::backchannel, {"b", "bk", "bh", "bf", "br"});
        add(DAGroup::assessment, {"aa", "fe/ba", "fe", "ba"});
        add(DAGroup::yes_no_answer, {"ny", "nn"});
        return SwbdMapping(std::move(m), DAGroup::other);
    }();
    return mapping;
}

DAGroup SwbdMapping::map(std::string_view tag) const {
    auto it = map_.find(normalize_tag(tag));
    return it == map_.end() ? fallback_ : it->second;
}

SwbdMapping parse_mapping(std::string_view json_text, std::string_view source_name) {
    const std::string where = std::string(source_name) + ": ";
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + "malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw ValidationError(where + "mapping must be a JSON object");
    auto group_of = [&](const json& v, const std::string& what) {
        if (!v.is_string()) throw ValidationError(where + what + " must be a group name");
        auto g = parse_da_group(v.get<std::string>());
        if (!g) throw ValidationError(where + "unknown group \"" + v.get<std::string>() + "\" for " + what);
        return *g;
    };
    DAGroup fallback = DAGroup::other;
    if (auto it = obj.find("default"); it != obj.end()) fallback = group_of(*it, "default");
    auto map_it = obj.find("map");
    if (map_it == obj.end() || !map_it->is_object()) throw ValidationError(where + "missing object key \"map\"");
    std::map<std::string, DAGroup> m;
    for (const auto& [tag, value] : map_it->items()) {
        const std::string norm = normalize_tag(tag);
        if (norm.empty()) throw ValidationError(where + "empty tag in map");
        if (!m.emplace(norm, group_of(value, "tag \"" + tag + "\"")).second) {
            throw ValidationError(where + "tag \"" + tag + "\" is mapped more than once");
        }
    }
    return SwbdMapping(std::move(m), fallback);
}

SwbdMapping load_mapping(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mapping(ss.str(), path.string());
}

DAGroup map_swbd_tag(std::string_view tag, const SwbdMapping& m) { return m.map(tag); }

bool is_abandoned_tag(std::string_view tag) {
    const std::string norm = normalize_tag(tag);
    return norm == "%" || norm == "%-";
}

BinaryGroup to_binary_group(DAGroup g) {
    return g == DAGroup::backchannel || g == DAGroup::assessment ? BinaryGroup::feedback : BinaryGroup::other;
}

BinaryGroup to_binary_group(std::string_view fine_tag, const SwbdMapping& m) {
    if (is_abandoned_tag(fine_tag)) return BinaryGroup::other;
    return to_binary_group(m.map(fine_tag));
}

void validate(const ProbVector& p) {
    double sum = 0.0;
    for (DAGroup g : kDAGroups) {
        const double v = p[static_cast<std::size_t>(g)];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("probability for " + std::string(to_string(g)) + " is outside [0, 1]");
        }
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kProbabilitySumTolerance) {
        std::ostringstream msg;
        msg << "probabilities sum to " << sum << ", not 1 (tolerance " << kProbabilitySumTolerance << ")";
        throw ValidationError(msg.str());
    }
}

void ThresholdConfig::validate() const {
    for (DAGroup g : kDAGroups) {
        const double t = (*this)[g];
        if (!(t > 0.0 && t < 1.0)) {
            throw ValidationError("threshold for " + std::string(to_string(g)) + " must lie in (0, 1)");
        }
    }
}

ThresholdConfig parse_thresholds(std::string_view json_text, ThresholdConfig base, std::string_view source_name) {
    const std::string where = std::string(source_name) + ": ";
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + "malformed JSON: " + e.what());
    }
    const json* table = &obj;
    if (obj.is_object() && obj.contains("thresholds")) table = &obj["thresholds"];
    if (!table->is_object()) throw ValidationError(where + "thresholds must be a JSON object");
    for (const auto& [name, value] : table->items()) {
        auto g = parse_da_group(name);
        if (!g) throw ValidationError(where + "unknown group \"" + name + "\"");
        if (!value.is_number()) throw ValidationError(where + "threshold for " + name + " must be a number");
        base[*g] = value.get<double>();
    }
    base.validate();
    return base;
}

DAGroup decide_label(const ProbVector& p, const ThresholdConfig& t) {
    validate(p);
    std::optional<DAGroup> best;
    for (DAGroup g : kDAGroups) {
        const double v = p[static_cast<std::size_t>(g)];
        if (v >= t[g] && (!best || v > p[static_cast<std::size_t>(*best)])) best = g;
    }
    if (best) return *best;
    // Nothing met its threshold: skip forward_looking to counter the majority-class bias.
    DAGroup fallback = DAGroup::other;
    for (DAGroup g : kDAGroups) {
        if (g == DAGroup::forward_looking) continue;
        if (p[static_cast<std::size_t>(g)] > p[static_cast<std::size_t>(fallback)]) fallback = g;
    }
    return fallback;
}

std::vector<ProbRecord> parse_probability_records(std::istream& in, std::string_view source_name) {
    std::vector<ProbRecord> out;
    std::unordered_set<std::string> ids;
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
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string()) {
            throw ValidationError(where + "missing string key \"id\"");
        }
        ProbRecord rec;
        rec.id = obj["id"].get<std::string>();
        if (!obj.contains("probs") || !obj["probs"].is_object()) {
            throw ValidationError(where + "missing object key \"probs\" for id \"" + rec.id + "\"");
        }
        const json& probs = obj["probs"];
        for (const auto& [name, value] : probs.items()) {
            if (!parse_da_group(name)) throw ValidationError(where + "unknown group \"" + name + "\"");
        }
        for (DAGroup g : kDAGroups) {
            const std::string name(to_string(g));
            auto it = probs.find(name);
            if (it == probs.end()) {
                throw ValidationError(where + "missing group \"" + name + "\" for id \"" + rec.id + "\"");
            }
            if (!it->is_number()) throw ValidationError(where + "probability \"" + name + "\" must be a number");
            rec.probs[static_cast<std::size_t>(g)] = it->get<double>();
        }
        try {
            validate(rec.probs);
        } catch (const ValidationError& e) {
            throw ValidationError(where + "id \"" + rec.id + "\": " + e.what());
        }
        if (!ids.insert(rec.id).second) throw ValidationError(where + "duplicate id \"" + rec.id + "\"");
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ProbRecord> read_probability_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_probability_records(in, path.string());
}

GroupProportions group_proportions(std::span<const DAGroup> labels) {
    if (labels.empty()) throw ValidationError("cannot compute group proportions of an empty label list");
    GroupProportions out;
    out.total = labels.size();
    for (DAGroup g : kDAGroups) out.rows[static_cast<std::size_t>(g)].group = g;
    for (DAGroup g : labels) ++out.rows[static_cast<std::size_t>(g)].count;
    for (auto& row : out.rows) {
        row.percent = 100.0 * static_cast<double>(row.count) / static_cast<double>(out.total);
    }
    return out;
}

}  // namespace feedback_lens
