#include "feedback_lens/cli.hpp"

#include "feedback_lens/chart.hpp"
#include "feedback_lens/corpus_io.hpp"
#include "feedback_lens/cue_lexicon.hpp"
#include "feedback_lens/da_pipeline.hpp"
#include "feedback_lens/errors.hpp"
#include "feedback_lens/evaluation.hpp"
#include "feedback_lens/lexical_stats.hpp"
#include "feedback_lens/report.hpp"
#include "feedback_lens/rule_classifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#ifndef FEEDBACK_LENS_DATA_DIR
#define FEEDBACK_LENS_DATA_DIR "data"
#endif

namespace feedback_lens::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class LogLevel { error, warn, info };

class Log {
public:
    explicit Log(std::ostream& err) : err_(err) {}
    void set_level(LogLevel level) { level_ = level; }
    void warn(const std::string& msg) const {
        if (level_ >= LogLevel::warn) err_ << "feedback-lens: warning: " << msg << '\n';
    }
    void info(const std::string& msg) const {
        if (level_ >= LogLevel::info) err_ << "feedback-lens: " << msg << '\n';
    }

private:
    std::ostream& err_;
    LogLevel level_ = LogLevel::warn;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return buf.str();
}

// "-" or an empty path means standard output. Content is buffered and only
// written on close(), so a failed command never truncates an existing file.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : path_(path.empty() ? "-" : path), out_(out) {}
    std::ostream& stream() { return buf_; }
    void close() {
        if (path_ == "-") {
            out_ << buf_.str();
            out_.flush();
            return;
        }
        std::ofstream file(path_, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open " + path_ + " for writing");
        file << buf_.str();
        file.flush();
        if (!file) throw IoError("failed writing " + path_);
    }

private:
    std::string path_;
    std::ostream& out_;
    std::ostringstream buf_;
};

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<json> out;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error&) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed JSON");
        }
        if (!out.back().is_object()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected a JSON object");
        }
    }
    return out;
}

// --- settings ------------------------------------------------------------

struct Settings {
    ClassifierOptions classifier;
    FilterPolicy filter;
    bool apply_filter = false;
    bool strip_markup = false;
    ThresholdConfig thresholds;
    std::optional<std::string> lexicon_dir;
};

bool get_bool(const json& obj, const std::string& key, const std::string& where) {
    if (!obj[key].is_boolean()) throw ValidationError(where + ": \"" + key + "\" must be true or false");
    return obj[key].get<bool>();
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where) {
    if (!obj[key].is_number_unsigned()) {
        throw ValidationError(where + ": \"" + key + "\" must be a non-negative integer");
    }
    return obj[key].get<std::uint64_t>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ValidationError(where + ": unknown key \"" + key + "\"");
    }
}

void apply_config(const fs::path& path, Settings& s) {
    const std::string where = path.string();
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    check_keys(cfg, {"thresholds", "filter", "classifier", "lexicon_dir"}, where);
    if (cfg.contains("thresholds")) {
        s.thresholds = parse_thresholds(cfg["thresholds"].dump(), s.thresholds, where);
    }
    if (cfg.contains("lexicon_dir")) {
        if (!cfg["lexicon_dir"].is_string()) throw ValidationError(where + ": \"lexicon_dir\" must be a string");
        s.lexicon_dir = cfg["lexicon_dir"].get<std::string>();
    }
    if (cfg.contains("classifier")) {
        const json& c = cfg["classifier"];
        const std::string w = where + ": classifier";
        check_keys(c, {"include_initial", "initial_in_short", "include_extras", "short_limit", "threads"}, w);
        if (c.contains("include_initial")) s.classifier.include_initial = get_bool(c, "include_initial", w);
        if (c.contains("initial_in_short")) s.classifier.initial_in_short = get_bool(c, "initial_in_short", w);
        if (c.contains("include_extras")) s.classifier.include_extras = get_bool(c, "include_extras", w);
        if (c.contains("short_limit")) s.classifier.short_limit = get_count(c, "short_limit", w);
        if (c.contains("threads")) s.classifier.threads = get_count(c, "threads", w);
    }
    if (cfg.contains("filter")) {
        const json& f = cfg["filter"];
        const std::string w = where + ": filter";
        check_keys(f,
                   {"enabled", "min_year", "min_utterances", "excluded_genres", "drop_single_character_utterances",
                    "drop_empty_utterances", "corpus_rules_subtitles_only", "strip_markup"},
                   w);
        if (f.contains("enabled")) s.apply_filter = get_bool(f, "enabled", w);
        if (f.contains("min_year")) {
            if (!f["min_year"].is_number_integer()) throw ValidationError(w + ": \"min_year\" must be an integer");
            s.filter.min_year = f["min_year"].get<int>();
        }
        if (f.contains("min_utterances")) s.filter.min_utterances = get_count(f, "min_utterances", w);
        if (f.contains("excluded_genres")) {
            const json& g = f["excluded_genres"];
            if (!g.is_array()) throw ValidationError(w + ": \"excluded_genres\" must be an array of strings");
            s.filter.excluded_genres.clear();
            for (const auto& item : g) {
                if (!item.is_string()) throw ValidationError(w + ": \"excluded_genres\" must be an array of strings");
                s.filter.excluded_genres.push_back(item.get<std::string>());
            }
        }
        if (f.contains("drop_single_character_utterances")) {
            s.filter.drop_single_character_utterances = get_bool(f, "drop_single_character_utterances", w);
        }
        if (f.contains("drop_empty_utterances")) {
            s.filter.drop_empty_utterances = get_bool(f, "drop_empty_utterances", w);
        }
        if (f.contains("corpus_rules_subtitles_only")) {
            s.filter.corpus_rules_subtitles_only = get_bool(f, "corpus_rules_subtitles_only", w);
        }
        if (f.contains("strip_markup")) s.strip_markup = get_bool(f, "strip_markup", w);
    }
}

// --- shared option groups ------------------------------------------------

struct ClassifierFlags {
    bool no_initial = false;
    bool no_initial_in_short = false;
    bool extras = false;
    std::size_t short_limit = 3;
    std::size_t threads = 1;
    CLI::Option* limit_opt = nullptr;
    CLI::Option* threads_opt = nullptr;

    void add(CLI::App* sub) {
        sub->add_flag("--no-initial", no_initial, "Only match cues that span the whole utterance");
        sub->add_flag("--no-initial-in-short", no_initial_in_short,
                      "Skip first-token matches inside very short utterances");
        sub->add_flag("--extras", extras, "Also report politeness and emoji extras");
        limit_opt = sub->add_option("--short-limit", short_limit, "Token limit for very short utterances");
        threads_opt = sub->add_option("--threads", threads, "Worker threads");
    }

    void apply(ClassifierOptions& o) const {
        if (no_initial) o.include_initial = false;
        if (no_initial_in_short) o.initial_in_short = false;
        if (extras) o.include_extras = true;
        if (limit_opt && limit_opt->count()) o.short_limit = short_limit;
        if (threads_opt && threads_opt->count()) o.threads = threads;
        if (o.short_limit < 1) throw ValidationError("--short-limit must be at least 1");
    }
};

struct CorpusArgs {
    std::string corpus;
    std::string manifest;
    std::string lexicon;
    CLI::Option* corpus_opt = nullptr;

    void add(CLI::App* sub, const std::string& prefix = "", bool with_lexicon = true) {
        corpus_opt = sub->add_option("--" + prefix + "corpus", corpus, "Utterances (JSONL)");
        sub->add_option("--" + prefix + "manifest", manifest, "Corpus manifest (JSON)");
        if (with_lexicon) sub->add_option("--lexicon", lexicon, "Cue lexicon (defaults to <lexicon dir>/<lang>.json)");
    }

    bool given() const { return !corpus.empty(); }
};

struct Classified {
    Corpus corpus;
    std::vector<TokenSeq> seqs;
    std::vector<FeedbackLabel> labels;
};

class Runner {
public:
    Runner(std::ostream& out, Log& log) : out_(out), log_(log) {}

    Settings settings;

    std::ostream& out() { return out_; }
    const Log& log() const { return log_; }

    Corpus load_corpus(const CorpusArgs& a, const std::string& label = "--corpus") const {
        if (a.corpus.empty()) throw ValidationError(label + " is required");
        if (a.manifest.empty()) throw ValidationError("a manifest is required for " + a.corpus);
        Corpus c = parse_corpus(a.corpus, a.manifest);
        if (settings.apply_filter) {
            FilterPolicy policy = settings.filter;
            if (settings.strip_markup) policy.markup = MarkupRuleSet::defaults();
            FilterResult r = filter_corpus(c, policy);
            if (r.report.rejection_reason) {
                throw ValidationError("corpus \"" + c.manifest.name + "\" rejected: " + *r.report.rejection_reason);
            }
            log_.info("filter " + c.manifest.name + ": kept " + std::to_string(r.report.kept) + " of " +
                      std::to_string(r.report.input_utterances) + " (single character " +
                      std::to_string(r.report.removed_single_character) + ", empty " +
                      std::to_string(r.report.removed_empty) + ")");
            if (r.report.unmatched_brackets) {
                log_.warn(std::to_string(r.report.unmatched_brackets) + " unmatched markup brackets in " + a.corpus);
            }
            return std::move(r.corpus);
        }
        if (settings.strip_markup) {
            const MarkupRuleSet rules = MarkupRuleSet::defaults();
            MarkupWarnings warnings;
            for (auto& u : c.utterances) u = strip_markup(u, rules, &warnings);
            if (warnings.unmatched_brackets) {
                log_.warn(std::to_string(warnings.unmatched_brackets) + " unmatched markup brackets in " + a.corpus);
            }
        }
        return c;
    }

    CueLexicon load_lexicon_for(const std::string& explicit_path, Language lang) const {
        fs::path path;
        if (!explicit_path.empty()) {
            path = explicit_path;
        } else {
            fs::path dir;
            if (settings.lexicon_dir) {
                dir = *settings.lexicon_dir;
            } else if (const char* env = std::getenv("FEEDBACK_LENS_LEXICON_DIR"); env && *env) {
                dir = env;
            } else {
                dir = fs::path(FEEDBACK_LENS_DATA_DIR) / "lexicons";
            }
            path = dir / (std::string(to_string(lang)) + ".json");
        }
        LexiconLoadReport report;
        CueLexicon lex = load_lexicon(path, &report);
        if (report.within_class_duplicates) {
            log_.info(path.string() + ": " + std::to_string(report.within_class_duplicates) +
                      " duplicate cues within a class");
        }
        if (!report.cross_class_duplicates.empty()) {
            log_.info(path.string() + ": " + std::to_string(report.cross_class_duplicates.size()) +
                      " cues listed under several classes");
        }
        return lex;
    }

    Classified classify(const CorpusArgs& a, const ClassifierFlags& flags) const {
        Classified r;
        r.corpus = load_corpus(a);
        ClassifierOptions opts = settings.classifier;
        flags.apply(opts);
        const CueLexicon lex = load_lexicon_for(a.lexicon, r.corpus.manifest.language);
        if (lex.language() != r.corpus.manifest.language) {
            throw ValidationError("corpus language " + std::string(to_string(r.corpus.manifest.language)) +
                                  " does not match lexicon language " + std::string(to_string(lex.language())));
        }
        r.seqs = tokenize_corpus(r.corpus);
        r.labels = classify_tokens(r.seqs, lex, opts);
        return r;
    }

private:
    std::ostream& out_;
    Log& log_;
};

Denominator parse_denominator(const std::string& s) {
    if (s == "all" || s == "all_utterances") return Denominator::all_utterances;
    if (s == "feedback" || s == "feedback_only") return Denominator::feedback_only;
    throw ValidationError("--denominator must be all or feedback, got \"" + s + "\"");
}

void check_format(const std::string& format) {
    if (format != "json" && format != "csv") throw ValidationError("--format must be json or csv");
}

void write_proportions_csv(std::ostream& os, const ProportionTable& t) {
    os << "label,count,percent\n";
    for (const auto& r : t.rows) os << r.label << ',' << r.count << ',' << format_fixed2(100.0 * r.proportion) << '\n';
}

void write_group_csv(std::ostream& os, const GroupProportions& t) {
    os << "label,count,percent\n";
    for (const auto& r : t.rows) os << to_string(r.group) << ',' << r.count << ',' << format_fixed2(r.percent) << '\n';
}

std::vector<DAGroup> read_groups(const fs::path& path) {
    std::vector<DAGroup> groups;
    std::size_t n = 0;
    for (const json& rec : read_jsonl(path)) {
        ++n;
        if (!rec.contains("group") || !rec["group"].is_string()) {
            throw ValidationError(path.string() + ": record " + std::to_string(n) + " has no string \"group\"");
        }
        auto g = parse_da_group(rec["group"].get<std::string>());
        if (!g) throw ValidationError(path.string() + ": unknown group " + rec["group"].dump());
        groups.push_back(*g);
    }
    return groups;
}

std::vector<std::pair<std::string, std::string>> read_id_field(const fs::path& path, const std::string& field) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    std::size_t n = 0;
    for (const json& rec : read_jsonl(path)) {
        ++n;
        const std::string where = path.string() + ": record " + std::to_string(n);
        if (!rec.contains("id") || !rec["id"].is_string()) throw ValidationError(where + " has no string \"id\"");
        if (!rec.contains(field) || !rec[field].is_string()) {
            throw ValidationError(where + " has no string \"" + field + "\"");
        }
        std::string id = rec["id"].get<std::string>();
        if (!seen.insert(id).second) throw ValidationError(where + ": duplicate id \"" + id + "\"");
        out.emplace_back(std::move(id), rec[field].get<std::string>());
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Log log(err);
    Runner runner(out, log);

    CLI::App app{"Feedback cue detection and corpus statistics for dialogue transcripts", "feedback-lens"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::string log_level = "warn";
    app.add_option("--config", config_path, "JSON config supplying thresholds, filter and classifier settings");
    app.add_option("--log-level", log_level, "error, warn or info")->check(CLI::IsMember({"error", "warn", "info"}));
    app.add_flag("--filter", runner.settings.apply_filter, "Apply the corpus filter policy before processing");
    app.add_flag("--strip-markup", runner.settings.strip_markup, "Strip transcription markup before processing");

    // classify
    CorpusArgs classify_in;
    ClassifierFlags classify_flags;
    std::string classify_out, classify_summary;
    auto* classify = app.add_subcommand("classify", "Label every utterance with its feedback class");
    classify_in.add(classify);
    classify_flags.add(classify);
    classify->add_option("--out", classify_out, "Label records (JSONL), - for stdout");
    classify->add_option("--summary", classify_summary, "Also write label counts (JSON)");

    // stats-proportions
    CorpusArgs prop_in;
    ClassifierFlags prop_flags;
    std::string prop_labels, prop_groups, prop_out, prop_name, prop_denominator = "all", prop_format = "json";
    auto* prop = app.add_subcommand("stats-proportions", "Feedback class or dialogue act group proportions");
    prop_in.add(prop);
    prop_flags.add(prop);
    prop->add_option("--labels", prop_labels, "Label records from classify");
    prop->add_option("--groups", prop_groups, "Group records from da-decide");
    prop->add_option("--denominator", prop_denominator, "all or feedback");
    prop->add_option("--name", prop_name, "Name stored in the stats file");
    prop->add_option("--format", prop_format, "json or csv");
    prop->add_option("--out", prop_out, "Output path, - for stdout");

    // stats-terms
    CorpusArgs terms_a, terms_b;
    std::string terms_out, terms_scope = "short";
    std::size_t terms_n_max = 1, terms_top_k = 20, terms_short_limit = 3;
    bool terms_all = false;
    auto* terms = app.add_subcommand("stats-terms", "Scaled f-scores of terms in two corpora");
    terms_a.add(terms, "a-", false);
    terms_b.add(terms, "b-", false);
    terms->add_option("--n-max", terms_n_max, "Longest n-gram");
    terms->add_option("--top-k", terms_top_k, "Terms kept per corpus");
    terms->add_option("--scope", terms_scope, "short (very short utterances) or all");
    terms->add_option("--short-limit", terms_short_limit, "Token limit for very short utterances");
    terms->add_flag("--all-terms", terms_all, "Write every term instead of the top-k union");
    terms->add_option("--out", terms_out, "Output CSV, - for stdout");

    // stats-lengths
    CorpusArgs len_in;
    ClassifierFlags len_flags;
    std::string len_out, len_name, len_format = "json";
    std::size_t len_max = 20;
    auto* lengths = app.add_subcommand("stats-lengths", "Utterance length histogram split by feedback");
    len_in.add(lengths);
    len_flags.add(lengths);
    lengths->add_option("--max-length", len_max, "Tail bin length");
    lengths->add_option("--name", len_name, "Name stored in the stats file");
    lengths->add_option("--format", len_format, "json or csv");
    lengths->add_option("--out", len_out, "Output path, - for stdout");

    // stats-top
    CorpusArgs top_in;
    ClassifierFlags top_flags;
    std::string top_out;
    std::size_t top_k = 20;
    auto* top = app.add_subcommand("stats-top", "Most frequent feedback forms");
    top_in.add(top);
    top_flags.add(top);
    top->add_option("-k,--top-k", top_k, "Number of items");
    top->add_option("--out", top_out, "Output CSV, - for stdout");

    // da-map
    std::string map_corpus, map_mapping, map_out;
    std::vector<std::string> map_tags;
    auto* damap = app.add_subcommand("da-map", "Map fine-grained dialogue act tags to coarse groups");
    damap->add_option("--corpus", map_corpus, "Utterances with da_tag (JSONL)");
    damap->add_option("--tag", map_tags, "Tag to map (repeatable)");
    damap->add_option("--mapping", map_mapping, "Mapping file (JSON); defaults to the built-in table");
    damap->add_option("--out", map_out, "Output JSONL, - for stdout");

    // da-decide
    std::string decide_probs, decide_thresholds, decide_out, decide_stats, decide_name = "groups";
    std::vector<std::string> decide_overrides;
    auto* decide = app.add_subcommand("da-decide", "Pick a group for each probability vector");
    decide->add_option("--probs", decide_probs, "Probability records (JSONL)")->required();
    decide->add_option("--thresholds", decide_thresholds, "Threshold file (JSON)");
    decide->add_option("--threshold", decide_overrides, "group=value override (repeatable)");
    decide->add_option("--out", decide_out, "Group records (JSONL), - for stdout");
    decide->add_option("--stats", decide_stats, "Also write group proportions (JSON)");
    decide->add_option("--name", decide_name, "Name stored in the stats file");

    // eval
    std::string eval_gold, eval_pred, eval_gold_field = "label", eval_pred_field = "label", eval_out, eval_json,
                eval_mapping;
    CorpusArgs eval_in;
    ClassifierFlags eval_flags;
    auto* eval = app.add_subcommand("eval", "Precision, recall and F1 against gold labels");
    eval->add_option("--gold", eval_gold, "Gold records (JSONL with id)");
    eval->add_option("--pred", eval_pred, "Predicted records (JSONL with id)");
    eval->add_option("--gold-field", eval_gold_field, "Label field in gold records");
    eval->add_option("--pred-field", eval_pred_field, "Label field in predicted records");
    eval_in.add(eval);
    eval_flags.add(eval);
    eval->add_option("--mapping", eval_mapping, "Tag mapping for corpus evaluation");
    eval->add_option("--out", eval_out, "Metrics table, - for stdout");
    eval->add_option("--json", eval_json, "Also write full-precision metrics (JSON)");

    // compare
    std::string cmp_a, cmp_b, cmp_out;
    auto* compare = app.add_subcommand("compare", "Percentage-point differences between two stats files");
    compare->add_option("--a", cmp_a, "First stats file")->required();
    compare->add_option("--b", cmp_b, "Second stats file")->required();
    compare->add_option("--out", cmp_out, "Output CSV, - for stdout");

    // chart
    std::string chart_stats, chart_terms, chart_out, chart_title;
    auto* chart = app.add_subcommand("chart", "Render a stats or terms file as SVG");
    chart->add_option("--stats", chart_stats, "Stats file (JSON)");
    chart->add_option("--terms", chart_terms, "Terms file (CSV from stats-terms)");
    chart->add_option("--out", chart_out, "SVG path, - for stdout")->required();
    chart->add_option("--title", chart_title, "Chart title");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("feedback-lens");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "feedback-lens: error: " << e.what() << '\n';
        return kValidationError;
    }

    log.set_level(log_level == "error" ? LogLevel::error : log_level == "info" ? LogLevel::info : LogLevel::warn);

    try {
        Settings& s = runner.settings;
        if (!config_path.empty()) {
            const bool filter_flag = s.apply_filter, strip_flag = s.strip_markup;
            apply_config(config_path, s);
            s.apply_filter = s.apply_filter || filter_flag;
            s.strip_markup = s.strip_markup || strip_flag;
        }

        if (classify->parsed()) {
            const Classified r = runner.classify(classify_in, classify_flags);
            Sink sink(classify_out, out);
            ClassificationSummary summary;
            summary.total = r.labels.size();
            for (std::size_t i = 0; i < r.labels.size(); ++i) {
                sink.stream() << serialize_label_record({r.corpus.utterances[i].id, r.labels[i]}) << '\n';
                ++summary.counts[r.labels[i].name()];
                if (r.labels[i].site == MatchSite::full_short) ++summary.full_short;
                if (r.labels[i].site == MatchSite::initial) ++summary.initial;
            }
            sink.close();
            log.info("classified " + std::to_string(summary.total) + " utterances (" +
                     std::to_string(summary.full_short) + " full_short, " + std::to_string(summary.initial) +
                     " initial)");
            if (!classify_summary.empty()) {
                json j = {{"name", r.corpus.manifest.name},
                          {"total", summary.total},
                          {"counts", summary.counts},
                          {"full_short", summary.full_short},
                          {"initial", summary.initial}};
                Sink summary_sink(classify_summary, out);
                summary_sink.stream() << j.dump(2) << '\n';
                summary_sink.close();
            }
        } else if (prop->parsed()) {
            check_format(prop_format);
            const int sources = int(!prop_labels.empty()) + int(!prop_groups.empty()) + int(prop_in.given());
            if (sources != 1) throw ValidationError("give exactly one of --labels, --groups or --corpus");
            Sink sink(prop_out, out);
            if (!prop_groups.empty()) {
                const GroupProportions t = group_proportions(read_groups(prop_groups));
                const std::string name = prop_name.empty() ? fs::path(prop_groups).stem().string() : prop_name;
                if (prop_format == "json") {
                    sink.stream() << group_proportions_to_json(t, name) << '\n';
                } else {
                    write_group_csv(sink.stream(), t);
                }
            } else {
                std::vector<FeedbackLabel> labels;
                std::string name = prop_name;
                if (!prop_labels.empty()) {
                    std::ifstream in(prop_labels, std::ios::binary);
                    if (!in) throw IoError("cannot read " + prop_labels);
                    for (auto& rec : parse_label_records(in, prop_labels)) labels.push_back(std::move(rec.label));
                    if (name.empty()) name = fs::path(prop_labels).stem().string();
                } else {
                    Classified r = runner.classify(prop_in, prop_flags);
                    labels = std::move(r.labels);
                    if (name.empty()) name = r.corpus.manifest.name;
                }
                const ProportionTable t = class_proportions(labels, parse_denominator(prop_denominator));
                if (prop_format == "json") {
                    sink.stream() << proportions_to_json(t, name) << '\n';
                } else {
                    write_proportions_csv(sink.stream(), t);
                }
            }
            sink.close();
        } else if (terms->parsed()) {
            if (terms_scope != "short" && terms_scope != "all") throw ValidationError("--scope must be short or all");
            const Corpus a = runner.load_corpus(terms_a, "--a-corpus");
            const Corpus b = runner.load_corpus(terms_b, "--b-corpus");
            TermComparisonOptions opts;
            opts.n_max = terms_n_max;
            opts.top_k = terms_top_k;
            opts.scope = terms_scope == "all" ? NgramScope::all : NgramScope::very_short_only;
            opts.short_limit = terms_short_limit;
            const TermComparison cmp = compare_corpora_terms(a, b, opts);
            log.info("tokens in scope: a " + std::to_string(cmp.tokens_a) + ", b " + std::to_string(cmp.tokens_b));
            std::vector<TermStats> rows;
            if (terms_all) {
                rows = cmp.table;
            } else {
                std::set<Ngram> keep;
                for (const auto& t : cmp.top_a) keep.insert(t.term);
                for (const auto& t : cmp.top_b) keep.insert(t.term);
                for (const auto& t : cmp.table) {
                    if (keep.count(t.term)) rows.push_back(t);
                }
            }
            Sink sink(terms_out, out);
            write_terms_csv(sink.stream(), rows);
            sink.close();
        } else if (lengths->parsed()) {
            check_format(len_format);
            if (len_max < 1) throw ValidationError("--max-length must be at least 1");
            const Classified r = runner.classify(len_in, len_flags);
            const LengthHistogram h = length_distribution(r.seqs, r.labels, len_max);
            Sink sink(len_out, out);
            if (len_format == "json") {
                sink.stream() << lengths_to_json(h, len_name.empty() ? r.corpus.manifest.name : len_name) << '\n';
            } else {
                write_lengths_csv(sink.stream(), h);
            }
            sink.close();
        } else if (top->parsed()) {
            const Classified r = runner.classify(top_in, top_flags);
            Sink sink(top_out, out);
            write_top_items_csv(sink.stream(), top_feedback_items(r.seqs, r.labels, top_k));
            sink.close();
        } else if (damap->parsed()) {
            if (map_corpus.empty() == map_tags.empty()) throw ValidationError("give either --corpus or --tag");
            const SwbdMapping mapping = map_mapping.empty() ? SwbdMapping::builtin() : load_mapping(map_mapping);
            Sink sink(map_out, out);
            auto record = [&](const std::string& tag) {
                return json{{"tag", tag},
                            {"group", std::string(to_string(map_swbd_tag(tag, mapping)))},
                            {"binary", std::string(to_string(to_binary_group(tag, mapping)))}};
            };
            if (!map_tags.empty()) {
                for (const auto& tag : map_tags) sink.stream() << record(tag).dump() << '\n';
            } else {
                std::ifstream in(map_corpus, std::ios::binary);
                if (!in) throw IoError("cannot read " + map_corpus);
                std::size_t untagged = 0;
                for (const Utterance& u : parse_utterances(in, map_corpus)) {
                    if (!u.gold_da_tag) {
                        ++untagged;
                        continue;
                    }
                    json j = record(*u.gold_da_tag);
                    j["id"] = u.id;
                    sink.stream() << j.dump() << '\n';
                }
                if (untagged) log.warn(std::to_string(untagged) + " utterances without da_tag skipped");
            }
            sink.close();
        } else if (decide->parsed()) {
            ThresholdConfig t = s.thresholds;
            if (!decide_thresholds.empty()) t = parse_thresholds(read_file(decide_thresholds), t, decide_thresholds);
            for (const auto& o : decide_overrides) {
                const auto eq = o.find('=');
                if (eq == std::string::npos) throw ValidationError("--threshold expects group=value, got \"" + o + "\"");
                auto g = parse_da_group(o.substr(0, eq));
                if (!g) throw ValidationError("--threshold: unknown group \"" + o.substr(0, eq) + "\"");
                std::size_t used = 0;
                double v = 0;
                try {
                    v = std::stod(o.substr(eq + 1), &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0 || used != o.size() - eq - 1) {
                    throw ValidationError("--threshold: bad value in \"" + o + "\"");
                }
                t[*g] = v;
            }
            t.validate();
            const auto records = read_probability_file(decide_probs);
            std::vector<DAGroup> groups;
            Sink sink(decide_out, out);
            for (const auto& rec : records) {
                groups.push_back(decide_label(rec.probs, t));
                sink.stream() << json{{"id", rec.id}, {"group", std::string(to_string(groups.back()))}}.dump()
                              << '\n';
            }
            sink.close();
            if (!decide_stats.empty()) {
                Sink stats(decide_stats, out);
                stats.stream() << group_proportions_to_json(group_proportions(groups), decide_name) << '\n';
                stats.close();
            }
        } else if (eval->parsed()) {
            MetricsReport report;
            std::string first_column = "Label";
            if (eval_in.given()) {
                if (!eval_gold.empty() || !eval_pred.empty()) {
                    throw ValidationError("give either --gold/--pred or --corpus, not both");
                }
                const Corpus c = runner.load_corpus(eval_in);
                ClassifierOptions opts = s.classifier;
                eval_flags.apply(opts);
                const CueLexicon lex = runner.load_lexicon_for(eval_in.lexicon, c.manifest.language);
                const SwbdMapping mapping =
                    eval_mapping.empty() ? SwbdMapping::builtin() : load_mapping(eval_mapping);
                const BinaryCueEvaluation r = evaluate_binary_cues(c, lex, mapping, opts);
                log.info("evaluated " + std::to_string(r.evaluated) + " utterances, skipped " +
                         std::to_string(r.skipped_untagged) + " without a tag");
                report = r.report;
                first_column = "Group";
            } else {
                if (eval_gold.empty() || eval_pred.empty()) {
                    throw ValidationError("eval needs --gold and --pred, or --corpus");
                }
                const auto gold = read_id_field(eval_gold, eval_gold_field);
                const auto pred = read_id_field(eval_pred, eval_pred_field);
                std::map<std::string, std::string> by_id(pred.begin(), pred.end());
                std::vector<std::string> g, p;
                for (const auto& [id, label] : gold) {
                    auto it = by_id.find(id);
                    if (it == by_id.end()) throw ValidationError(eval_pred + ": no prediction for id \"" + id + "\"");
                    g.push_back(label);
                    p.push_back(it->second);
                }
                if (pred.size() != gold.size()) {
                    throw ValidationError(eval_pred + ": has ids that are not in " + eval_gold);
                }
                report = prf_metrics(confusion_matrix(g, p));
            }
            Sink sink(eval_out, out);
            sink.stream() << format_metrics_table(report, first_column);
            sink.close();
            if (!eval_json.empty()) {
                Sink js(eval_json, out);
                js.stream() << metrics_to_json(report) << '\n';
                js.close();
            }
        } else if (compare->parsed()) {
            const auto a = read_percent_rows(read_file(cmp_a), cmp_a);
            const auto b = read_percent_rows(read_file(cmp_b), cmp_b);
            Sink sink(cmp_out, out);
            write_delta_csv(sink.stream(), compare_percentages(a, b));
            sink.close();
        } else if (chart->parsed()) {
            if (chart_stats.empty() == chart_terms.empty()) throw ValidationError("give either --stats or --terms");
            std::string svg;
            if (!chart_terms.empty()) {
                std::ifstream in(chart_terms, std::ios::binary);
                if (!in) throw IoError("cannot read " + chart_terms);
                svg = render_terms_svg(read_terms_csv(in, chart_terms), chart_title);
            } else {
                const std::string text = read_file(chart_stats);
                const std::string kind = stats_kind(text, chart_stats);
                if (kind == "feedback_proportions") {
                    svg = render_proportions_svg(proportions_from_json(text, chart_stats), chart_title);
                } else if (kind == "da_group_proportions") {
                    svg = render_group_proportions_svg(group_proportions_from_json(text, chart_stats), chart_title);
                } else if (kind == "length_histogram") {
                    svg = render_lengths_svg(lengths_from_json(text, chart_stats), chart_title);
                } else {
                    throw ValidationError(chart_stats + ": unknown stats kind \"" + kind + "\"");
                }
            }
            Sink sink(chart_out, out);
            sink.stream() << svg;
            sink.close();
        }
    } catch (const IoError& e) {
        err << "feedback-lens: error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "feedback-lens: error: " << e.what() << '\n';
        return kValidationError;
    }
    return kOk;
}

}  // namespace feedback_lens::cli
