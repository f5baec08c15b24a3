#pragma once

#include "feedback_lens/da_pipeline.hpp"
#include "feedback_lens/lexical_stats.hpp"
#include "feedback_lens/rule_classifier.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace feedback_lens {

// Stats files written by the CLI all carry a "kind" field:
//   feedback_proportions / da_group_proportions:
//     {"kind", "name", "denominator", "total", "rows": [{"label", "count", "proportion", "percent"}]}
//   length_histogram:
//     {"kind", "name", "max_length", "empty", "bins": [{"length", "feedback", "other"}]}

std::string proportions_to_json(const ProportionTable& table, const std::string& name);
std::string group_proportions_to_json(const GroupProportions& table, const std::string& name);
std::string lengths_to_json(const LengthHistogram& hist, const std::string& name);

ProportionTable proportions_from_json(std::string_view json_text, std::string_view source_name = "stats");
GroupProportions group_proportions_from_json(std::string_view json_text, std::string_view source_name = "stats");
LengthHistogram lengths_from_json(std::string_view json_text, std::string_view source_name = "stats");

/// The "kind" field of a stats file; throws ValidationError if absent.
std::string stats_kind(std::string_view json_text, std::string_view source_name = "stats");

struct PercentRow {
    std::string label;
    double percent = 0;
};

/// Rows of any proportion stats file as percentages. Rows may give "percent"
/// or "proportion"; "percent" wins.
std::vector<PercentRow> read_percent_rows(std::string_view json_text, std::string_view source_name = "stats");

struct DeltaRow {
    std::string label;
    double a_percent = 0;
    double b_percent = 0;
    double delta_pp = 0;  // b - a, in percentage points
};

/// Labels in the order of `a`, then labels only present in `b`. A label
/// missing on one side counts as 0%.
std::vector<DeltaRow> compare_percentages(const std::vector<PercentRow>& a, const std::vector<PercentRow>& b);

/// CSV label,a_percent,b_percent,delta_pp with two decimals.
void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& rows);

/// CSV rank,item,count,label.
void write_top_items_csv(std::ostream& out, const std::vector<FeedbackItem>& items);

void write_lengths_csv(std::ostream& out, const LengthHistogram& hist);

/// Reads the CSV written by write_terms_csv.
std::vector<TermStats> read_terms_csv(std::istream& in, std::string_view source_name = "terms");

/// Two-decimal fixed formatting used by every human-facing report.
std::string format_fixed2(double v);

}  // namespace feedback_lens
