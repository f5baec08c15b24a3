#pragma once

#include "feedback_lens/da_pipeline.hpp"
#include "feedback_lens/lexical_stats.hpp"
#include "feedback_lens/rule_classifier.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace feedback_lens {

// Static SVG renderings. Output depends only on the input values, so
// identical tables give byte-identical files.

/// One bar per row, labelled with the class name and its percentage.
std::string render_proportions_svg(const ProportionTable& table, const std::string& title = "");
std::string render_group_proportions_svg(const GroupProportions& table, const std::string& title = "");
/// Stacked feedback/other bars per token length.
std::string render_lengths_svg(const LengthHistogram& hist, const std::string& title = "");
/// Scatter of fscore_a (x) against fscore_b (y), one point per term.
std::string render_terms_svg(const std::vector<TermStats>& terms, const std::string& title = "");

/// Render and write. Throw ValidationError for an empty table and IoError if
/// the path cannot be written.
void emit_chart(const ProportionTable& table, const std::filesystem::path& path, const std::string& title = "");
void emit_chart(const GroupProportions& table, const std::filesystem::path& path, const std::string& title = "");
void emit_chart(const LengthHistogram& hist, const std::filesystem::path& path, const std::string& title = "");
void emit_chart(const std::vector<TermStats>& terms, const std::filesystem::path& path,
                const std::string& title = "");

}  // namespace feedback_lens
