#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace feedback_lens {

/// The five coarse dialogue act groups, in tie-break order.
enum class DAGroup { forward_looking, other, assessment, backchannel, yes_no_answer };

inline constexpr std::array<DAGroup, 5> kDAGroups = {DAGroup::forward_looking, DAGroup::other,
                                                     DAGroup::assessment, DAGroup::backchannel,
                                                     DAGroup::yes_no_answer};

std::string_view to_string(DAGroup g);
std::optional<DAGroup> parse_da_group(std::string_view name);

enum class BinaryGroup { feedback, other };

std::string_view to_string(BinaryGroup g);

/// Fine-grained tag to coarse group, with a default for unlisted tags.
class SwbdMapping {
public:
    SwbdMapping(std::map<std::string, DAGroup> map, DAGroup fallback);

    /// The built-in Switchboard table; "bf" resolves to backchannel.
    static const SwbdMapping& builtin();

    DAGroup map(std::string_view tag) const;
    DAGroup fallback() const { return fallback_; }
    const std::map<std::string, DAGroup>& entries() const { return map_; }

private:
    std::map<std::string, DAGroup> map_;
    DAGroup fallback_;
};

/// Tag normalization used for lookups: whitespace removed, ASCII lowercased.
std::string normalize_tag(std::string_view tag);

/// Reads {"default": group, "map": {tag: group}}; other top-level keys are ignored.
SwbdMapping parse_mapping(std::string_view json_text, std::string_view source_name = "mapping");
SwbdMapping load_mapping(const std::filesystem::path& path);

DAGroup map_swbd_tag(std::string_view tag, const SwbdMapping& m = SwbdMapping::builtin());

/// True for the Abandoned/Turn-Exit tag ("%" and its "%-" variant).
bool is_abandoned_tag(std::string_view tag);

BinaryGroup to_binary_group(DAGroup g);
/// Abandoned/Turn-Exit tags are always other, whatever the mapping says.
BinaryGroup to_binary_group(std::string_view fine_tag, const SwbdMapping& m = SwbdMapping::builtin());

using ProbVector = std::array<double, 5>;  // indexed by DAGroup

inline constexpr double kProbabilitySumTolerance = 1e-6;

/// Throws ValidationError unless every entry is in [0, 1] and the sum is within tolerance of 1.
void validate(const ProbVector& p);

struct ThresholdConfig {
    std::array<double, 5> threshold = {0.8, 0.6, 0.25, 0.5, 0.25};

    double operator[](DAGroup g) const { return threshold[static_cast<std::size_t>(g)]; }
    double& operator[](DAGroup g) { return threshold[static_cast<std::size_t>(g)]; }

    /// Throws ValidationError unless each threshold lies strictly inside (0, 1).
    void validate() const;
};

/// Reads {"thresholds": {group: value}}; absent groups keep `base` values.
ThresholdConfig parse_thresholds(std::string_view json_text, ThresholdConfig base = {},
                                 std::string_view source_name = "thresholds");

/// Highest-probability group among those meeting their threshold; if none
/// does, highest-probability group other than forward_looking. Ties go to the
/// earlier group in kDAGroups order.
DAGroup decide_label(const ProbVector& p, const ThresholdConfig& t = {});

struct ProbRecord {
    std::string id;
    ProbVector probs;
};

/// JSONL {"id", "probs": {forward_looking, other, assessment, backchannel, yes_no_answer}}.
std::vector<ProbRecord> parse_probability_records(std::istream& in, std::string_view source_name = "probs");
std::vector<ProbRecord> read_probability_file(const std::filesystem::path& path);

struct GroupRow {
    DAGroup group;
    std::size_t count = 0;
    double percent = 0.0;
};

struct GroupProportions {
    std::size_t total = 0;
    std::array<GroupRow, 5> rows{};

    double percent(DAGroup g) const { return rows[static_cast<std::size_t>(g)].percent; }
};

/// Throws ValidationError on empty input.
GroupProportions group_proportions(std::span<const DAGroup> labels);

}  // namespace feedback_lens
