#pragma once

// Per-axis bar statistics for parallel-coordinate views: frequency bars,
// class breakdowns against a reference attribute, joining, filtering,
// relocation, sorting, flipping, inter-axis edges and text reports.
//
// Bars are listed bottom to top. Every operation is a pure function.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hetviz/core.hpp"

namespace hetviz {

struct Bar {
  std::string group; // value or group label, "?" for Missing
  /// Labels folded into this bar; a single entry unless small bars were merged.
  std::vector<std::string> members;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_class; // aligned with AxisLayout::classes
  std::optional<std::size_t> dominant;  // index into classes
  double purity = 0;                    // per_class[dominant] / total
  double height = 0;                    // total / dataset rows
  bool joined = false;                  // non-dominant mass drawn as one grey sub-bar

  /// Cases outside the dominant class.
  std::uint64_t nondominant() const { return dominant ? total - per_class[*dominant] : 0; }
  bool operator==(const Bar&) const = default;
};

/// Mass removed by filter_by_purity.
struct Residual {
  std::vector<std::string> groups;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_class;
  bool operator==(const Residual&) const = default;
};

struct AxisLayout {
  std::string attribute;
  std::size_t column = 0;
  std::optional<std::string> reference;
  std::vector<std::string> classes; // reference labels, lexical
  std::uint64_t rows = 0;           // dataset size, denominator of heights
  std::vector<Bar> bars;            // bottom to top
  bool flipped = false;
  Residual residual;

  /// Bar holding a value label, if any.
  std::optional<std::size_t> bar_of(std::string_view label) const;
  bool operator==(const AxisLayout&) const = default;
};

struct EdgeEntry {
  std::size_t left = 0;  // bar index on the left axis
  std::size_t right = 0; // bar index on the right axis
  std::size_t cls = 0;   // index into the left layout's classes
  std::uint64_t count = 0;
  bool operator==(const EdgeEntry&) const = default;
};

struct EdgeBundle {
  std::string left;
  std::string right;
  std::vector<EdgeEntry> entries; // sorted by (left, right, cls)
  bool operator==(const EdgeBundle&) const = default;
};

enum class SortMode { FrequencyDesc, Purity, Color };
enum class LineWidthMode { Uniform, FrequencyWeighted };

std::string_view to_string(SortMode m);
std::optional<SortMode> parse_sort_mode(std::string_view s);

struct ViewConfig {
  std::optional<std::string> reference;
  double purity_threshold = 0.80;
  double min_block_size = 0.10;
  double small_block_threshold = 0.20;
  bool join_nondominant = false;
  /// Drop bars below the purity and size thresholds.
  bool filter = false;
  /// Move bars under small_block_threshold to the top of their axis.
  bool relocate = false;
  bool merge_small = false;
  SortMode sort_mode = SortMode::FrequencyDesc;
  std::vector<std::string> color_priority;
  std::vector<std::string> axis_order; // empty: dataset order without the reference
  std::set<std::string> flips;
  LineWidthMode line_width_mode = LineWidthMode::Uniform;
  std::map<std::string, std::string> color_map; // class -> CSS color

  /// Throws InvalidArgument for thresholds outside [0, 1].
  void validate() const;
  bool operator==(const ViewConfig&) const = default;
};

/// One bar per distinct value, largest at the bottom, ties in encounter
/// order, the Missing bar on top. Equal frequencies never merge bars.
AxisLayout frequency_layout(const Dataset& ds, std::size_t column);

/// frequency_layout plus per-class counts of `reference`. A continuous
/// reference must be grouped first (InvalidArgument).
AxisLayout reference_layout(const Dataset& ds, std::size_t column, std::size_t reference);

AxisLayout join_nondominant(const AxisLayout& layout);

/// Keeps bars with purity >= theta and height >= min_size; the rest is added
/// to the residual.
AxisLayout filter_by_purity(const AxisLayout& layout, double theta, double min_size);

/// Bars with height < tau move above the others, keeping their relative
/// order. With `merge`, two or more such bars fold into one top bar.
AxisLayout relocate_small_blocks(const AxisLayout& layout, double tau, bool merge = false);

/// x -> 1 - x over a column scaled to [0, 1]; NaN passes through.
std::vector<double> flip_attribute(std::span<const double> normalized);
/// Mirrors the bar order and toggles the flipped flag.
AxisLayout flip_layout(const AxisLayout& layout);

/// Permutation of axis positions. Purity mode: descending qualifying-bar
/// count, then mean bar purity, then original position.
std::vector<std::size_t> sort_axes(std::span<const AxisLayout> layouts, SortMode mode, double theta,
                                   double min_size);

/// Bars dominated by priority[0] end on top, then priority[1], and so on;
/// stable within groups.
AxisLayout sort_bars_by_color(const AxisLayout& layout, std::span<const std::string> priority);

/// Reorders bars by purity, highest at the bottom; stable.
AxisLayout sort_bars_by_purity(const AxisLayout& layout);

/// Rows per (left bar, right bar, class). Rows whose value has no bar on
/// either axis are skipped.
EdgeBundle edge_weights(const Dataset& ds, const AxisLayout& left, const AxisLayout& right);

struct ReportOptions {
  double purity_threshold = 0.80;
  double min_block_size = 0.10;
  double small_block_threshold = 0.20;
  /// Qualifying bars at least this tall are described by their frequency.
  double large_block = 0.50;
};

/// Integer percent of count / total, halves rounded up.
unsigned percent(std::uint64_t count, std::uint64_t total);

/// "<attr>, block, <i> has a purity of <p>", "<attr>, block, <i> has a total
/// frequency of <f>" and "<attr> has a small frequency block.", with i
/// counted from 1 at the bottom.
std::vector<std::string> linguistic_report(std::span<const AxisLayout> layouts, const ReportOptions& options = {});

} // namespace hetviz
