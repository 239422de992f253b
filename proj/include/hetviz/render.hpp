#pragma once

// Deterministic SVG output for parallel coordinates with stacked bars.
// Coordinates are printed with two decimals, so equal inputs give
// byte-identical documents.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hetviz/core.hpp"
#include "hetviz/viewlayout.hpp"

namespace hetviz {

enum class RenderMode { LosslessPolylines, AggregatedEdges };

std::string_view to_string(RenderMode m);
std::optional<RenderMode> parse_render_mode(std::string_view s);

struct RenderSpec {
  double width = 960;
  double height = 540;
  double margin = 48;
  double axis_spacing = 0; // 0: spread axes over the width
  double bar_width = 14;
  RenderMode mode = RenderMode::LosslessPolylines;
  std::map<std::string, std::string> color_map; // class -> color, over ViewConfig::color_map
  bool show_purity_frames = true;
  double frame_threshold = 0.80;

  /// Throws InvalidArgument on non-positive sizes or axes that overflow the width.
  void validate(std::size_t axes) const;
};

struct SvgDocument {
  std::string text;
  bool operator==(const SvgDocument&) const = default;
};

inline constexpr std::string_view kJoinedColor = "#9e9e9e";
inline constexpr std::string_view kFrameColor = "#1a9c3a";

/// Magenta, blue, yellow, then a fixed extension palette.
const std::vector<std::string>& class_palette();
std::string class_color(std::span<const std::string> classes, std::size_t index,
                        const std::map<std::string, std::string>& overrides);

/// Axes follow view.axis_order (or the layout order when it is empty); every
/// axis needs a layout, and aggregated mode needs an edge bundle per adjacent
/// pair. Lossless mode draws one polyline per row; inside a bar, rows are
/// spread by the first-appearance rank of their value tuple, so rows differ
/// in the picture iff they differ on a displayed attribute.
SvgDocument render_svg(const Dataset& ds, const ViewConfig& view, std::span<const AxisLayout> layouts,
                       std::span<const EdgeBundle> edges, const RenderSpec& spec);

struct PanelSpec {
  double x = 0;
  double y = 0;
  double line_height = 16;
  std::size_t wrap = 72; // characters per line
};

/// One <text> element per statement, in order; long statements wrap into
/// <tspan> lines without dropping characters. Empty input gives "".
std::string render_report_panel(std::span<const std::string> statements, const PanelSpec& spec = {});

std::string xml_escape(std::string_view s);

} // namespace hetviz
