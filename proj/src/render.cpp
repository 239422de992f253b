#include "hetviz/render.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace hetviz {

std::string_view to_string(RenderMode m) {
  return m == RenderMode::LosslessPolylines ? "lossless" : "aggregated";
}

std::optional<RenderMode> parse_render_mode(std::string_view s) {
  if (s == "lossless" || s == "lossless_polylines") return RenderMode::LosslessPolylines;
  if (s == "aggregated" || s == "aggregated_edges") return RenderMode::AggregatedEdges;
  return std::nullopt;
}

void RenderSpec::validate(std::size_t axes) const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "render spec: " + what); };
  if (!(width > 0) || !(height > 0) || !(bar_width > 0)) bad("sizes must be positive");
  if (!(margin >= 0) || 2 * margin >= width || 2 * margin >= height) bad("margin leaves no drawing area");
  if (axis_spacing < 0) bad("axis spacing must not be negative");
  if (axis_spacing > 0 && axis_spacing * double(axes) > width) bad("axes do not fit the canvas width");
  if (!(frame_threshold >= 0 && frame_threshold <= 1)) bad("frame threshold must lie in [0, 1]");
}

const std::vector<std::string>& class_palette() {
  static const std::vector<std::string> palette = {"#d81b9c", "#1f5fd1", "#f2c200", "#2ca02c", "#ff7f0e",
                                                   "#17becf", "#8c564b", "#9467bd", "#bcbd22", "#e377c2"};
  return palette;
}

std::string class_color(std::span<const std::string> classes, std::size_t index,
                        const std::map<std::string, std::string>& overrides) {
  if (index < classes.size())
    if (auto it = overrides.find(classes[index]); it != overrides.end()) return it->second;
  const auto& p = class_palette();
  return p[index % p.size()];
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

namespace {

std::string fx(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

struct BarBox {
  double y0 = 0; // bottom
  double y1 = 0; // top
};

struct Axis {
  const AxisLayout* layout = nullptr;
  double x = 0;
  std::vector<BarBox> boxes;
};

} // namespace

SvgDocument render_svg(const Dataset& ds, const ViewConfig& view, std::span<const AxisLayout> layouts,
                       std::span<const EdgeBundle> edges, const RenderSpec& spec) {
  std::vector<const AxisLayout*> order;
  if (view.axis_order.empty()) {
    for (const auto& l : layouts) order.push_back(&l);
  } else {
    for (const auto& name : view.axis_order) {
      auto it = std::find_if(layouts.begin(), layouts.end(), [&](const AxisLayout& l) { return l.attribute == name; });
      if (it == layouts.end())
        throw Error(ErrorCode::InvalidArgument, "no layout for axis '" + name + "'", name);
      order.push_back(&*it);
    }
  }
  spec.validate(order.size());
  for (const auto* l : order)
    if (l->column >= ds.num_attributes() || ds.attribute(l->column).name != l->attribute)
      throw Error(ErrorCode::InvalidArgument, "layout '" + l->attribute + "' does not match the dataset", l->attribute);

  const std::size_t n = order.size();
  const double top = spec.margin, bottom = spec.height - spec.margin, span = bottom - top;
  const double spacing = spec.axis_spacing > 0 ? spec.axis_spacing
                         : n > 1              ? (spec.width - 2 * spec.margin) / double(n - 1)
                                              : 0;
  std::vector<Axis> axes(n);
  for (std::size_t i = 0; i < n; ++i) {
    axes[i].layout = order[i];
    axes[i].x = n > 1 ? spec.margin + double(i) * spacing : spec.width / 2;
    double cum = 0;
    for (const auto& b : order[i]->bars) {
      BarBox box{bottom - cum * span, bottom - (cum + b.height) * span};
      cum += b.height;
      axes[i].boxes.push_back(box);
    }
  }

  std::map<std::string, std::string> colors = view.color_map;
  for (const auto& [k, v] : spec.color_map) colors[k] = v;
  const AxisLayout* ref = nullptr;
  for (const auto* l : order)
    if (l->reference) {
      ref = l;
      break;
    }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fx(spec.width) + "\" height=\"" +
         fx(spec.height) + "\" viewBox=\"0 0 " + fx(spec.width) + " " + fx(spec.height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fx(spec.width) + "\" height=\"" + fx(spec.height) + "\" fill=\"#ffffff\"/>\n";

  if (spec.mode == RenderMode::LosslessPolylines) {
    // Bar index per row and axis (-1 when the bar was filtered away).
    std::vector<std::vector<std::int32_t>> bar_of(n, std::vector<std::int32_t>(ds.num_rows(), -1));
    std::vector<DiscreteColumn> columns;
    for (std::size_t i = 0; i < n; ++i) {
      columns.push_back(discretize(ds, order[i]->column));
      const auto& col = columns.back();
      std::vector<std::int32_t> to_bar(col.size(), -1);
      for (std::size_t v = 0; v < col.size(); ++v)
        if (auto b = order[i]->bar_of(col.labels[v])) to_bar[v] = std::int32_t(*b);
      for (std::size_t r = 0; r < ds.num_rows(); ++r) bar_of[i][r] = to_bar[std::size_t(col.codes[r])];
    }
    // Tuple id by first appearance over the displayed attributes.
    std::map<std::vector<std::int32_t>, std::size_t> tuple_ids;
    std::vector<std::size_t> tuple(ds.num_rows());
    std::vector<std::size_t> multiplicity;
    for (std::size_t r = 0; r < ds.num_rows(); ++r) {
      std::vector<std::int32_t> key(n);
      for (std::size_t i = 0; i < n; ++i) key[i] = columns[i].codes[r];
      auto [it, inserted] = tuple_ids.try_emplace(std::move(key), tuple_ids.size());
      if (inserted) multiplicity.push_back(0);
      tuple[r] = it->second;
      ++multiplicity[it->second];
    }
    const std::size_t max_mult = multiplicity.empty() ? 1 : *std::max_element(multiplicity.begin(), multiplicity.end());
    // Slot of each tuple inside each bar: rank among the bar's tuples.
    std::vector<std::vector<std::vector<std::size_t>>> bar_tuples(n);
    for (std::size_t i = 0; i < n; ++i) {
      bar_tuples[i].resize(order[i]->bars.size());
      for (std::size_t r = 0; r < ds.num_rows(); ++r)
        if (bar_of[i][r] >= 0) bar_tuples[i][std::size_t(bar_of[i][r])].push_back(tuple[r]);
      for (auto& t : bar_tuples[i]) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
      }
    }
    std::optional<DiscreteColumn> classes;
    if (ref) classes = discretize(ds, ds.index_of(*ref->reference));

    out += "<g class=\"cases\" fill=\"none\" stroke-opacity=\"0.6\">\n";
    for (std::size_t r = 0; r < ds.num_rows(); ++r) {
      std::string points;
      for (std::size_t i = 0; i < n; ++i) {
        const auto b = bar_of[i][r];
        if (b < 0) continue;
        const auto& ts = bar_tuples[i][std::size_t(b)];
        const auto slot = std::size_t(std::lower_bound(ts.begin(), ts.end(), tuple[r]) - ts.begin());
        const auto& box = axes[i].boxes[std::size_t(b)];
        const double y = box.y0 - (double(slot) + 0.5) / double(ts.size()) * (box.y0 - box.y1);
        if (!points.empty()) points += ' ';
        points += fx(axes[i].x) + "," + fx(y);
      }
      std::string color = "#444444";
      if (classes) {
        const auto& label = classes->labels[std::size_t(classes->codes[r])];
        const auto k = std::size_t(std::lower_bound(ref->classes.begin(), ref->classes.end(), label) -
                                   ref->classes.begin());
        color = class_color(ref->classes, k, colors);
      }
      const double w = view.line_width_mode == LineWidthMode::Uniform
                           ? 1.0
                           : 0.75 + 2.25 * double(multiplicity[tuple[r]]) / double(max_mult);
      out += "<polyline points=\"" + points + "\" stroke=\"" + color + "\" stroke-width=\"" + fx(w) + "\"/>\n";
    }
    out += "</g>\n";
  } else {
    std::vector<const EdgeBundle*> bundles;
    std::uint64_t max_count = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto it = std::find_if(edges.begin(), edges.end(), [&](const EdgeBundle& e) {
        return e.left == order[i]->attribute && e.right == order[i + 1]->attribute;
      });
      if (it == edges.end())
        throw Error(ErrorCode::InvalidArgument,
                    "no edges between '" + order[i]->attribute + "' and '" + order[i + 1]->attribute + "'");
      for (const auto& e : it->entries) {
        if (e.left >= order[i]->bars.size() || e.right >= order[i + 1]->bars.size())
          throw Error(ErrorCode::InvalidArgument, "edge bundle does not match the layouts");
        max_count = std::max(max_count, e.count);
      }
      bundles.push_back(&*it);
    }
    out += "<g class=\"edges\" fill=\"none\" stroke-opacity=\"0.7\">\n";
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto& l = *order[i];
      for (const auto& e : bundles[i]->entries) {
        const auto& a = axes[i].boxes[e.left];
        const auto& b = axes[i + 1].boxes[e.right];
        const std::string color = l.classes.empty() ? "#444444" : class_color(l.classes, e.cls, colors);
        const double w = 0.5 + 7.5 * double(e.count) / double(max_count);
        out += "<line x1=\"" + fx(axes[i].x) + "\" y1=\"" + fx((a.y0 + a.y1) / 2) + "\" x2=\"" + fx(axes[i + 1].x) +
               "\" y2=\"" + fx((b.y0 + b.y1) / 2) + "\" stroke=\"" + color + "\" stroke-width=\"" + fx(w) + "\"/>\n";
      }
    }
    out += "</g>\n";
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = *order[i];
    const double x = axes[i].x, left = x - spec.bar_width / 2;
    out += "<g class=\"axis\" data-attribute=\"" + xml_escape(l.attribute) + "\">\n";
    out += "<line x1=\"" + fx(x) + "\" y1=\"" + fx(top) + "\" x2=\"" + fx(x) + "\" y2=\"" + fx(bottom) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    for (std::size_t bi = 0; bi < l.bars.size(); ++bi) {
      const auto& b = l.bars[bi];
      const auto& box = axes[i].boxes[bi];
      const double h = box.y0 - box.y1;
      auto rect = [&](double y_bottom, double height, const std::string& fill) {
        if (height <= 0) return;
        out += "<rect x=\"" + fx(left) + "\" y=\"" + fx(y_bottom - height) + "\" width=\"" + fx(spec.bar_width) +
               "\" height=\"" + fx(height) + "\" fill=\"" + fill + "\"/>\n";
      };
      out += "<g class=\"bar\">\n<title>" + xml_escape(b.group) + ": " + std::to_string(b.total) +
             (b.dominant ? " (" + xml_escape(l.classes[*b.dominant]) + ", purity " +
                               std::to_string(percent(b.per_class[*b.dominant], b.total)) + "%)"
                         : std::string()) +
             "</title>\n";
      if (b.per_class.empty() || !b.total) {
        rect(box.y0, h, "#ffffff");
      } else if (b.joined && b.dominant) {
        const double hd = h * double(b.per_class[*b.dominant]) / double(b.total);
        rect(box.y0, hd, class_color(l.classes, *b.dominant, colors));
        rect(box.y0 - hd, h - hd, std::string(kJoinedColor));
      } else {
        double y = box.y0;
        for (std::size_t c = 0; c < b.per_class.size(); ++c) {
          const double hc = h * double(b.per_class[c]) / double(b.total);
          rect(y, hc, class_color(l.classes, c, colors));
          y -= hc;
        }
      }
      out += "<rect x=\"" + fx(left) + "\" y=\"" + fx(box.y1) + "\" width=\"" + fx(spec.bar_width) + "\" height=\"" +
             fx(h) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
      out += "<line class=\"separator\" x1=\"" + fx(left) + "\" y1=\"" + fx(box.y1) + "\" x2=\"" +
             fx(left + spec.bar_width) + "\" y2=\"" + fx(box.y1) + "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
      if (spec.show_purity_frames && b.dominant && b.purity >= spec.frame_threshold)
        out += "<rect class=\"purity-frame\" x=\"" + fx(left - 2) + "\" y=\"" + fx(box.y1 - 2) + "\" width=\"" +
               fx(spec.bar_width + 4) + "\" height=\"" + fx(h + 4) + "\" fill=\"none\" stroke=\"" +
               std::string(kFrameColor) + "\" stroke-width=\"2\"/>\n";
      out += "</g>\n";
    }
    out += "<text x=\"" + fx(x) + "\" y=\"" + fx(bottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(l.attribute) +
           (l.flipped ? " (flipped)" : "") + "</text>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return {std::move(out)};
}

std::string render_report_panel(std::span<const std::string> statements, const PanelSpec& spec) {
  if (statements.empty()) return {};
  const std::size_t wrap = std::max<std::size_t>(1, spec.wrap);
  std::string out = "<g class=\"report\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double y = spec.y;
  for (const auto& s : statements) {
    // Greedy word wrap; words longer than a line are split.
    std::vector<std::string> lines(1);
    std::size_t pos = 0;
    while (pos < s.size()) {
      auto end = s.find(' ', pos);
      if (end == std::string::npos) end = s.size();
      std::string word = s.substr(pos, end - pos);
      pos = end < s.size() ? end + 1 : end;
      while (!word.empty()) {
        auto& line = lines.back();
        const std::size_t room = line.empty() ? wrap : (line.size() + 1 < wrap ? wrap - line.size() - 1 : 0);
        if (word.size() <= room) {
          line += (line.empty() ? "" : " ") + word;
          word.clear();
        } else if (line.empty()) {
          line = word.substr(0, wrap);
          word.erase(0, wrap);
          lines.emplace_back();
        } else {
          lines.emplace_back();
        }
      }
    }
    if (lines.size() > 1 && lines.back().empty()) lines.pop_back();
    out += "<text x=\"" + fx(spec.x) + "\" y=\"" + fx(y) + "\">";
    for (std::size_t i = 0; i < lines.size(); ++i)
      out += "<tspan x=\"" + fx(spec.x) + "\" dy=\"" + fx(i ? spec.line_height : 0) + "\">" + xml_escape(lines[i]) +
             "</tspan>";
    out += "</text>\n";
    y += spec.line_height * double(lines.size());
  }
  out += "</g>\n";
  return out;
}

} // namespace hetviz
