#include "hetviz/viewlayout.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "hetviz/kernels.hpp"

namespace hetviz {

std::optional<std::size_t> AxisLayout::bar_of(std::string_view label) const {
  for (std::size_t i = 0; i < bars.size(); ++i)
    for (const auto& m : bars[i].members)
      if (m == label) return i;
  return std::nullopt;
}

std::string_view to_string(SortMode m) {
  switch (m) {
  case SortMode::FrequencyDesc: return "frequency";
  case SortMode::Purity: return "purity";
  case SortMode::Color: return "color";
  }
  return "frequency";
}

std::optional<SortMode> parse_sort_mode(std::string_view s) {
  if (s == "frequency" || s == "frequency_desc") return SortMode::FrequencyDesc;
  if (s == "purity") return SortMode::Purity;
  if (s == "color") return SortMode::Color;
  return std::nullopt;
}

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0 && x <= 1))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must lie in [0, 1], got " + format_number(x));
}

void refresh(Bar& b, std::uint64_t rows) {
  b.dominant.reset();
  b.purity = 0;
  if (b.total && !b.per_class.empty()) {
    b.dominant = std::size_t(std::max_element(b.per_class.begin(), b.per_class.end()) - b.per_class.begin());
    b.purity = double(b.per_class[*b.dominant]) / double(b.total);
  }
  b.height = rows ? double(b.total) / double(rows) : 0;
}

bool is_continuous(const Attribute& a) {
  const auto k = a.mtype.kind();
  return !a.grouped && (k == ScaleKind::Interval || k == ScaleKind::Ratio || k == ScaleKind::Absolute ||
                        k == ScaleKind::Cyclical);
}

AxisLayout build(const Dataset& ds, std::size_t column, std::optional<std::size_t> reference) {
  const auto values = discretize(ds, column);
  AxisLayout out;
  out.attribute = ds.attribute(column).name;
  out.column = column;
  out.rows = ds.num_rows();

  std::vector<std::int32_t> classes(ds.num_rows(), 0);
  if (reference) {
    out.reference = ds.attribute(*reference).name;
    const auto ref = discretize(ds, *reference);
    out.classes = ref.labels;
    std::sort(out.classes.begin(), out.classes.end());
    std::vector<std::int32_t> remap(ref.labels.size());
    for (std::size_t i = 0; i < ref.labels.size(); ++i)
      remap[i] = std::int32_t(std::lower_bound(out.classes.begin(), out.classes.end(), ref.labels[i]) -
                              out.classes.begin());
    for (std::size_t r = 0; r < classes.size(); ++r) classes[r] = remap[std::size_t(ref.codes[r])];
  }
  const std::size_t k = std::max<std::size_t>(1, out.classes.size());
  const auto table = kernels::parallel::contingency(values.codes, values.size(), classes, k);

  std::vector<Bar> bars(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    auto& b = bars[v];
    b.group = values.labels[v];
    b.members = {values.labels[v]};
    for (std::size_t c = 0; c < k; ++c) b.total += table.at(v, c);
    if (reference)
      for (std::size_t c = 0; c < k; ++c) b.per_class.push_back(table.at(v, c));
    refresh(b, out.rows);
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  const auto missing = values.missing_code ? std::optional(std::size_t(*values.missing_code)) : std::nullopt;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if ((a == missing) != (b == missing)) return b == missing;
    return bars[a].total > bars[b].total;
  });
  for (auto i : order) out.bars.push_back(std::move(bars[i]));
  return out;
}

} // namespace

void ViewConfig::validate() const {
  check_unit(purity_threshold, "purity threshold");
  check_unit(min_block_size, "minimum block size");
  check_unit(small_block_threshold, "small block threshold");
}

AxisLayout frequency_layout(const Dataset& ds, std::size_t column) {
  if (column >= ds.num_attributes())
    throw Error(ErrorCode::UnknownAttribute, "attribute index " + std::to_string(column) + " out of range");
  return build(ds, column, std::nullopt);
}

AxisLayout reference_layout(const Dataset& ds, std::size_t column, std::size_t reference) {
  if (column >= ds.num_attributes() || reference >= ds.num_attributes())
    throw Error(ErrorCode::UnknownAttribute, "attribute index out of range");
  const auto& ref = ds.attribute(reference);
  if (is_continuous(ref))
    throw Error(ErrorCode::InvalidArgument,
                "reference attribute '" + ref.name + "' is continuous; group it into intervals first", ref.name);
  return build(ds, column, reference);
}

AxisLayout join_nondominant(const AxisLayout& layout) {
  if (!layout.reference)
    throw Error(ErrorCode::InvalidArgument, "joining needs a reference layout", layout.attribute);
  auto out = layout;
  for (auto& b : out.bars) b.joined = b.dominant.has_value();
  return out;
}

AxisLayout filter_by_purity(const AxisLayout& layout, double theta, double min_size) {
  check_unit(theta, "purity threshold");
  check_unit(min_size, "minimum block size");
  auto out = layout;
  out.bars.clear();
  for (const auto& b : layout.bars) {
    if (b.purity >= theta && b.height >= min_size) {
      out.bars.push_back(b);
      continue;
    }
    out.residual.per_class.resize(b.per_class.size(), 0);
    out.residual.groups.insert(out.residual.groups.end(), b.members.begin(), b.members.end());
    out.residual.total += b.total;
    for (std::size_t c = 0; c < b.per_class.size(); ++c) out.residual.per_class[c] += b.per_class[c];
  }
  return out;
}

AxisLayout relocate_small_blocks(const AxisLayout& layout, double tau, bool merge) {
  check_unit(tau, "small block threshold");
  auto out = layout;
  std::stable_partition(out.bars.begin(), out.bars.end(), [&](const Bar& b) { return b.height >= tau; });
  const auto first_small = std::find_if(out.bars.begin(), out.bars.end(), [&](const Bar& b) { return b.height < tau; });
  if (!merge || out.bars.end() - first_small < 2) return out;
  Bar folded;
  folded.group = "other";
  folded.per_class.assign(out.classes.size(), 0);
  for (auto it = first_small; it != out.bars.end(); ++it) {
    folded.members.insert(folded.members.end(), it->members.begin(), it->members.end());
    folded.total += it->total;
    for (std::size_t c = 0; c < it->per_class.size(); ++c) folded.per_class[c] += it->per_class[c];
    folded.joined = folded.joined || it->joined;
  }
  if (!out.reference) folded.per_class.clear();
  refresh(folded, out.rows);
  out.bars.erase(first_small, out.bars.end());
  out.bars.push_back(std::move(folded));
  return out;
}

std::vector<double> flip_attribute(std::span<const double> normalized) {
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double x = normalized[i];
    if (x != x) {
      out[i] = x;
      continue;
    }
    if (x < 0 || x > 1)
      throw Error(ErrorCode::InvalidArgument, "flipping needs values scaled to [0, 1], got " + format_number(x));
    out[i] = 1 - x;
  }
  return out;
}

AxisLayout flip_layout(const AxisLayout& layout) {
  auto out = layout;
  std::reverse(out.bars.begin(), out.bars.end());
  out.flipped = !out.flipped;
  return out;
}

std::vector<std::size_t> sort_axes(std::span<const AxisLayout> layouts, SortMode mode, double theta,
                                   double min_size) {
  std::vector<std::size_t> order(layouts.size());
  std::iota(order.begin(), order.end(), 0);
  if (mode != SortMode::Purity) return order;
  check_unit(theta, "purity threshold");
  check_unit(min_size, "minimum block size");
  std::vector<std::size_t> qualifying(layouts.size(), 0);
  std::vector<double> mean(layouts.size(), 0);
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    for (const auto& b : layouts[i].bars) {
      qualifying[i] += b.purity >= theta && b.height >= min_size;
      mean[i] += b.purity;
    }
    if (!layouts[i].bars.empty()) mean[i] /= double(layouts[i].bars.size());
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (qualifying[a] != qualifying[b]) return qualifying[a] > qualifying[b];
    return mean[a] > mean[b];
  });
  return order;
}

AxisLayout sort_bars_by_color(const AxisLayout& layout, std::span<const std::string> priority) {
  std::vector<int> rank_of_class(layout.classes.size(), -1);
  for (std::size_t p = 0; p < priority.size(); ++p) {
    auto it = std::find(layout.classes.begin(), layout.classes.end(), priority[p]);
    if (it == layout.classes.end())
      throw Error(ErrorCode::InvalidArgument, "unknown class '" + priority[p] + "' in color priority", layout.attribute,
                  priority[p]);
    auto& slot = rank_of_class[std::size_t(it - layout.classes.begin())];
    if (slot < 0) slot = int(p);
  }
  // Bottom to top: bars outside the priority list, then the last priority
  // class, up to the first one.
  auto key = [&](const Bar& b) {
    const int r = b.dominant ? rank_of_class[*b.dominant] : -1;
    return r < 0 ? 0 : int(priority.size()) - r;
  };
  auto out = layout;
  std::stable_sort(out.bars.begin(), out.bars.end(), [&](const Bar& a, const Bar& b) { return key(a) < key(b); });
  return out;
}

AxisLayout sort_bars_by_purity(const AxisLayout& layout) {
  auto out = layout;
  std::stable_sort(out.bars.begin(), out.bars.end(), [](const Bar& a, const Bar& b) { return a.purity > b.purity; });
  return out;
}

namespace {

std::vector<std::int32_t> bar_codes(const Dataset& ds, const AxisLayout& layout) {
  const auto values = discretize(ds, layout.column);
  std::vector<std::int32_t> to_bar(values.size(), -1);
  for (std::size_t v = 0; v < values.size(); ++v)
    if (auto b = layout.bar_of(values.labels[v])) to_bar[v] = std::int32_t(*b);
  std::vector<std::int32_t> out(ds.num_rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = to_bar[std::size_t(values.codes[r])];
  return out;
}

} // namespace

EdgeBundle edge_weights(const Dataset& ds, const AxisLayout& left, const AxisLayout& right) {
  if (left.column >= ds.num_attributes() || ds.attribute(left.column).name != left.attribute ||
      right.column >= ds.num_attributes() || ds.attribute(right.column).name != right.attribute)
    throw Error(ErrorCode::InvalidArgument, "layouts do not belong to this dataset");
  const auto l = bar_codes(ds, left);
  const auto r = bar_codes(ds, right);
  std::vector<std::int32_t> classes(ds.num_rows(), 0);
  if (left.reference) {
    const auto ref = discretize(ds, ds.index_of(*left.reference));
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto& label = ref.labels[std::size_t(ref.codes[i])];
      classes[i] = std::int32_t(std::lower_bound(left.classes.begin(), left.classes.end(), label) -
                                left.classes.begin());
    }
  }
  EdgeBundle out{left.attribute, right.attribute, {}};
  for (const auto& e : kernels::parallel::edge_counts(l, r, classes))
    out.entries.push_back({std::size_t(e.left), std::size_t(e.right), std::size_t(e.cls), e.count});
  return out;
}

unsigned percent(std::uint64_t count, std::uint64_t total) {
  if (!total) return 0;
  return unsigned((200 * count + total) / (2 * total));
}

std::vector<std::string> linguistic_report(std::span<const AxisLayout> layouts, const ReportOptions& options) {
  check_unit(options.purity_threshold, "purity threshold");
  check_unit(options.min_block_size, "minimum block size");
  check_unit(options.small_block_threshold, "small block threshold");
  check_unit(options.large_block, "large block threshold");
  std::vector<std::string> out;
  for (const auto& layout : layouts) {
    bool small = false;
    for (std::size_t i = 0; i < layout.bars.size(); ++i) {
      const auto& b = layout.bars[i];
      small = small || b.height < options.small_block_threshold;
      if (!b.dominant || b.purity < options.purity_threshold || b.height < options.min_block_size) continue;
      const auto head = layout.attribute + ", block, " + std::to_string(i + 1);
      if (b.height >= options.large_block)
        out.push_back(head + " has a total frequency of " + std::to_string(percent(b.total, layout.rows)));
      else
        out.push_back(head + " has a purity of " + std::to_string(percent(b.per_class[*b.dominant], b.total)));
    }
    if (small) out.push_back(layout.attribute + " has a small frequency block.");
  }
  return out;
}

} // namespace hetviz
