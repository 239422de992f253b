#include "hetviz/frontdoor.hpp"

#include <algorithm>
#include <charconv>

namespace hetviz {

ViewBundle compute_view(const Dataset& ds, const ViewConfig& view) {
  view.validate();
  const auto ref = view.reference ? std::optional(ds.index_of(*view.reference)) : ds.target();

  std::vector<std::size_t> columns;
  if (view.axis_order.empty()) {
    for (std::size_t c = 0; c < ds.num_attributes(); ++c)
      if (c != ref) columns.push_back(c);
  } else {
    for (const auto& name : view.axis_order) {
      const auto c = ds.index_of(name);
      if (std::find(columns.begin(), columns.end(), c) != columns.end())
        throw Error(ErrorCode::InvalidArgument, "axis '" + name + "' listed twice", name);
      columns.push_back(c);
    }
  }
  for (const auto& f : view.flips) {
    const auto c = ds.index_of(f);
    if (std::find(columns.begin(), columns.end(), c) == columns.end())
      throw Error(ErrorCode::InvalidArgument, "flipped attribute '" + f + "' is not on an axis", f);
  }

  std::vector<AxisLayout> layouts;
  for (auto c : columns) {
    auto l = ref ? reference_layout(ds, c, *ref) : frequency_layout(ds, c);
    if (view.join_nondominant) l = join_nondominant(l);
    if (view.relocate) l = relocate_small_blocks(l, view.small_block_threshold, view.merge_small);
    if (view.sort_mode == SortMode::Color) l = sort_bars_by_color(l, view.color_priority);
    layouts.push_back(std::move(l));
  }
  if (view.sort_mode == SortMode::Purity) {
    const auto perm = sort_axes(layouts, SortMode::Purity, view.purity_threshold, view.min_block_size);
    std::vector<AxisLayout> sorted;
    for (auto i : perm) sorted.push_back(std::move(layouts[i]));
    layouts = std::move(sorted);
  }

  ViewBundle out;
  out.report = linguistic_report(
      layouts, {view.purity_threshold, view.min_block_size, view.small_block_threshold, ReportOptions{}.large_block});
  for (auto& l : layouts) {
    if (view.filter) l = filter_by_purity(l, view.purity_threshold, view.min_block_size);
    if (view.flips.count(l.attribute)) l = flip_layout(l);
    out.order.push_back(l.attribute);
  }
  for (std::size_t i = 0; i + 1 < layouts.size(); ++i) out.edges.push_back(edge_weights(ds, layouts[i], layouts[i + 1]));
  out.layouts = std::move(layouts);
  return out;
}

formats::json to_json(const ViewBundle& bundle) {
  formats::json out;
  out["order"] = bundle.order;
  out["axes"] = formats::json::array();
  for (std::size_t i = 0; i < bundle.layouts.size(); ++i)
    out["axes"].push_back(formats::to_json(bundle.layouts[i], i < bundle.edges.size() ? &bundle.edges[i] : nullptr));
  out["report"] = bundle.report;
  return out;
}

formats::json hyperblocks_json(const std::vector<HyperBlock>& blocks, const Dataset& ds) {
  formats::json list = formats::json::array();
  for (const auto& hb : blocks) {
    auto j = formats::to_json(hb, ds);
    j["stats"] = formats::to_json(purity(hb, ds));
    j["rule"] = formats::to_json(hb_to_rule(hb, ds));
    list.push_back(std::move(j));
  }
  return {{"hyperblocks", std::move(list)}};
}

namespace {

double parse_unit(const std::string& key, const std::string& text) {
  double x = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || p != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' must be a number, got '" + text + "'");
  if (!(x >= 0 && x <= 1))
    throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' must lie in [0, 1], got '" + text + "'");
  return x;
}

bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text.empty()) return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' must be true or false, got '" + text + "'");
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    auto end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

} // namespace

ViewConfig apply_view_params(ViewConfig view, const std::map<std::string, std::string>& params) {
  for (const auto& [key, value] : params) {
    if (key == "ref") view.reference = value.empty() ? std::nullopt : std::optional(value);
    else if (key == "purity") view.purity_threshold = parse_unit(key, value);
    else if (key == "minsize") view.min_block_size = parse_unit(key, value);
    else if (key == "smallsize") view.small_block_threshold = parse_unit(key, value);
    else if (key == "join") view.join_nondominant = parse_flag(key, value);
    else if (key == "filter") view.filter = parse_flag(key, value);
    else if (key == "relocate") view.relocate = parse_flag(key, value);
    else if (key == "merge") view.merge_small = parse_flag(key, value);
    else if (key == "sort") {
      auto m = parse_sort_mode(value);
      if (!m) throw Error(ErrorCode::InvalidArgument, "unknown sort mode '" + value + "'");
      view.sort_mode = *m;
    } else if (key == "priority") view.color_priority = parse_list(value);
    else if (key == "order") view.axis_order = parse_list(value);
    else if (key == "flips") {
      auto f = parse_list(value);
      view.flips = {f.begin(), f.end()};
    }
  }
  view.validate();
  return view;
}

EncoderParams encoder_params_from_json(const formats::json& j) {
  EncoderParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorCode::Parse, "encoder params must be an object");
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw Error(ErrorCode::Parse, std::string("encoder param '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  p.smoothing = num("smoothing", p.smoothing);
  p.shrink = num("shrink", p.shrink);
  const double dim = num("dim", double(p.dim));
  if (dim < 1 || dim != double(std::size_t(dim))) throw Error(ErrorCode::InvalidArgument, "hash dimension must be a positive integer");
  p.dim = std::size_t(dim);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorCode::Parse, "encoder param 'seed' must be a non-negative integer");
    p.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("order")) {
    if (!j.at("order").is_array()) throw Error(ErrorCode::Parse, "encoder param 'order' must be an array");
    std::vector<std::string> order;
    for (const auto& v : j.at("order")) {
      if (!v.is_string()) throw Error(ErrorCode::Parse, "encoder param 'order' must hold strings");
      order.push_back(v.get<std::string>());
    }
    p.order = std::move(order);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Sessions

std::shared_ptr<const ViewBundle> Session::view_bundle(const ViewConfig& view) const {
  const auto key = formats::to_json(view).dump();
  {
    std::lock_guard guard(cache_lock);
    if (auto it = layout_cache.find(key); it != layout_cache.end()) return it->second;
  }
  auto bundle = std::make_shared<const ViewBundle>(compute_view(typed, view));
  std::lock_guard guard(cache_lock);
  ++cache_misses;
  return layout_cache.try_emplace(key, std::move(bundle)).first->second;
}

void Session::set_scheme(SchemeDocument doc) {
  doc.scheme.validate();
  Dataset next = apply_scheme(raw, doc.scheme);
  scheme = std::move(doc);
  typed = std::move(next);
  hyperblocks.clear();
  if (view.reference && !typed.find(*view.reference)) view.reference.reset();
  std::lock_guard guard(cache_lock);
  layout_cache.clear();
}

std::shared_ptr<Session> SessionStore::create(RawTable raw, std::optional<std::string> target) {
  auto s = std::make_shared<Session>();
  s->raw = std::move(raw);
  SchemeDocument doc;
  doc.scheme.target = std::move(target);
  doc.scheme.default_kind = ScaleKind::Nominal;
  s->set_scheme(std::move(doc));
  std::unique_lock guard(lock_);
  s->id = "d" + std::to_string(next_++);
  sessions_[s->id] = s;
  return s;
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
  std::shared_lock guard(lock_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown dataset id '" + id + "'", {}, id);
  return it->second;
}

std::size_t SessionStore::size() const {
  std::shared_lock guard(lock_);
  return sessions_.size();
}

int http_status(ErrorCode code) {
  switch (code) {
  case ErrorCode::NotFound: return 404;
  case ErrorCode::Io: return 500;
  default: return 400;
  }
}

} // namespace hetviz
