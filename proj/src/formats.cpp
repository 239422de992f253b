#include "hetviz/formats.hpp"

#include <cmath>
#include <limits>

#include "json_common.hpp"

namespace hetviz::formats {

using detail::number_json;
using detail::Reader;

json parse(std::string_view text) { return detail::parse_json(text); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json bound(double x) { return std::isinf(x) ? json(nullptr) : number_json(x); }

double read_bound(const Reader& in, const char* key, double fallback) {
  if (!in.has(key)) return fallback;
  return in.num(key);
}

std::uint32_t read_rank(const Reader& in, const char* key) {
  const double x = in.num(key);
  if (x < 0 || x != std::floor(x) || x > 4294967295.0) in.fail(std::string("field '") + key + "' must be a rank");
  return std::uint32_t(x);
}

std::vector<std::string> read_strings(const Reader& in, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : in.array(key)) {
    if (!v.is_string()) in.fail(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Expr read_expr(const json& j, const std::string& where) {
  Reader in(j, where);
  if (in.has("op")) {
    const auto op = in.str("op");
    std::vector<Expr> args;
    const auto& arr = in.array("args");
    for (std::size_t i = 0; i < arr.size(); ++i)
      args.push_back(read_expr(arr[i], in.at("args") + "/" + std::to_string(i)));
    if (op == "and") return Expr::all(std::move(args));
    if (op == "or") return Expr::any(std::move(args));
    if (op == "not") {
      if (args.size() != 1) in.fail("'not' takes exactly one argument");
      return Expr::negate(std::move(args[0]));
    }
    in.fail("unknown op '" + op + "'");
  }
  const auto kind = in.str("atom");
  const auto attr = in.str("attr");
  static const json empty = json::object();
  Reader p(in.has("params") ? in.get("params") : empty, in.at("params"), attr);
  if (kind == "equals") return Expr::leaf(Equals{attr, p.str("value")});
  if (kind == "not_equals") return Expr::leaf(NotEquals{attr, p.str("value")});
  if (kind == "in_set") return Expr::leaf(InSet{attr, read_strings(p, "values")});
  if (kind == "not_in_set") return Expr::negate(Expr::leaf(InSet{attr, read_strings(p, "values")}));
  if (kind == "in_rank_range") {
    InRankRange r{attr, read_rank(p, "start"), read_rank(p, "end")};
    if (r.start > r.end) p.fail("rank range start exceeds end");
    return Expr::leaf(r);
  }
  if (kind == "in_interval") {
    InInterval iv{attr, read_bound(p, "lo", -kInf), read_bound(p, "hi", kInf)};
    if (iv.lo > iv.hi) p.fail("interval lower end exceeds upper end");
    return Expr::leaf(iv);
  }
  if (kind == "pair_equals") return Expr::leaf(PairEquals{attr});
  in.fail("unknown atom '" + kind + "'");
}

json atom_json(const Atom& atom) {
  json out;
  json params = json::object();
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Equals>) {
          out["atom"] = "equals";
          params["value"] = a.value;
        } else if constexpr (std::is_same_v<T, NotEquals>) {
          out["atom"] = "not_equals";
          params["value"] = a.value;
        } else if constexpr (std::is_same_v<T, InSet>) {
          out["atom"] = "in_set";
          params["values"] = a.values;
        } else if constexpr (std::is_same_v<T, InRankRange>) {
          out["atom"] = "in_rank_range";
          params["start"] = a.start;
          params["end"] = a.end;
        } else if constexpr (std::is_same_v<T, InInterval>) {
          out["atom"] = "in_interval";
          params["lo"] = bound(a.lo);
          params["hi"] = bound(a.hi);
        } else {
          out["atom"] = "pair_equals";
        }
      },
      atom);
  out["attr"] = atom_attribute(atom);
  out["params"] = std::move(params);
  return out;
}

} // namespace

json to_json(const Expr& e) {
  if (e.op == Expr::Op::Atom) return atom_json(*e.atom);
  json out;
  out["op"] = e.op == Expr::Op::And ? "and" : e.op == Expr::Op::Or ? "or" : "not";
  out["args"] = json::array();
  for (const auto& a : e.args) out["args"].push_back(to_json(a));
  return out;
}

Expr expr_from_json(const json& j) { return read_expr(j, "expr"); }

json to_json(const Rule& r) {
  json out;
  out["antecedent"] = to_json(r.antecedent);
  out["consequent"] = r.consequent;
  if (r.else_class) out["else_class"] = *r.else_class;
  return out;
}

Rule rule_from_json(const json& j) {
  Reader in(j, "rule");
  Rule r;
  r.antecedent = read_expr(in.get("antecedent"), in.at("antecedent"));
  r.consequent = in.str("consequent");
  if (in.has("else_class")) r.else_class = in.str("else_class");
  return r;
}

json to_json(const RuleMetrics& m) {
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json out;
  out["rows"] = m.rows;
  out["coverage"] = m.coverage;
  out["correct"] = m.correct;
  out["precision"] = opt(m.precision);
  out["error_rate"] = opt(m.error_rate);
  out["else_covered"] = m.else_covered;
  out["else_correct"] = m.else_correct;
  out["accuracy"] = opt(m.accuracy);
  return out;
}

json to_json(const RuleViolation& v) {
  json out;
  out["atom"] = v.atom;
  out["attribute"] = v.attribute;
  out["relation"] = std::string(to_string(v.relation));
  out["reason"] = v.reason;
  return out;
}

json to_json(const HyperBlock& hb, const Dataset& schema) {
  json out;
  if (hb.label) out["label"] = *hb.label;
  out["constraints"] = json::array();
  for (const auto& ac : hb.constraints) {
    json c;
    c["attr"] = schema.attribute(ac.attribute).name;
    json params;
    if (auto b = std::get_if<NumericBand>(&ac.constraint)) {
      c["kind"] = "numeric_band";
      params["center"] = number_json(b->center);
      params["length"] = number_json(b->length);
    } else if (auto r = std::get_if<OrdinalRange>(&ac.constraint)) {
      c["kind"] = "ordinal_range";
      params["start"] = r->start;
      params["end"] = r->end;
    } else {
      c["kind"] = "nominal_set";
      params["values"] = std::get<NominalSet>(ac.constraint).values;
    }
    c["params"] = std::move(params);
    out["constraints"].push_back(std::move(c));
  }
  return out;
}

HyperBlock hyperblock_from_json(const json& j, const Dataset& schema) {
  Reader in(j, "hyperblock");
  HyperBlock hb;
  if (in.has("label")) hb.label = in.str("label");
  const auto& arr = in.array("constraints");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader c(arr[i], in.at("constraints") + "/" + std::to_string(i));
    const auto name = c.str("attr");
    const auto kind = c.str("kind");
    Reader p(c.get("params"), c.at("params"), name);
    AttributeConstraint ac{schema.index_of(name), {}};
    if (kind == "numeric_band") ac.constraint = NumericBand{p.num("center"), p.num("length")};
    else if (kind == "ordinal_range") ac.constraint = OrdinalRange{read_rank(p, "start"), read_rank(p, "end")};
    else if (kind == "nominal_set") ac.constraint = NominalSet{read_strings(p, "values")};
    else c.fail("unknown constraint kind '" + kind + "'");
    hb.constraints.push_back(std::move(ac));
  }
  std::sort(hb.constraints.begin(), hb.constraints.end(),
            [](const auto& a, const auto& b) { return a.attribute < b.attribute; });
  validate_hyperblock(hb, schema);
  return hb;
}

json to_json(const PurityStats& s) {
  json out;
  out["total"] = s.total;
  json per = json::object();
  for (std::size_t c = 0; c < s.classes.size(); ++c) per[s.classes[c]] = s.per_class[c];
  out["per_class"] = std::move(per);
  out["dominant"] = s.dominant ? json(s.classes[*s.dominant]) : json(nullptr);
  out["purity"] = s.purity;
  return out;
}

json to_json(const EdgeBundle& e) {
  json out;
  out["left"] = e.left;
  out["right"] = e.right;
  out["entries"] = json::array();
  for (const auto& x : e.entries)
    out["entries"].push_back({{"left", x.left}, {"right", x.right}, {"class", x.cls}, {"count", x.count}});
  return out;
}

json to_json(const AxisLayout& l, const EdgeBundle* outgoing) {
  json out;
  out["attribute"] = l.attribute;
  out["flipped"] = l.flipped;
  out["reference"] = l.reference ? json(*l.reference) : json(nullptr);
  out["classes"] = l.classes;
  out["rows"] = l.rows;
  out["bars"] = json::array();
  for (const auto& b : l.bars) {
    json bar;
    bar["group"] = b.group;
    bar["total"] = b.total;
    json per = json::object();
    for (std::size_t c = 0; c < b.per_class.size(); ++c) per[l.classes[c]] = b.per_class[c];
    bar["per_class"] = std::move(per);
    bar["dominant"] = b.dominant ? json(l.classes[*b.dominant]) : json(nullptr);
    bar["purity"] = b.purity;
    bar["height"] = b.height;
    bar["joined"] = b.joined;
    bar["members"] = b.members;
    out["bars"].push_back(std::move(bar));
  }
  json residual;
  residual["groups"] = l.residual.groups;
  residual["total"] = l.residual.total;
  json per = json::object();
  for (std::size_t c = 0; c < l.residual.per_class.size(); ++c) per[l.classes[c]] = l.residual.per_class[c];
  residual["per_class"] = std::move(per);
  out["residual"] = std::move(residual);
  if (outgoing) out["edges"] = to_json(*outgoing);
  return out;
}

json to_json(const EncodingResult& r) {
  json out;
  out["attribute"] = r.attribute;
  out["encoder"] = r.encoder;
  out["columns"] = json::array();
  for (const auto& c : r.columns) {
    json col;
    col["name"] = c.name;
    col["mtype"] = std::string(to_string(c.mtype.kind()));
    col["values"] = json::array();
    for (double v : c.values) col["values"].push_back(std::isnan(v) ? json(nullptr) : number_json(v));
    out["columns"].push_back(std::move(col));
  }
  out["code_map"] = json::array();
  for (const auto& [value, codes] : r.code_map) {
    json cs = json::array();
    for (double v : codes) cs.push_back(std::isnan(v) ? json(nullptr) : number_json(v));
    out["code_map"].push_back(json::array({value, std::move(cs)}));
  }
  out["lossy_collisions"] = r.lossy_collisions;
  out["interpretability_note"] = r.interpretability_note;
  return out;
}

json to_json(const ViewConfig& v) {
  json out;
  out["reference"] = v.reference ? json(*v.reference) : json(nullptr);
  out["purity"] = v.purity_threshold;
  out["min_block"] = v.min_block_size;
  out["small_block"] = v.small_block_threshold;
  out["join"] = v.join_nondominant;
  out["filter"] = v.filter;
  out["relocate"] = v.relocate;
  out["merge_small"] = v.merge_small;
  out["sort"] = std::string(to_string(v.sort_mode));
  out["color_priority"] = v.color_priority;
  out["axis_order"] = v.axis_order;
  out["flips"] = json::array();
  for (const auto& f : v.flips) out["flips"].push_back(f);
  out["line_width"] = v.line_width_mode == LineWidthMode::Uniform ? "uniform" : "frequency_weighted";
  json colors = json::object();
  for (const auto& [k, c] : v.color_map) colors[k] = c;
  out["color_map"] = std::move(colors);
  return out;
}

ViewConfig view_from_json(const json& j, const ViewConfig& base) {
  Reader in(j, "view");
  ViewConfig v = base;
  if (j.contains("reference")) v.reference = in.has("reference") ? std::optional(in.str("reference")) : std::nullopt;
  if (in.has("purity")) v.purity_threshold = in.num("purity");
  if (in.has("min_block")) v.min_block_size = in.num("min_block");
  if (in.has("small_block")) v.small_block_threshold = in.num("small_block");
  v.join_nondominant = in.flag("join", v.join_nondominant);
  v.filter = in.flag("filter", v.filter);
  v.relocate = in.flag("relocate", v.relocate);
  v.merge_small = in.flag("merge_small", v.merge_small);
  if (in.has("sort")) {
    auto mode = parse_sort_mode(in.str("sort"));
    if (!mode) in.fail("unknown sort mode '" + in.str("sort") + "'");
    v.sort_mode = *mode;
  }
  if (in.has("color_priority")) v.color_priority = read_strings(in, "color_priority");
  if (in.has("axis_order")) v.axis_order = read_strings(in, "axis_order");
  if (in.has("flips")) {
    auto f = read_strings(in, "flips");
    v.flips = {f.begin(), f.end()};
  }
  if (in.has("line_width")) {
    const auto m = in.str("line_width");
    if (m == "uniform") v.line_width_mode = LineWidthMode::Uniform;
    else if (m == "frequency_weighted") v.line_width_mode = LineWidthMode::FrequencyWeighted;
    else in.fail("unknown line width mode '" + m + "'");
  }
  if (in.has("color_map")) {
    const auto& m = in.get("color_map");
    if (!m.is_object()) in.fail("field 'color_map' must be an object");
    v.color_map.clear();
    for (const auto& [k, c] : m.items()) {
      if (!c.is_string()) in.fail("color_map values must be strings");
      v.color_map[k] = c.get<std::string>();
    }
  }
  try {
    v.validate();
  } catch (const Error& e) {
    in.fail(e.what());
  }
  return v;
}

json error_json(const Error& e) {
  json out;
  out["code"] = std::string(to_string(e.code()));
  out["message"] = e.what();
  if (!e.attribute().empty()) out["attribute"] = e.attribute();
  if (!e.value().empty()) out["value"] = e.value();
  return out;
}

} // namespace hetviz::formats
