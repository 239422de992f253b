// Scheme documents and typed dataset files.

#include <cmath>

#include "hetviz/ingest.hpp"
#include "json_common.hpp"

namespace hetviz {

using detail::number_json;
using detail::ojson;
using detail::Reader;

namespace {

MeasurementType read_mtype(const Reader& in) {
  auto kind_text = in.str("mtype");
  auto kind = scale_from_string(kind_text);
  if (!kind) in.fail("unknown mtype '" + kind_text + "'");
  std::optional<double> period;
  if (in.has("period")) period = in.num("period");
  try {
    return MeasurementType::make(*kind, period);
  } catch (const Error& e) {
    in.fail(e.what());
  }
}

void write_mtype(ojson& out, const MeasurementType& m) {
  out["mtype"] = std::string(to_string(m.kind()));
  if (m.period()) out["period"] = number_json(*m.period());
}

std::vector<std::string> read_strings(const Reader& in, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : in.array(key)) {
    if (!v.is_string()) in.fail(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

ojson similarity_json(const std::vector<SimilarityGroup>& groups) {
  ojson arr = ojson::array();
  for (const auto& g : groups) {
    ojson members = ojson::array();
    for (const auto& [value, code] : g.members) members.push_back(ojson::array({value, code}));
    arr.push_back(ojson{{"label", g.label}, {"members", members}});
  }
  return arr;
}

std::vector<SimilarityGroup> read_similarity(const Reader& in) {
  std::vector<SimilarityGroup> out;
  const auto& arr = in.array("similarity_groups");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader g(arr[i], in.at("similarity_groups") + "/" + std::to_string(i));
    SimilarityGroup group{g.str("label"), {}};
    for (const auto& m : g.array("members")) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_number_integer())
        g.fail("members are [value, integer code] pairs");
      group.members.emplace_back(m[0].get<std::string>(), m[1].get<int>());
    }
    out.push_back(std::move(group));
  }
  return out;
}

ojson group_json(const GroupSpec& spec) {
  if (auto vg = std::get_if<ValueGroups>(&spec)) {
    ojson groups = ojson::array();
    for (const auto& g : vg->groups)
      groups.push_back(ojson{{"label", g.label}, {"code", number_json(g.code)}, {"values", g.values}});
    ojson out{{"values", groups}};
    if (vg->default_group) out["default"] = *vg->default_group;
    return out;
  }
  ojson intervals = ojson::array();
  for (const auto& iv : std::get<IntervalGroups>(spec).intervals)
    intervals.push_back(ojson{{"start", number_json(iv.start)},
                              {"length", number_json(iv.length)},
                              {"code", number_json(iv.code)}});
  return ojson{{"intervals", intervals}};
}

GroupSpec read_group(const Reader& in) {
  Reader g(in.get("groups"), in.at("groups"));
  if (g.has("values") == g.has("intervals")) g.fail("groups hold exactly one of 'values' or 'intervals'");
  if (g.has("values")) {
    ValueGroups out;
    const auto& arr = g.array("values");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader item(arr[i], g.at("values") + "/" + std::to_string(i));
      out.groups.push_back({item.str("label"), item.num("code"), read_strings(item, "values")});
    }
    if (g.has("default")) out.default_group = g.str("default");
    return out;
  }
  IntervalGroups out;
  const auto& arr = g.array("intervals");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader item(arr[i], g.at("intervals") + "/" + std::to_string(i));
    out.intervals.push_back({item.num("start"), item.num("length"), item.num("code")});
  }
  return out;
}

ojson node_json(const HierarchyNode& n) {
  ojson out{{"name", n.name}};
  if (n.attribute) out["attribute"] = *n.attribute;
  if (!n.children.empty()) {
    ojson kids = ojson::array();
    for (const auto& c : n.children) kids.push_back(node_json(c));
    out["children"] = kids;
  }
  return out;
}

HierarchyNode read_node(const ojson& j, const std::string& where) {
  Reader in(j, where);
  HierarchyNode n{in.str("name"), std::nullopt, {}};
  if (in.has("attribute")) {
    const auto& a = in.get("attribute");
    if (!a.is_number_unsigned()) in.fail("'attribute' must be a non-negative integer");
    n.attribute = a.get<std::size_t>();
  }
  if (in.has("children")) {
    const auto& kids = in.array("children");
    for (std::size_t i = 0; i < kids.size(); ++i)
      n.children.push_back(read_node(kids[i], in.at("children") + "/" + std::to_string(i)));
  }
  return n;
}

} // namespace

std::string save_scheme(const SchemeDocument& doc) {
  ojson out;
  out["version"] = doc.version;
  if (doc.scheme.target) out["target"] = *doc.scheme.target;
  if (doc.scheme.default_kind) out["default_mtype"] = std::string(to_string(*doc.scheme.default_kind));
  ojson attrs = ojson::array();
  for (const auto& e : doc.scheme.entries) {
    ojson a{{"name", e.name}};
    write_mtype(a, e.mtype);
    a["encoder"] = e.encoder;
    if (!e.order.empty()) a["order"] = e.order;
    if (e.group) a["groups"] = group_json(*e.group);
    if (!e.codes.empty()) {
      ojson codes = ojson::array();
      for (const auto& [value, code] : e.codes) codes.push_back(ojson::array({value, number_json(code)}));
      a["codes"] = codes;
    }
    if (e.default_code) a["default_code"] = number_json(*e.default_code);
    if (e.keep_original_values) a["keep_original_values"] = true;
    if (e.lossy) a["lossy"] = true;
    if (e.review) a["review"] = true;
    if (!e.modality.empty()) a["modality"] = e.modality;
    if (!e.similarity_groups.empty()) a["similarity_groups"] = similarity_json(e.similarity_groups);
    attrs.push_back(std::move(a));
  }
  out["attributes"] = attrs;
  if (doc.hierarchy)
    out["hierarchy"] = ojson{{"active_level", doc.hierarchy->active_level}, {"root", node_json(doc.hierarchy->root)}};
  return out.dump(2) + "\n";
}

SchemeDocument load_scheme(std::string_view bytes) {
  auto j = detail::parse_json(bytes);
  Reader top(j, "");
  SchemeDocument doc;
  const auto& version = top.get("version");
  if (!version.is_number_integer()) top.fail("'version' must be an integer");
  doc.version = version.get<int>();
  if (doc.version != SchemeDocument::kVersion)
    top.fail("unsupported scheme version " + std::to_string(doc.version) + " (expected " +
             std::to_string(SchemeDocument::kVersion) + ")");
  if (top.has("target")) doc.scheme.target = top.str("target");
  if (top.has("default_mtype")) {
    auto text = top.str("default_mtype");
    doc.scheme.default_kind = scale_from_string(text);
    if (!doc.scheme.default_kind) top.fail("unknown default_mtype '" + text + "'");
  }

  const auto& attrs = top.array("attributes");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const std::string where = "/attributes/" + std::to_string(i);
    std::string name;
    if (attrs[i].is_object() && attrs[i].contains("name") && attrs[i]["name"].is_string())
      name = attrs[i]["name"].get<std::string>();
    Reader in(attrs[i], where, name);
    SchemeEntry e;
    e.name = in.str("name");
    e.mtype = read_mtype(in);
    if (in.has("encoder")) {
      e.encoder = in.str("encoder");
      if (!is_encoder_kind(e.encoder)) in.fail("unknown encoder '" + e.encoder + "'");
    }
    if (in.has("order")) e.order = read_strings(in, "order");
    if (in.has("groups")) e.group = read_group(in);
    if (in.has("codes")) {
      for (const auto& pair : in.array("codes")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number())
          in.fail("codes are [value, number] pairs");
        e.codes.emplace_back(pair[0].get<std::string>(), pair[1].get<double>());
      }
    }
    if (in.has("default_code")) e.default_code = in.num("default_code");
    e.keep_original_values = in.flag("keep_original_values");
    e.lossy = in.flag("lossy");
    e.review = in.flag("review");
    if (in.has("modality")) e.modality = in.str("modality");
    if (in.has("similarity_groups")) e.similarity_groups = read_similarity(in);
    doc.scheme.entries.push_back(std::move(e));
  }
  if (top.has("hierarchy")) {
    Reader h(top.get("hierarchy"), "/hierarchy");
    AttributeHierarchy hier;
    const auto& level = h.get("active_level");
    if (!level.is_number_unsigned()) h.fail("'active_level' must be a non-negative integer");
    hier.active_level = level.get<std::size_t>();
    hier.root = read_node(h.get("root"), "/hierarchy/root");
    try {
      hier.validate(doc.scheme.entries.size());
    } catch (const Error& e) {
      h.fail(e.what());
    }
    doc.hierarchy = std::move(hier);
  }
  doc.scheme.validate();
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kDatasetVersion = 1;

ojson attribute_json(const Attribute& a) {
  ojson out{{"name", a.name}};
  write_mtype(out, a.mtype);
  if (!a.declared_order.empty()) out["order"] = a.declared_order;
  if (!a.modality.empty()) out["modality"] = a.modality;
  if (!a.codes.empty()) {
    ojson codes = ojson::array();
    for (const auto& [symbol, code] : a.codes) codes.push_back(ojson::array({symbol, number_json(code)}));
    out["codes"] = codes;
  }
  if (!a.similarity_groups.empty()) out["similarity_groups"] = similarity_json(a.similarity_groups);
  if (a.grouped) out["grouped"] = true;
  return out;
}

Attribute read_attribute(const ojson& j, const std::string& where) {
  std::string name = j.is_object() && j.contains("name") && j["name"].is_string()
                         ? j["name"].get<std::string>()
                         : std::string();
  Reader in(j, where, name);
  Attribute a;
  a.name = in.str("name");
  a.mtype = read_mtype(in);
  if (in.has("order")) a.declared_order = read_strings(in, "order");
  if (in.has("modality")) a.modality = in.str("modality");
  if (in.has("codes"))
    for (const auto& pair : in.array("codes")) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number())
        in.fail("codes are [symbol, number] pairs");
      a.codes[pair[0].get<std::string>()] = pair[1].get<double>();
    }
  if (in.has("similarity_groups")) a.similarity_groups = read_similarity(in);
  a.grouped = in.flag("grouped");
  return a;
}

} // namespace

std::string save_dataset(const Dataset& ds) {
  ojson out;
  out["version"] = kDatasetVersion;
  out["target"] = ds.target() ? ojson(*ds.target()) : ojson(nullptr);
  ojson attrs = ojson::array();
  for (const auto& a : ds.attributes()) attrs.push_back(attribute_json(a));
  out["attributes"] = attrs;
  ojson rows = ojson::array();
  for (const auto& row : ds.rows()) {
    ojson r = ojson::array();
    for (const auto& v : row) {
      if (is_missing(v)) r.push_back(nullptr);
      else if (auto d = std::get_if<double>(&v)) r.push_back(number_json(*d));
      else r.push_back(display(v));
    }
    rows.push_back(std::move(r));
  }
  out["rows"] = rows;
  ojson originals = ojson::object();
  for (std::size_t c = 0; c < ds.num_attributes(); ++c)
    if (ds.originals(c)) originals[ds.attribute(c).name] = *ds.originals(c);
  if (!originals.empty()) out["originals"] = originals;
  return out.dump() + "\n";
}

Dataset load_dataset(std::string_view bytes) {
  auto j = detail::parse_json(bytes);
  Reader top(j, "");
  const auto& version = top.get("version");
  if (!version.is_number_integer() || version.get<int>() != kDatasetVersion)
    top.fail("unsupported dataset version");

  std::vector<Attribute> attrs;
  const auto& aj = top.array("attributes");
  for (std::size_t i = 0; i < aj.size(); ++i)
    attrs.push_back(read_attribute(aj[i], "/attributes/" + std::to_string(i)));

  std::optional<std::size_t> target;
  if (top.has("target")) {
    const auto& t = top.get("target");
    if (!t.is_number_unsigned()) top.fail("'target' must be an attribute index or null");
    target = t.get<std::size_t>();
  }

  std::vector<Row> rows;
  const auto& rj = top.array("rows");
  rows.reserve(rj.size());
  for (std::size_t r = 0; r < rj.size(); ++r) {
    const auto& row = rj[r];
    const std::string where = "/rows/" + std::to_string(r);
    if (!row.is_array() || row.size() != attrs.size())
      throw Error(ErrorCode::Parse, "at " + where + ": expected " + std::to_string(attrs.size()) + " values");
    Row out;
    out.reserve(attrs.size());
    for (std::size_t c = 0; c < attrs.size(); ++c) {
      const auto& cell = row[c];
      const auto& a = attrs[c];
      auto bad = [&] {
        throw Error(ErrorCode::Parse,
                    "at " + where + "/" + std::to_string(c) + " (attribute '" + a.name + "'): value of wrong kind",
                    a.name);
      };
      if (cell.is_null()) {
        out.emplace_back(Missing{});
      } else if (a.mtype.is_numeric()) {
        if (!cell.is_number()) bad();
        out.emplace_back(cell.get<double>());
      } else {
        if (!cell.is_string()) bad();
        auto symbol = cell.get<std::string>();
        if (a.mtype.kind() == ScaleKind::Nominal) {
          out.emplace_back(Category{std::move(symbol)});
        } else {
          auto rank = a.rank_of(symbol);
          if (!rank)
            throw Error(ErrorCode::Parse,
                        "at " + where + ": '" + symbol + "' is not in the order of '" + a.name + "'", a.name,
                        symbol);
          out.emplace_back(Level{std::move(symbol), *rank});
        }
      }
    }
    rows.push_back(std::move(out));
  }

  Dataset ds(std::move(attrs), std::move(rows), target);
  if (top.has("originals")) {
    const auto& oj = top.get("originals");
    if (!oj.is_object()) top.fail("'originals' must be an object");
    for (const auto& [name, values] : oj.items()) {
      auto c = ds.find(name);
      if (!c || !values.is_array()) top.fail("bad originals entry '" + name + "'");
      std::vector<std::string> text;
      for (const auto& v : values) {
        if (!v.is_string()) top.fail("originals hold strings");
        text.push_back(v.get<std::string>());
      }
      ds.set_originals(*c, std::move(text));
    }
  }
  return ds;
}

} // namespace hetviz
