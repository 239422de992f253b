#include "hetviz/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hetviz {

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    if (c < 0x80) extra = 0;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) extra = 1;
    else if ((c & 0xF0) == 0xE0) extra = 2;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) extra = 3;
    else return false;
    if (i + extra >= s.size() + (extra == 0 ? 1 : 0) && extra) {
      if (i + extra >= s.size()) return false;
    }
    for (std::size_t k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    i += extra + 1;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double x = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

// Splits CSV text into records of fields. Quoted fields may hold delimiters,
// doubled quotes and newlines.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
  std::vector<bool> quoted;
};

std::vector<CsvRecord> split_records(std::string_view text, char delim) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false, was_quoted = false, record_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    current.quoted.push_back(was_quoted);
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(current));
    current = CsvRecord{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = was_quoted = record_has_content = true;
    } else if (c == delim) {
      record_has_content = true;
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      current.line = ++line;
    } else {
      if (c != ' ' && c != '\t') record_has_content = true;
      field.push_back(c);
    }
  }
  if (in_quotes) throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": unterminated quote");
  if (record_has_content || !field.empty()) end_record();
  return records;
}

} // namespace

std::optional<std::size_t> RawTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

RawTable parse_csv(std::string_view text, const CsvOptions& options) {
  if (!valid_utf8(text)) throw Error(ErrorCode::Parse, "input is not valid UTF-8");
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  auto records = split_records(text, options.delimiter);
  RawTable table;
  if (records.empty()) return table;

  auto clean = [&](const CsvRecord& rec, std::size_t i) {
    std::string s = rec.fields[i];
    if (options.trim && !rec.quoted[i]) s = std::string(trim(s));
    return s;
  };

  std::size_t first = 0;
  const std::size_t width = records.front().fields.size();
  if (options.has_header) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < width; ++i) {
      auto name = clean(records.front(), i);
      if (!seen.insert(name).second)
        throw Error(ErrorCode::Parse, "duplicate header name '" + name + "'", name);
      table.header.push_back(std::move(name));
    }
    first = 1;
  } else {
    for (std::size_t i = 0; i < width; ++i) table.header.push_back("X" + std::to_string(i + 1));
  }

  table.cells.reserve(records.size() - first);
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width)
      throw Error(ErrorCode::Parse, "line " + std::to_string(rec.line) + " (data row " +
                                        std::to_string(r - first + 1) + ") has " +
                                        std::to_string(rec.fields.size()) + " fields, expected " +
                                        std::to_string(width));
    std::vector<std::optional<std::string>> row;
    row.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
      auto s = clean(rec, i);
      if (!rec.quoted[i] && s == options.missing_token) row.emplace_back(std::nullopt);
      else row.emplace_back(std::move(s));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

RawTable read_csv_file(const std::string& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

// ---------------------------------------------------------------------------

bool is_encoder_kind(std::string_view id) {
  return std::find(kEncoderKinds.begin(), kEncoderKinds.end(), id) != kEncoderKinds.end();
}

namespace {

double interval_upper(const IntervalGroups& g, std::size_t i) {
  const auto& iv = g.intervals[i];
  double hi = iv.start + iv.length;
  // generated neighbours may disagree by an ulp; treat them as contiguous
  if (i + 1 < g.intervals.size()) {
    double next = g.intervals[i + 1].start;
    if (std::fabs(next - hi) <= 1e-9 * std::max(1.0, std::fabs(hi))) hi = next;
  }
  return hi;
}

} // namespace

std::optional<std::size_t> IntervalGroups::find(double x) const {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < intervals.size(); ++i)
    if (intervals[i].start <= x) hit = i;
  if (!hit) return std::nullopt;
  const bool last = *hit + 1 == intervals.size();
  const double hi = interval_upper(*this, *hit);
  if (x < hi || (last && x <= hi)) return hit;
  return std::nullopt;
}

std::string IntervalGroups::label(std::size_t i) const {
  const bool last = i + 1 == intervals.size();
  return "[" + format_number(intervals.at(i).start) + "," +
         format_number(interval_upper(*this, i)) + (last ? "]" : ")");
}

void validate_group_spec(const GroupSpec& spec, std::string_view attribute) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Schema, "attribute '" + std::string(attribute) + "': " + what,
                std::string(attribute));
  };
  if (auto vg = std::get_if<ValueGroups>(&spec)) {
    std::set<std::string> labels, values;
    for (const auto& g : vg->groups) {
      if (!labels.insert(g.label).second) fail("group label '" + g.label + "' repeated");
      for (const auto& v : g.values)
        if (!values.insert(v).second) fail("value '" + v + "' in two groups");
    }
    if (vg->default_group && !labels.count(*vg->default_group))
      fail("default group '" + *vg->default_group + "' is not a group");
  } else {
    const auto& ig = std::get<IntervalGroups>(spec);
    if (ig.intervals.empty()) fail("interval grouping has no intervals");
    for (std::size_t i = 0; i < ig.intervals.size(); ++i) {
      const auto& iv = ig.intervals[i];
      if (!std::isfinite(iv.start) || !std::isfinite(iv.length) || iv.length <= 0)
        fail("interval " + std::to_string(i + 1) + " needs a finite start and positive length");
      if (i > 0) {
        const double prev_hi = interval_upper(ig, i - 1);
        if (iv.start < prev_hi) fail("intervals overlap or are out of order");
      }
    }
  }
}

const SchemeEntry* CodingScheme::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

void CodingScheme::validate() const {
  std::set<std::string> names;
  for (const auto& e : entries) {
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::Schema, "attribute '" + e.name + "': " + what, e.name);
    };
    if (e.name.empty()) throw Error(ErrorCode::Schema, "scheme entry without a name");
    if (!names.insert(e.name).second) fail("appears twice in the scheme");
    if (!is_encoder_kind(e.encoder)) fail("unknown encoder '" + e.encoder + "'");
    if (e.group) validate_group_spec(*e.group, e.name);

    std::set<std::string> coded;
    std::set<double> code_values;
    for (const auto& [value, code] : e.codes) {
      if (!std::isfinite(code)) fail("code for '" + value + "' is not finite");
      if (!coded.insert(value).second) fail("value '" + value + "' coded twice");
      if (!code_values.insert(code).second && !e.lossy)
        fail("explicit codes are not injective (code " + format_number(code) +
             "); mark the entry lossy to allow it");
    }
    if (e.mtype.kind() == ScaleKind::Ordinal) {
      const bool has_order = !e.order.empty() || e.group.has_value() || !e.codes.empty();
      if (!has_order) fail("ordinal entry needs a declared order");
      std::set<std::string> seen;
      for (const auto& v : e.order)
        if (!seen.insert(v).second) fail("declared order repeats '" + v + "'");
      if (!e.order.empty() && !e.codes.empty()) {
        std::optional<double> prev;
        for (const auto& v : e.order) {
          auto it = std::find_if(e.codes.begin(), e.codes.end(),
                                 [&](const auto& p) { return p.first == v; });
          if (it == e.codes.end()) fail("ordered value '" + v + "' has no code");
          if (prev && it->second <= *prev) fail("codes must increase along the declared order");
          prev = it->second;
        }
      }
      auto integral = [](double c) { return c >= 0 && c == std::floor(c); };
      for (const auto& [value, code] : e.codes)
        if (!integral(code)) fail("ordinal code for '" + value + "' is not a non-negative integer");
    } else if (!e.order.empty()) {
      fail("declared order is only meaningful for ordinal entries");
    }
    if (!e.similarity_groups.empty()) {
      Attribute probe;
      probe.name = e.name;
      probe.mtype = e.mtype;
      probe.similarity_groups = e.similarity_groups;
      probe.declared_order = {};
      if (e.mtype.kind() != ScaleKind::Ordinal) probe.validate();
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

struct CodedColumn {
  Attribute attribute;
  std::vector<Value> values;
};

[[noreturn]] void no_code(const std::string& attr, const std::string& value) {
  throw Error(ErrorCode::UnknownValue,
              "attribute '" + attr + "': value '" + value + "' has no code and no default", attr,
              value);
}

double numeric_cell(const std::string& attr, const std::string& text) {
  auto x = parse_number(text);
  if (!x)
    throw Error(ErrorCode::TypeViolation, "attribute '" + attr + "': value '" + text + "' is not numeric",
                attr, text);
  return *x;
}

// Maps one raw value to (group label, group code) under a grouping.
std::pair<std::string, double> group_of(const SchemeEntry& e, const GroupSpec& spec,
                                        const std::string& text) {
  if (auto vg = std::get_if<ValueGroups>(&spec)) {
    for (const auto& g : vg->groups)
      if (std::find(g.values.begin(), g.values.end(), text) != g.values.end()) return {g.label, g.code};
    if (vg->default_group)
      for (const auto& g : vg->groups)
        if (g.label == *vg->default_group) return {g.label, g.code};
    no_code(e.name, text);
  }
  const auto& ig = std::get<IntervalGroups>(spec);
  double x = numeric_cell(e.name, text);
  auto i = ig.find(x);
  if (!i) no_code(e.name, text);
  return {ig.label(*i), ig.intervals[*i].code};
}

std::optional<double> explicit_code(const SchemeEntry& e, const std::string& text) {
  for (const auto& [value, code] : e.codes)
    if (value == text) return code;
  return e.default_code;
}

CodedColumn code_column(const RawTable& raw, std::size_t c, const SchemeEntry& e) {
  CodedColumn out;
  Attribute& attr = out.attribute;
  attr.name = e.name;
  attr.mtype = e.mtype;
  attr.modality = e.modality;
  attr.similarity_groups = e.similarity_groups;
  attr.grouped = e.group.has_value();
  out.values.reserve(raw.num_rows());

  const auto kind = e.mtype.kind();
  if (e.mtype.is_numeric()) {
    for (const auto& row : raw.cells) {
      const auto& cell = row[c];
      if (!cell) {
        out.values.emplace_back(Missing{});
      } else if (e.group) {
        out.values.emplace_back(group_of(e, *e.group, *cell).second);
      } else if (!e.codes.empty() || e.default_code) {
        auto code = explicit_code(e, *cell);
        if (!code) no_code(e.name, *cell);
        out.values.emplace_back(*code);
      } else {
        out.values.emplace_back(numeric_cell(e.name, *cell));
      }
    }
    return out;
  }

  // Nominal / Ordinal: resolve (symbol, code) per row.
  std::vector<std::optional<std::pair<std::string, double>>> resolved;
  resolved.reserve(raw.num_rows());
  std::unordered_map<std::string, double> first_seen;
  std::vector<std::string> appearance;
  for (const auto& row : raw.cells) {
    const auto& cell = row[c];
    if (!cell) {
      resolved.emplace_back(std::nullopt);
      continue;
    }
    if (e.group) {
      resolved.emplace_back(group_of(e, *e.group, *cell));
    } else if (!e.codes.empty() || e.default_code) {
      auto code = explicit_code(e, *cell);
      if (!code) no_code(e.name, *cell);
      resolved.emplace_back(std::pair{*cell, *code});
    } else if (kind == ScaleKind::Ordinal) {
      auto pos = std::find(e.order.begin(), e.order.end(), *cell);
      if (pos == e.order.end())
        throw Error(ErrorCode::UnknownValue,
                    "attribute '" + e.name + "': value '" + *cell + "' is not in the declared order",
                    e.name, *cell);
      resolved.emplace_back(std::pair{*cell, double(pos - e.order.begin() + 1)});
    } else {
      auto [it, inserted] = first_seen.try_emplace(*cell, double(first_seen.size() + 1));
      resolved.emplace_back(std::pair{*cell, it->second});
    }
    if (!first_seen.count(resolved.back()->first) && (e.group || !e.codes.empty() || e.default_code))
      first_seen.emplace(resolved.back()->first, resolved.back()->second);
  }

  for (const auto& r : resolved)
    if (r) attr.codes[r->first] = r->second;
  // declared codes for unobserved values are kept so thresholds can be rewritten
  if (!e.group)
    for (const auto& [value, code] : e.codes) attr.codes.emplace(value, code);
  if (auto vg = e.group ? std::get_if<ValueGroups>(&*e.group) : nullptr)
    for (const auto& g : vg->groups) attr.codes.emplace(g.label, g.code);
  if (auto ig = e.group ? std::get_if<IntervalGroups>(&*e.group) : nullptr)
    for (std::size_t i = 0; i < ig->intervals.size(); ++i)
      attr.codes.emplace(ig->label(i), ig->intervals[i].code);

  if (kind == ScaleKind::Ordinal) {
    if (!e.order.empty() && !e.group) {
      attr.declared_order = e.order;
      if (!e.codes.empty() || e.default_code)
        for (const auto& v : e.order)
          if (!attr.codes.count(v)) no_code(e.name, v);
      if (e.codes.empty() && !e.default_code)
        for (std::size_t i = 0; i < e.order.size(); ++i) attr.codes[e.order[i]] = double(i + 1);
    } else {
      std::vector<std::pair<double, std::string>> by_code;
      for (const auto& [symbol, code] : attr.codes) by_code.emplace_back(code, symbol);
      std::sort(by_code.begin(), by_code.end());
      for (const auto& [code, symbol] : by_code) attr.declared_order.push_back(symbol);
    }
    // codes beyond the declared order are dropped so ranks stay consistent
    for (auto it = attr.codes.begin(); it != attr.codes.end();) {
      if (std::find(attr.declared_order.begin(), attr.declared_order.end(), it->first) ==
          attr.declared_order.end())
        it = attr.codes.erase(it);
      else
        ++it;
    }
    for (std::size_t r = 0; r < resolved.size(); ++r) {
      if (!resolved[r]) {
        out.values.emplace_back(Missing{});
        continue;
      }
      const auto& [symbol, code] = *resolved[r];
      if (code < 0 || code != std::floor(code))
        throw Error(ErrorCode::Schema,
                    "attribute '" + e.name + "': ordinal code of '" + symbol + "' is not a non-negative integer",
                    e.name, symbol);
      out.values.emplace_back(Level{symbol, static_cast<std::uint32_t>(code)});
    }
  } else {
    for (const auto& r : resolved) {
      if (!r) out.values.emplace_back(Missing{});
      else out.values.emplace_back(Category{r->first});
    }
  }
  return out;
}

SchemeEntry default_entry(const std::string& name, ScaleKind kind, const RawTable& raw,
                          std::size_t c) {
  SchemeEntry e;
  e.name = name;
  e.mtype = MeasurementType::make(kind, kind == ScaleKind::Cyclical ? std::optional(360.0)
                                                                   : std::nullopt);
  if (kind == ScaleKind::Ordinal) {
    std::set<std::string> distinct;
    for (const auto& row : raw.cells)
      if (row[c]) distinct.insert(*row[c]);
    e.order.assign(distinct.begin(), distinct.end());
    e.encoder = "ordinal";
    e.review = true;
  }
  return e;
}

} // namespace

Dataset apply_scheme(const RawTable& raw, const CodingScheme& scheme) {
  scheme.validate();
  for (const auto& e : scheme.entries)
    if (!raw.find(e.name))
      throw Error(ErrorCode::UnknownAttribute, "scheme entry '" + e.name + "' matches no column",
                  e.name);

  std::vector<Attribute> attrs;
  std::vector<std::vector<Value>> columns;
  std::vector<bool> keep_originals;
  for (std::size_t c = 0; c < raw.num_columns(); ++c) {
    const auto& name = raw.header[c];
    const SchemeEntry* e = scheme.find(name);
    SchemeEntry fallback;
    if (!e) {
      if (!scheme.default_kind)
        throw Error(ErrorCode::Schema, "attribute '" + name + "' has no scheme entry and no default type",
                    name);
      fallback = default_entry(name, *scheme.default_kind, raw, c);
      e = &fallback;
    }
    auto coded = code_column(raw, c, *e);
    attrs.push_back(std::move(coded.attribute));
    columns.push_back(std::move(coded.values));
    keep_originals.push_back(e->keep_original_values);
  }

  std::optional<std::size_t> target;
  if (scheme.target) {
    target = raw.find(*scheme.target);
    if (!target)
      throw Error(ErrorCode::UnknownAttribute, "target '" + *scheme.target + "' matches no column",
                  *scheme.target);
  }

  std::vector<Row> rows(raw.num_rows(), Row(raw.num_columns()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r][c] = std::move(columns[c][r]);

  Dataset ds(std::move(attrs), std::move(rows), target);
  for (std::size_t c = 0; c < raw.num_columns(); ++c) {
    if (!keep_originals[c]) continue;
    std::vector<std::string> text;
    text.reserve(raw.num_rows());
    for (const auto& row : raw.cells) text.push_back(row[c] ? *row[c] : std::string(kMissingLabel));
    ds.set_originals(c, std::move(text));
  }
  return ds;
}

CodingScheme bulk_assign(const RawTable& raw, ScaleKind kind) {
  if (kind != ScaleKind::Nominal && kind != ScaleKind::Ordinal)
    throw Error(ErrorCode::InvalidArgument, "bulk assignment is either nominal or ordinal");
  CodingScheme scheme;
  for (std::size_t c = 0; c < raw.num_columns(); ++c) {
    SchemeEntry e;
    e.name = raw.header[c];
    if (kind == ScaleKind::Nominal) {
      e.mtype = MeasurementType::nominal();
      e.encoder = "label";
      std::set<std::string> seen;
      for (const auto& row : raw.cells)
        if (row[c] && seen.insert(*row[c]).second) e.codes.emplace_back(*row[c], double(seen.size()));
    } else {
      e.mtype = MeasurementType::ordinal();
      e.encoder = "ordinal";
      e.review = true;
      std::set<std::string> distinct;
      for (const auto& row : raw.cells)
        if (row[c]) distinct.insert(*row[c]);
      e.order.assign(distinct.begin(), distinct.end());
      for (std::size_t i = 0; i < e.order.size(); ++i) e.codes.emplace_back(e.order[i], double(i + 1));
    }
    scheme.entries.push_back(std::move(e));
  }
  return scheme;
}

IntervalGroups generate_interval_groups(std::span<const double> values, double start, double length) {
  if (!std::isfinite(length) || length <= 0)
    throw Error(ErrorCode::InvalidArgument, "interval length must be positive");
  if (!std::isfinite(start)) throw Error(ErrorCode::InvalidArgument, "interval start must be finite");
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no observed values to group");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite observed value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto edge = [&](long long k) { return start + double(k) * length; };
  long long k0 = static_cast<long long>(std::floor((lo - start) / length));
  while (edge(k0) > lo) --k0;
  while (edge(k0 + 1) <= lo && edge(k0 + 1) < hi) ++k0;
  long long k1 = std::max(k0, static_cast<long long>(std::ceil((hi - start) / length)) - 1);
  while (edge(k1 + 1) < hi) ++k1;

  IntervalGroups out;
  for (long long k = k0; k <= k1; ++k)
    out.intervals.push_back({edge(k), edge(k + 1) - edge(k), double(k - k0 + 1)});
  return out;
}

IntervalGroups generate_interval_groups(const RawTable& raw, std::string_view column, double start,
                                        double length) {
  auto c = raw.find(column);
  if (!c)
    throw Error(ErrorCode::UnknownAttribute, "unknown column '" + std::string(column) + "'",
                std::string(column));
  std::vector<double> values;
  for (const auto& row : raw.cells)
    if (row[*c]) values.push_back(numeric_cell(std::string(column), *row[*c]));
  return generate_interval_groups(values, start, length);
}

DropResult drop_constant_attributes(const Dataset& ds) {
  std::vector<std::size_t> keep;
  std::vector<std::string> removed;
  for (std::size_t c = 0; c < ds.num_attributes(); ++c) {
    auto col = discretize(ds, c);
    const std::size_t distinct = col.size() - (col.missing_code ? 1 : 0);
    if (distinct <= 1 && ds.target() != c) removed.push_back(ds.attribute(c).name);
    else keep.push_back(c);
  }
  if (removed.empty()) return {ds, {}};
  return {ds.select(keep), std::move(removed)};
}

std::size_t NormalizedView::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(name) + "'",
              std::string(name));
}

std::vector<double> min_max_scale(std::span<const double> column) {
  double lo = INFINITY, hi = -INFINITY;
  for (double x : column)
    if (!std::isnan(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  std::vector<double> out(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    const double x = column[i];
    if (std::isnan(x)) out[i] = x;
    else if (hi == lo) out[i] = 0.5;
    else out[i] = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
  }
  return out;
}

NormalizedView normalize_unit_interval(const Dataset& ds) {
  NormalizedView view;
  for (std::size_t c = 0; c < ds.num_attributes(); ++c) {
    const auto& attr = ds.attribute(c);
    std::vector<double> raw(ds.num_rows());
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < ds.num_rows(); ++r) {
      auto x = attr.numeric(ds.at(r, c));
      raw[r] = x ? *x : NAN;
      if (x) {
        lo = std::min(lo, *x);
        hi = std::max(hi, *x);
      }
    }
    view.names.push_back(attr.name);
    view.columns.push_back(min_max_scale(raw));
    view.ranges.emplace_back(lo, hi);
  }
  return view;
}

} // namespace hetviz
