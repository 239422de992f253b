#include "hetviz/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace hetviz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::Parse: return "parse_error";
  case ErrorCode::Schema: return "schema_error";
  case ErrorCode::TypeViolation: return "type_violation";
  case ErrorCode::UnknownValue: return "unknown_value";
  case ErrorCode::UnknownAttribute: return "unknown_attribute";
  case ErrorCode::InvalidArgument: return "invalid_argument";
  case ErrorCode::NotFound: return "not_found";
  case ErrorCode::Io: return "io_error";
  }
  return "error";
}

std::string_view to_string(ScaleKind kind) {
  switch (kind) {
  case ScaleKind::Nominal: return "nominal";
  case ScaleKind::Ordinal: return "ordinal";
  case ScaleKind::Interval: return "interval";
  case ScaleKind::Ratio: return "ratio";
  case ScaleKind::Absolute: return "absolute";
  case ScaleKind::Cyclical: return "cyclical";
  }
  return "nominal";
}

std::optional<ScaleKind> scale_from_string(std::string_view text) {
  for (auto k : {ScaleKind::Nominal, ScaleKind::Ordinal, ScaleKind::Interval, ScaleKind::Ratio,
                 ScaleKind::Absolute, ScaleKind::Cyclical})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

MeasurementType MeasurementType::cyclical(double period) {
  if (!std::isfinite(period) || period <= 0)
    throw Error(ErrorCode::InvalidArgument, "cyclical period must be finite and positive");
  return MeasurementType(ScaleKind::Cyclical, period);
}

MeasurementType MeasurementType::make(ScaleKind kind, std::optional<double> period) {
  if (kind == ScaleKind::Cyclical) {
    if (!period) throw Error(ErrorCode::InvalidArgument, "cyclical type requires a period");
    return cyclical(*period);
  }
  if (period) throw Error(ErrorCode::InvalidArgument, "only cyclical types carry a period");
  return MeasurementType(kind);
}

std::string_view to_string(Relation rel) {
  switch (rel) {
  case Relation::Equality: return "equality";
  case Relation::Order: return "order";
  case Relation::Difference: return "difference";
  case Relation::DifferenceComparison: return "difference_comparison";
  case Relation::RatioOp: return "ratio";
  case Relation::CyclicDifference: return "cyclic_difference";
  }
  return "equality";
}

RelationSet permitted_relations(const MeasurementType& mtype) {
  using R = Relation;
  switch (mtype.permission_kind()) {
  case ScaleKind::Nominal: return {R::Equality};
  case ScaleKind::Ordinal: return {R::Equality, R::Order};
  case ScaleKind::Interval: return {R::Equality, R::Order, R::Difference, R::DifferenceComparison};
  case ScaleKind::Ratio:
  case ScaleKind::Absolute:
    return {R::Equality, R::Order, R::Difference, R::DifferenceComparison, R::RatioOp};
  case ScaleKind::Cyclical: return {R::Equality, R::CyclicDifference, R::DifferenceComparison};
  }
  return {R::Equality};
}

// ---------------------------------------------------------------------------

std::string format_number(double x) {
  if (x == 0) return "0"; // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string display(const Value& v) {
  struct {
    std::string operator()(const Missing&) const { return std::string(kMissingLabel); }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(const Category& c) const { return c.symbol; }
    std::string operator()(const Level& l) const { return l.symbol; }
  } visitor;
  return std::visit(visitor, v);
}

// ---------------------------------------------------------------------------

std::optional<double> Attribute::code_of(std::string_view symbol) const {
  auto it = codes.find(std::string(symbol));
  if (it == codes.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Attribute::rank_of(std::string_view symbol) const {
  auto pos = std::find(declared_order.begin(), declared_order.end(), symbol);
  if (pos == declared_order.end()) return std::nullopt;
  if (!codes.empty()) {
    auto c = code_of(symbol);
    if (!c) return std::nullopt;
    return static_cast<std::uint32_t>(*c);
  }
  return static_cast<std::uint32_t>(pos - declared_order.begin() + 1);
}

std::optional<double> Attribute::numeric(const Value& v) const {
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto c = std::get_if<Category>(&v)) return code_of(c->symbol);
  if (auto l = std::get_if<Level>(&v)) return static_cast<double>(l->rank);
  return std::nullopt;
}

std::optional<int> Attribute::similarity_code(std::string_view symbol) const {
  for (const auto& g : similarity_groups)
    for (const auto& [value, code] : g.members)
      if (value == symbol) return code;
  return std::nullopt;
}

std::optional<std::size_t> Attribute::similarity_group_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < similarity_groups.size(); ++i)
    for (const auto& member : similarity_groups[i].members)
      if (member.first == symbol) return i;
  return std::nullopt;
}

void Attribute::validate() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Schema, "attribute '" + name + "': " + what, name);
  };
  if (name.empty()) throw Error(ErrorCode::Schema, "attribute with empty name");
  if (mtype.kind() == ScaleKind::Ordinal) {
    std::set<std::string> seen;
    std::set<std::uint32_t> ranks;
    for (const auto& v : declared_order) {
      if (!seen.insert(v).second) fail("declared order repeats '" + v + "'");
      auto c = codes.empty() ? std::optional<double>(double(seen.size())) : code_of(v);
      if (!c) fail("no rank for ordinal value '" + v + "'");
      if (*c < 0 || *c != std::floor(*c) || *c > 4294967295.0)
        fail("rank of '" + v + "' is not a non-negative integer");
      if (!ranks.insert(static_cast<std::uint32_t>(*c)).second)
        fail("rank of '" + v + "' is not unique");
    }
  } else if (!declared_order.empty()) {
    fail("declared order is only meaningful for ordinal attributes");
  }
  if (!similarity_groups.empty()) {
    std::set<std::string> seen;
    std::optional<int> last;
    for (const auto& g : similarity_groups) {
      if (g.members.empty()) fail("similarity group '" + g.label + "' is empty");
      for (const auto& [value, code] : g.members) {
        if (!seen.insert(value).second) fail("value '" + value + "' appears in two groups");
        if (last && code <= *last) fail("similarity codes must be strictly increasing");
        last = code;
      }
    }
  }
}

Permit check_operation(const Attribute& attr, Relation rel) {
  if (permitted_relations(attr.mtype).contains(rel)) return Permit::allow();
  if (rel == Relation::DifferenceComparison && !attr.similarity_groups.empty())
    return Permit::allow();
  return Permit::forbid(std::string(to_string(rel)) + " is not meaningful for " +
                        std::string(to_string(attr.mtype.kind())) + " attribute '" + attr.name +
                        "'");
}

double cyclic_difference(double a, double b, double period) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(period))
    throw Error(ErrorCode::InvalidArgument, "cyclic_difference requires finite inputs");
  if (period <= 0) throw Error(ErrorCode::InvalidArgument, "cyclic period must be positive");
  double d = std::fmod(std::fabs(a - b), period);
  return std::min(d, period - d);
}

DifferenceComparisonResult compare_differences(const Attribute& attr,
                                               const std::pair<Value, Value>& pair1,
                                               const std::pair<Value, Value>& pair2) {
  for (const Value* v : {&pair1.first, &pair1.second, &pair2.first, &pair2.second})
    if (is_missing(*v)) return {Permit::forbid("unknown: comparison involves a missing value"), {}};

  if (!attr.similarity_groups.empty()) {
    auto lookup = [&](const Value& v) {
      auto symbol = display(v);
      auto code = attr.similarity_code(symbol);
      if (!code)
        throw Error(ErrorCode::UnknownValue,
                    "value '" + symbol + "' is not coded in attribute '" + attr.name + "'",
                    attr.name, symbol);
      return std::pair{*code, *attr.similarity_group_of(symbol)};
    };
    auto [a1, ga1] = lookup(pair1.first);
    auto [b1, gb1] = lookup(pair1.second);
    auto [a2, ga2] = lookup(pair2.first);
    auto [b2, gb2] = lookup(pair2.second);
    if (ga1 != gb1 && ga2 != gb2)
      return {Permit::forbid("both differences cross similarity groups in '" + attr.name + "'"),
              {}};
    return {Permit::allow(), std::abs(a1 - b1) < std::abs(a2 - b2)};
  }

  auto permit = check_operation(attr, Relation::DifferenceComparison);
  if (!permit) return {permit, {}};
  auto number = [&](const Value& v) {
    if (auto d = std::get_if<double>(&v)) return *d;
    throw Error(ErrorCode::TypeViolation,
                "attribute '" + attr.name + "' holds a non-numeric value '" + display(v) + "'",
                attr.name, display(v));
  };
  auto diff = [&](const std::pair<Value, Value>& p) {
    double a = number(p.first), b = number(p.second);
    if (attr.mtype.kind() == ScaleKind::Cyclical) return cyclic_difference(a, b, *attr.mtype.period());
    return std::fabs(a - b);
  };
  return {Permit::allow(), diff(pair1) < diff(pair2)};
}

// ---------------------------------------------------------------------------

namespace {

void check_value(const Attribute& attr, const Value& v, std::size_t row) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Schema,
                "row " + std::to_string(row + 1) + ", attribute '" + attr.name + "': " + what,
                attr.name, display(v));
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!attr.mtype.is_numeric()) fail("number in a non-numeric attribute");
          if (!std::isfinite(x)) fail("non-finite number");
        } else if constexpr (std::is_same_v<T, Category>) {
          if (attr.mtype.kind() != ScaleKind::Nominal) fail("category in a non-nominal attribute");
        } else if constexpr (std::is_same_v<T, Level>) {
          if (attr.mtype.kind() != ScaleKind::Ordinal) fail("level in a non-ordinal attribute");
          auto rank = attr.rank_of(x.symbol);
          if (!rank) fail("'" + x.symbol + "' is not in the declared order");
          if (*rank != x.rank) fail("rank of '" + x.symbol + "' disagrees with the declared order");
        }
      },
      v);
}

} // namespace

Dataset::Dataset(std::vector<Attribute> attributes, std::vector<Row> rows,
                 std::optional<std::size_t> target)
    : attributes_(std::move(attributes)), rows_(std::move(rows)), target_(target),
      originals_(attributes_.size()) {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    attributes_[i].validate();
    if (!by_name_.emplace(attributes_[i].name, i).second)
      throw Error(ErrorCode::Schema, "duplicate attribute name '" + attributes_[i].name + "'",
                  attributes_[i].name);
  }
  if (target_ && *target_ >= attributes_.size())
    throw Error(ErrorCode::Schema, "target index out of range");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != attributes_.size())
      throw Error(ErrorCode::Schema, "row " + std::to_string(r + 1) + " has " +
                                         std::to_string(rows_[r].size()) + " values, expected " +
                                         std::to_string(attributes_.size()));
    for (std::size_t c = 0; c < attributes_.size(); ++c) check_value(attributes_[c], rows_[r][c], r);
  }
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(name) + "'",
              std::string(name));
}

void Dataset::set_originals(std::size_t c, std::vector<std::string> text) {
  if (text.size() != rows_.size())
    throw Error(ErrorCode::Schema, "original-value column length mismatch");
  originals_.at(c) = std::move(text);
}

Dataset Dataset::with_target(std::optional<std::size_t> target) const {
  if (target && *target >= attributes_.size())
    throw Error(ErrorCode::Schema, "target index out of range");
  Dataset copy = *this;
  copy.target_ = target;
  return copy;
}

Dataset Dataset::select(std::span<const std::size_t> columns) const {
  std::vector<Attribute> attrs;
  std::optional<std::size_t> target;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    attrs.push_back(attributes_.at(columns[j]));
    if (target_ && columns[j] == *target_) target = j;
  }
  std::vector<Row> rows;
  rows.reserve(rows_.size());
  for (const auto& row : rows_) {
    Row out;
    out.reserve(columns.size());
    for (auto c : columns) out.push_back(row[c]);
    rows.push_back(std::move(out));
  }
  Dataset ds(std::move(attrs), std::move(rows), target);
  for (std::size_t j = 0; j < columns.size(); ++j) ds.originals_[j] = originals_[columns[j]];
  return ds;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t node_depth(const HierarchyNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(c));
  return d;
}

void collect_leaves(const HierarchyNode& n, std::vector<std::size_t>& out) {
  if (n.attribute) out.push_back(*n.attribute);
  for (const auto& c : n.children) collect_leaves(c, out);
}

void collect_level(const HierarchyNode& n, std::size_t depth, std::size_t level,
                   std::vector<std::pair<std::string, std::vector<std::size_t>>>& out) {
  if (depth == level || n.children.empty()) {
    std::vector<std::size_t> leaves;
    collect_leaves(n, leaves);
    if (!leaves.empty()) out.emplace_back(n.name, std::move(leaves));
    return;
  }
  for (const auto& c : n.children) collect_level(c, depth + 1, level, out);
}

void check_node(const HierarchyNode& n) {
  if (n.attribute && !n.children.empty())
    throw Error(ErrorCode::Schema, "hierarchy node '" + n.name + "' is both leaf and group");
  for (const auto& c : n.children) check_node(c);
}

} // namespace

std::size_t AttributeHierarchy::depth() const { return node_depth(root); }

void AttributeHierarchy::validate(std::size_t num_attributes) const {
  check_node(root);
  std::vector<std::size_t> leaves;
  collect_leaves(root, leaves);
  std::vector<int> seen(num_attributes, 0);
  for (auto i : leaves) {
    if (i >= num_attributes)
      throw Error(ErrorCode::Schema, "hierarchy leaf references attribute " + std::to_string(i) +
                                         " of " + std::to_string(num_attributes));
    if (++seen[i] > 1)
      throw Error(ErrorCode::Schema, "attribute " + std::to_string(i) + " appears twice in hierarchy");
  }
  for (std::size_t i = 0; i < num_attributes; ++i)
    if (!seen[i])
      throw Error(ErrorCode::Schema, "attribute " + std::to_string(i) + " missing from hierarchy");
  if (active_level > depth())
    throw Error(ErrorCode::Schema, "active level exceeds hierarchy depth");
}

std::vector<std::pair<std::string, std::vector<std::size_t>>>
AttributeHierarchy::visible_groups() const {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  collect_level(root, 0, active_level, out);
  return out;
}

// ---------------------------------------------------------------------------

DiscreteColumn discretize(const Dataset& ds, std::size_t column) {
  DiscreteColumn out;
  const auto n = ds.num_rows();
  out.codes.assign(n, -1);
  std::unordered_map<std::string, std::int32_t> index;
  bool any_missing = false;
  for (std::size_t r = 0; r < n; ++r) {
    const Value& v = ds.at(r, column);
    if (is_missing(v)) {
      any_missing = true;
      continue;
    }
    auto label = display(v);
    auto [it, inserted] = index.try_emplace(label, static_cast<std::int32_t>(out.labels.size()));
    if (inserted) out.labels.push_back(std::move(label));
    out.codes[r] = it->second;
  }
  if (any_missing) {
    out.missing_code = static_cast<std::int32_t>(out.labels.size());
    out.labels.emplace_back(kMissingLabel);
    for (auto& c : out.codes)
      if (c < 0) c = *out.missing_code;
  }
  return out;
}

} // namespace hetviz
