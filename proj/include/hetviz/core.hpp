#pragma once

// Measurement-type taxonomy, typed values, datasets and the interpretability
// permission guard. Everything here is immutable once constructed.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "hetviz/error.hpp"

namespace hetviz {

// ---------------------------------------------------------------------------
// Measurement scales and relations

enum class ScaleKind { Nominal, Ordinal, Interval, Ratio, Absolute, Cyclical };

std::string_view to_string(ScaleKind kind);
std::optional<ScaleKind> scale_from_string(std::string_view text);

class MeasurementType {
public:
  MeasurementType() = default;

  static MeasurementType nominal() { return MeasurementType(ScaleKind::Nominal); }
  static MeasurementType ordinal() { return MeasurementType(ScaleKind::Ordinal); }
  static MeasurementType interval() { return MeasurementType(ScaleKind::Interval); }
  static MeasurementType ratio() { return MeasurementType(ScaleKind::Ratio); }
  static MeasurementType absolute() { return MeasurementType(ScaleKind::Absolute); }
  /// Throws InvalidArgument unless period is finite and positive.
  static MeasurementType cyclical(double period);
  /// Builds any kind; period is required for Cyclical and rejected otherwise.
  static MeasurementType make(ScaleKind kind, std::optional<double> period = std::nullopt);

  ScaleKind kind() const noexcept { return kind_; }
  std::optional<double> period() const noexcept { return period_; }

  /// Absolute folds into Ratio for permission checks; display keeps it distinct.
  ScaleKind permission_kind() const noexcept {
    return kind_ == ScaleKind::Absolute ? ScaleKind::Ratio : kind_;
  }
  bool is_numeric() const noexcept {
    return kind_ != ScaleKind::Nominal && kind_ != ScaleKind::Ordinal;
  }

  bool operator==(const MeasurementType&) const = default;

private:
  explicit MeasurementType(ScaleKind kind, std::optional<double> period = std::nullopt)
      : kind_(kind), period_(period) {}

  ScaleKind kind_ = ScaleKind::Nominal;
  std::optional<double> period_;
};

enum class Relation : std::uint8_t {
  Equality,
  Order,
  Difference,
  DifferenceComparison,
  RatioOp,
  CyclicDifference,
};

inline constexpr std::size_t kRelationCount = 6;

std::string_view to_string(Relation rel);

/// Small value-type set over the closed Relation enumeration.
class RelationSet {
public:
  constexpr RelationSet() = default;
  constexpr RelationSet(std::initializer_list<Relation> rels) {
    for (auto r : rels) insert(r);
  }
  constexpr void insert(Relation r) { bits_ |= bit(r); }
  constexpr bool contains(Relation r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool subset_of(RelationSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr std::size_t size() const {
    std::size_t n = 0;
    for (auto b = bits_; b; b &= b - 1) ++n;
    return n;
  }
  constexpr bool operator==(const RelationSet&) const = default;

private:
  static constexpr std::uint8_t bit(Relation r) { return std::uint8_t(1u << unsigned(r)); }
  std::uint8_t bits_ = 0;
};

RelationSet permitted_relations(const MeasurementType& mtype);

/// Result of a permission check. Forbidden is an ordinary value, not a failure.
struct Permit {
  bool allowed = true;
  std::string reason;

  static Permit allow() { return {true, {}}; }
  static Permit forbid(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const noexcept { return allowed; }
};

// ---------------------------------------------------------------------------
// Values

struct Missing {
  bool operator==(const Missing&) const = default;
};
struct Category {
  std::string symbol;
  bool operator==(const Category&) const = default;
};
struct Level {
  std::string symbol;
  std::uint32_t rank = 0;
  bool operator==(const Level&) const = default;
};

/// Missing | Number | Category | Level
using Value = std::variant<Missing, double, Category, Level>;

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

/// Shortest round-trip decimal form; integral values print without a fraction.
std::string format_number(double x);

/// Label used for bars, sets and reports: the symbol, the number, or "?".
std::string display(const Value& v);

inline constexpr std::string_view kMissingLabel = "?";

// ---------------------------------------------------------------------------
// Attributes and datasets

struct SimilarityGroup {
  std::string label;
  std::vector<std::pair<std::string, int>> members; // value, integer code
  bool operator==(const SimilarityGroup&) const = default;
};

struct Attribute {
  std::string name;
  MeasurementType mtype;
  /// Required for Ordinal; lowest rank first.
  std::vector<std::string> declared_order;
  std::string modality;
  /// Partition of the values with per-value integer codes, strictly increasing
  /// within and across groups.
  std::vector<SimilarityGroup> similarity_groups;
  /// Numeric code per symbol (nominal codes, ordinal ranks). Empty for numbers.
  std::map<std::string, double> codes;
  /// True when a grouping step produced the values.
  bool grouped = false;

  std::optional<double> code_of(std::string_view symbol) const;
  /// Rank for an ordinal symbol: explicit code or 1-based position in declared_order.
  std::optional<std::uint32_t> rank_of(std::string_view symbol) const;
  /// Numeric view used for normalisation and threshold tests: the number, the
  /// nominal code or the ordinal rank. nullopt for Missing or uncoded symbols.
  std::optional<double> numeric(const Value& v) const;
  std::optional<int> similarity_code(std::string_view symbol) const;
  std::optional<std::size_t> similarity_group_of(std::string_view symbol) const;

  /// Throws Schema on broken attribute-level invariants.
  void validate() const;

  bool operator==(const Attribute&) const = default;
};

Permit check_operation(const Attribute& attr, Relation rel);

struct DifferenceComparisonResult {
  Permit permit;
  std::optional<bool> result; // present iff permit.allowed
};

/// Is |a1 - b1| < |a2 - b2| meaningful for this attribute, and if so is it true?
DifferenceComparisonResult compare_differences(const Attribute& attr,
                                               const std::pair<Value, Value>& pair1,
                                               const std::pair<Value, Value>& pair2);

/// Shorter arc between a and b on a circle of the given period.
double cyclic_difference(double a, double b, double period);

using Row = std::vector<Value>;

class Dataset {
public:
  Dataset() = default;
  /// Validates rectangularity and per-value type conformance; throws Schema.
  Dataset(std::vector<Attribute> attributes, std::vector<Row> rows,
          std::optional<std::size_t> target = std::nullopt);

  std::size_t num_rows() const noexcept { return rows_.size(); }
  std::size_t num_attributes() const noexcept { return attributes_.size(); }
  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  const Row& row(std::size_t r) const { return rows_.at(r); }
  const Value& at(std::size_t r, std::size_t c) const { return rows_[r][c]; }
  std::optional<std::size_t> target() const noexcept { return target_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws UnknownAttribute.
  std::size_t index_of(std::string_view name) const;

  /// Raw text per row retained by keep_original_values, per attribute.
  const std::optional<std::vector<std::string>>& originals(std::size_t c) const {
    return originals_.at(c);
  }
  void set_originals(std::size_t c, std::vector<std::string> text);

  Dataset with_target(std::optional<std::size_t> target) const;
  /// Keeps the listed attributes in the given order.
  Dataset select(std::span<const std::size_t> columns) const;

  bool operator==(const Dataset& other) const {
    return attributes_ == other.attributes_ && rows_ == other.rows_ && target_ == other.target_;
  }

private:
  std::vector<Attribute> attributes_;
  std::vector<Row> rows_;
  std::optional<std::size_t> target_;
  std::vector<std::optional<std::vector<std::string>>> originals_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

// ---------------------------------------------------------------------------
// Attribute hierarchy

struct HierarchyNode {
  std::string name;
  std::optional<std::size_t> attribute; // set on leaves only
  std::vector<HierarchyNode> children;
  bool operator==(const HierarchyNode&) const = default;
};

struct AttributeHierarchy {
  HierarchyNode root;
  std::size_t active_level = 0;

  std::size_t depth() const;
  /// Every attribute index in exactly one leaf, active_level within depth.
  void validate(std::size_t num_attributes) const;
  /// Attribute groups shown at the active level, in tree order.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> visible_groups() const;

  bool operator==(const AttributeHierarchy&) const = default;
};

// ---------------------------------------------------------------------------
// Discrete view of a column for counting

struct DiscreteColumn {
  std::vector<std::string> labels;  // first-appearance order, "?" last if present
  std::vector<std::int32_t> codes;  // per row, index into labels
  std::optional<std::int32_t> missing_code;

  std::size_t size() const noexcept { return labels.size(); }
};

DiscreteColumn discretize(const Dataset& ds, std::size_t column);

} // namespace hetviz
