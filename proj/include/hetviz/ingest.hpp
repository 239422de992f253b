#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hetviz/core.hpp"

namespace hetviz {

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  std::string missing_token = "?";
  bool trim = true; // strip blanks around unquoted fields
};

/// Text table straight from the CSV reader. nullopt cells held the missing token.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<std::string>>> cells;

  std::size_t num_rows() const noexcept { return cells.size(); }
  std::size_t num_columns() const noexcept { return header.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
};

/// Throws Parse on invalid UTF-8, ragged rows (naming the line) or duplicate headers.
RawTable parse_csv(std::string_view text, const CsvOptions& options = {});
RawTable read_csv_file(const std::string& path, const CsvOptions& options = {});

// ---------------------------------------------------------------------------
// Coding schemes

inline constexpr std::array<std::string_view, 9> kEncoderKinds = {
    "one_hot", "label", "ordinal", "frequency", "mean_target",
    "prob_ratio", "james_stein", "hash", "wavelength"};

bool is_encoder_kind(std::string_view id);

struct ValueGroup {
  std::string label;
  double code = 0;
  std::vector<std::string> values;
  bool operator==(const ValueGroup&) const = default;
};

struct ValueGroups {
  std::vector<ValueGroup> groups;
  std::optional<std::string> default_group; // label of the catch-all group
  bool operator==(const ValueGroups&) const = default;
};

struct IntervalGroup {
  double start = 0;
  double length = 1;
  double code = 0;
  bool operator==(const IntervalGroup&) const = default;
};

/// Half-open [start, start + length) intervals; the last one is closed on the right.
struct IntervalGroups {
  std::vector<IntervalGroup> intervals;

  std::optional<std::size_t> find(double x) const;
  std::string label(std::size_t i) const;
  bool operator==(const IntervalGroups&) const = default;
};

using GroupSpec = std::variant<ValueGroups, IntervalGroups>;

void validate_group_spec(const GroupSpec& spec, std::string_view attribute);

struct SchemeEntry {
  std::string name;
  MeasurementType mtype;
  std::string encoder = "label";
  std::vector<std::string> order;  // declared order for ordinal entries
  std::optional<GroupSpec> group;
  std::vector<std::pair<std::string, double>> codes; // explicit value -> code
  std::optional<double> default_code;
  bool keep_original_values = false;
  bool lossy = false;  // explicit codes may collide
  bool review = false; // generated defaults awaiting analyst review
  std::string modality;
  std::vector<SimilarityGroup> similarity_groups;

  bool operator==(const SchemeEntry&) const = default;
};

struct CodingScheme {
  std::vector<SchemeEntry> entries;
  std::optional<std::string> target;
  /// Measurement type given to attributes without an entry; nullopt means
  /// every attribute must be covered.
  std::optional<ScaleKind> default_kind;

  const SchemeEntry* find(std::string_view name) const;
  /// Throws Schema naming the attribute on the first broken entry invariant.
  void validate() const;
  bool operator==(const CodingScheme&) const = default;
};

struct SchemeDocument {
  static constexpr int kVersion = 1;
  int version = kVersion;
  CodingScheme scheme;
  std::optional<AttributeHierarchy> hierarchy;
  bool operator==(const SchemeDocument&) const = default;
};

/// Versioned JSON with stable field order. Throws Parse with a JSON location.
SchemeDocument load_scheme(std::string_view bytes);
std::string save_scheme(const SchemeDocument& doc);

/// Groups, codes and types every column. Row count and order are preserved.
Dataset apply_scheme(const RawTable& raw, const CodingScheme& scheme);

/// "All Nominal" / "All Ordinal": codes 1..n per attribute. Nominal codes follow
/// first appearance; ordinal order defaults to lexical and is flagged for review.
CodingScheme bulk_assign(const RawTable& raw, ScaleKind kind);

/// Consecutive [start + k*length, start + (k+1)*length) intervals covering the
/// observed values, coded 1, 2, ... with the last interval closed.
IntervalGroups generate_interval_groups(std::span<const double> values, double start, double length);
/// Reads the numeric column of a raw table; throws TypeViolation on non-numbers.
IntervalGroups generate_interval_groups(const RawTable& raw, std::string_view column, double start,
                                        double length);

struct DropResult {
  Dataset dataset;
  std::vector<std::string> removed;
};

/// Removes attributes with at most one distinct non-missing value (never the target).
DropResult drop_constant_attributes(const Dataset& ds);

/// Numeric display view of a dataset: every attribute mapped to [0,1] through
/// its number, nominal code or ordinal rank. NaN marks missing values.
struct NormalizedView {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<std::pair<double, double>> ranges; // (min, max) before scaling

  std::size_t index_of(std::string_view name) const;
};

/// (x - min) / (max - min); constant columns map to 0.5. NaN passes through.
std::vector<double> min_max_scale(std::span<const double> column);
NormalizedView normalize_unit_interval(const Dataset& ds);

// ---------------------------------------------------------------------------
// Typed dataset files (.ds, JSON)

std::string save_dataset(const Dataset& ds);
Dataset load_dataset(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace hetviz
