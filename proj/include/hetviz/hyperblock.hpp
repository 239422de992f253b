#pragma once

// Hyperblocks: per-attribute bundles of interval, rank-range and value-set
// constraints. A Missing value fails every constraint.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetviz/core.hpp"
#include "hetviz/rules.hpp"

namespace hetviz {

/// |x - center| <= length / 2
struct NumericBand {
  double center = 0;
  double length = 0;
  bool operator==(const NumericBand&) const = default;
};
/// start <= rank(x) <= end
struct OrdinalRange {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  bool operator==(const OrdinalRange&) const = default;
};
/// x in values
struct NominalSet {
  std::vector<std::string> values;
  bool operator==(const NominalSet&) const = default;
};

using Constraint = std::variant<NumericBand, OrdinalRange, NominalSet>;

struct AttributeConstraint {
  std::size_t attribute = 0;
  Constraint constraint;
  bool operator==(const AttributeConstraint&) const = default;
};

struct HyperBlock {
  std::vector<AttributeConstraint> constraints; // attributes ascending, at most one each
  std::optional<std::string> label;

  const Constraint* find(std::size_t attribute) const;
  bool operator==(const HyperBlock&) const = default;
};

/// Kind pairing: NumericBand on interval/ratio/absolute attributes,
/// OrdinalRange on ordinal ones, NominalSet on nominal and cyclical ones
/// (cyclical values admit equality but no order). Throws TypeViolation on a
/// mismatch and InvalidArgument on malformed constraints.
void validate_hyperblock(const HyperBlock& hb, const Dataset& schema);

bool constraint_holds(const Attribute& attr, const Constraint& c, const Value& x);
bool contains(const HyperBlock& hb, const Dataset& schema, const Row& x);

/// Exact real bounds [lo, hi] of the doubles accepted by a band.
std::pair<double, double> band_bounds(const NumericBand& band);

/// Every point of `inner` lies in `outer`.
bool hb_contained_in(const HyperBlock& inner, const HyperBlock& outer);

struct PurityStats {
  std::uint64_t total = 0;
  std::vector<std::string> classes; // lexical
  std::vector<std::uint64_t> per_class;
  std::optional<std::size_t> dominant; // absent for an empty selection
  double purity = 0;

  std::optional<std::string> dominant_class() const {
    return dominant ? std::optional(classes[*dominant]) : std::nullopt;
  }
};

/// Statistics over the rows inside the block; a Missing target counts as "?".
PurityStats purity(const HyperBlock& hb, const Dataset& ds);

struct DiscoveryOptions {
  bool parallel = true;
  /// Seeds are expanded in fixed-size batches; later seeds already covered
  /// by an earlier batch are skipped. Output does not depend on threads.
  std::size_t batch = 256;
};

/// Pure blocks from greedy seeded expansion, deduplicated by containment.
std::vector<HyperBlock> discover_pure_hbs(const Dataset& ds, const DiscoveryOptions& options = {});

/// Rows that no pure block can hold: some row of another class matches every
/// known value of the row.
std::vector<std::uint8_t> conflicted_rows(const Dataset& ds);

/// Conjunction of InInterval / InRankRange / InSet atoms selecting exactly
/// the block's members. Consequent is the block label.
Rule hb_to_rule(const HyperBlock& hb, const Dataset& schema);

} // namespace hetviz
