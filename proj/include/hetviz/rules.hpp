#pragma once

// Logical classification rules over attribute tests.
//
// Atoms on a Missing value are false; Not turns that into true. Threshold
// atoms (InRankRange, InInterval) read nominal values through their codes,
// ordinal values through their ranks and numbers directly.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hetviz/core.hpp"
#include "hetviz/ingest.hpp"

namespace hetviz {

// Literal values are compared through their display form.
struct Equals {
  std::string attr;
  std::string value;
  bool operator==(const Equals&) const = default;
};
struct NotEquals {
  std::string attr;
  std::string value;
  bool operator==(const NotEquals&) const = default;
};
struct InSet {
  std::string attr;
  std::vector<std::string> values; // empty set is constant false
  bool operator==(const InSet&) const = default;
};
struct InRankRange {
  std::string attr;
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  bool operator==(const InRankRange&) const = default;
};
/// Closed [lo, hi]; infinite bounds express one-sided thresholds.
struct InInterval {
  std::string attr;
  double lo = 0;
  double hi = 0;
  bool operator==(const InInterval&) const = default;
};
/// x.attr = y.attr for a pair of points; neither side Missing.
struct PairEquals {
  std::string attr;
  bool operator==(const PairEquals&) const = default;
};

using Atom = std::variant<Equals, NotEquals, InSet, InRankRange, InInterval, PairEquals>;

const std::string& atom_attribute(const Atom& atom);
std::string describe(const Atom& atom);

struct Expr {
  enum class Op { Atom, And, Or, Not };
  Op op = Op::And;
  std::optional<Atom> atom; // set iff op == Atom
  std::vector<Expr> args;

  static Expr leaf(Atom a) { return {Op::Atom, std::move(a), {}}; }
  static Expr all(std::vector<Expr> xs) { return {Op::And, std::nullopt, std::move(xs)}; }
  static Expr any(std::vector<Expr> xs) { return {Op::Or, std::nullopt, std::move(xs)}; }
  static Expr negate(Expr x) { return {Op::Not, std::nullopt, {std::move(x)}}; }
  bool operator==(const Expr&) const = default;
};

struct Rule {
  Expr antecedent = Expr::all({});
  std::string consequent;
  std::optional<std::string> else_class;
  bool operator==(const Rule&) const = default;
};

struct RuleViolation {
  std::string atom;
  std::string attribute;
  Relation relation = Relation::Equality;
  std::string reason;
};

/// Empty iff every atom is legal for its attribute's measurement type.
/// Throws UnknownAttribute for attributes absent from the schema.
std::vector<RuleViolation> validate_rule(const Rule& rule, const Dataset& schema);

/// Throws InvalidArgument when the rule holds PairEquals atoms.
bool eval_rule(const Rule& rule, const Dataset& schema, const Row& x);
bool eval_expr(const Expr& expr, const Dataset& schema, const Row& x);
bool eval_pairwise_rule(const Rule& rule, const Dataset& schema, const Row& x, const Row& y);

struct RuleMetrics {
  std::uint64_t rows = 0;
  std::uint64_t coverage = 0;
  std::uint64_t correct = 0;
  std::optional<double> precision;  // absent when coverage is 0
  std::optional<double> error_rate; // 1 - precision
  // filled only when the rule has an else class
  std::uint64_t else_covered = 0;
  std::uint64_t else_correct = 0;
  std::optional<double> accuracy; // (correct + else_correct) / rows
  bool operator==(const RuleMetrics&) const = default;
};

struct Classification {
  RuleMetrics metrics;
  std::vector<std::optional<std::string>> decisions; // per row
  std::vector<std::uint8_t> fired;                   // antecedent true
};

/// Uses the dataset target; a Missing target counts as class "?".
Classification classify(const Rule& rule, const Dataset& ds);
/// Row-by-row reference used by tests and the benchmark.
Classification classify_serial(const Rule& rule, const Dataset& ds);

/// Rewrites threshold atoms over integer-coded nominal attributes into InSet
/// atoms over the values whose codes pass the test.
Rule normalize_rule(const Rule& rule, const Dataset& schema);
/// Same, taking the code maps from a coding scheme.
Rule normalize_rule(const Rule& rule, const CodingScheme& scheme);

} // namespace hetviz
