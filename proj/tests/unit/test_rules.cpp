#include <doctest.h>

#include <functional>
#include <random>

#include "hetviz/rules.hpp"
#include "../support/oracles.hpp"
#include "../support/random_data.hpp"

using namespace hetviz;
using hetviz::testing::RandomSpec;
using hetviz::testing::random_dataset;
using namespace hetviz::testing;

namespace {

std::vector<std::uint8_t> selection(const Expr& e, const Dataset& ds) {
  std::vector<std::uint8_t> out;
  for (const auto& row : ds.rows()) out.push_back(eval_expr(e, ds, row));
  return out;
}

} // namespace

TEST_SUITE("rules") {

TEST_CASE("evaluation matches a recursive oracle") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    auto ds = random_dataset(rng, {.rows = 40, .attributes = 4, .values = 5, .classes = 3, .missing = 0.1});
    auto e = random_expr(rng, ds, 3);
    for (const auto& row : ds.rows()) REQUIRE(eval_expr(e, ds, row) == naive_eval(e, ds, row));
  }
}

TEST_CASE("De Morgan duality") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    auto ds = random_dataset(rng, {.rows = 30, .missing = 0.2});
    auto a = random_expr(rng, ds, 2), b = random_expr(rng, ds, 2);
    auto lhs = Expr::negate(Expr::all({a, b}));
    auto rhs = Expr::any({Expr::negate(a), Expr::negate(b)});
    CHECK(selection(lhs, ds) == selection(rhs, ds));
    auto lhs2 = Expr::negate(Expr::any({a, b}));
    auto rhs2 = Expr::all({Expr::negate(a), Expr::negate(b)});
    CHECK(selection(lhs2, ds) == selection(rhs2, ds));
  }
}

TEST_CASE("missing values and empty connectives") {
  std::mt19937 rng(1);
  auto ds = random_dataset(rng, {.rows = 1, .attributes = 1, .missing = 1.0, .kinds = {ScaleKind::Nominal}});
  const auto& row = ds.row(0);
  CHECK_FALSE(eval_expr(Expr::leaf(Equals{"a0", "?"}), ds, row));
  CHECK_FALSE(eval_expr(Expr::leaf(NotEquals{"a0", "n0"}), ds, row));
  CHECK(eval_expr(Expr::negate(Expr::leaf(Equals{"a0", "n0"})), ds, row));
  CHECK(eval_expr(Expr::all({}), ds, row));
  CHECK_FALSE(eval_expr(Expr::any({}), ds, row));
  auto full = random_dataset(rng, {.rows = 5, .attributes = 1, .missing = 0, .kinds = {ScaleKind::Nominal}});
  for (const auto& r : full.rows()) CHECK_FALSE(eval_expr(Expr::leaf(InSet{"a0", {}}), full, r));
}

TEST_CASE("pair atoms need two points") {
  std::mt19937 rng(2);
  auto ds = random_dataset(rng, {.rows = 20, .attributes = 2, .missing = 0.2});
  Rule rule{Expr::leaf(PairEquals{"a0"}), "c0", std::nullopt};
  CHECK_THROWS_AS(eval_rule(rule, ds, ds.row(0)), Error);
  CHECK_THROWS_AS(classify(rule, ds), Error);
  for (std::size_t i = 0; i < ds.num_rows(); ++i)
    for (std::size_t j = 0; j < ds.num_rows(); ++j) {
      const auto &x = ds.at(i, 0), &y = ds.at(j, 0);
      const bool expect = !is_missing(x) && !is_missing(y) && x == y;
      CHECK(eval_pairwise_rule(rule, ds, ds.row(i), ds.row(j)) == expect);
    }
}

TEST_CASE("validation against measurement types") {
  std::vector<Attribute> attrs(3);
  attrs[0].name = "colour";
  attrs[0].mtype = MeasurementType::nominal();
  attrs[0].codes = {{"red", 1}, {"blue", 2}};
  attrs[1].name = "grade";
  attrs[1].mtype = MeasurementType::ordinal();
  attrs[1].declared_order = {"low", "mid", "high"};
  attrs[2].name = "weight";
  attrs[2].mtype = MeasurementType::ratio();
  Dataset schema(attrs, {});

  auto check = [&](Atom atom) { return validate_rule({Expr::leaf(std::move(atom)), "x", {}}, schema); };
  CHECK(check(Equals{"colour", "red"}).empty());
  CHECK(check(InSet{"colour", {"red"}}).empty());
  CHECK(check(InRankRange{"grade", 1, 2}).empty());
  CHECK(check(InInterval{"weight", 0, 3}).empty());
  auto bad = check(InInterval{"colour", 1, 1});
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].attribute == "colour");
  CHECK(bad[0].relation == Relation::Order);
  CHECK_FALSE(bad[0].reason.empty());
  CHECK(check(InRankRange{"colour", 1, 2}).size() == 1);
  CHECK_THROWS_AS(check(Equals{"nope", "x"}), Error);
}

TEST_CASE("classification metrics equal counting") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto ds = random_dataset(rng, {.rows = 200, .attributes = 5, .values = 4, .classes = 3, .missing = 0.1});
    Rule rule{random_expr(rng, ds, 3), "c" + std::to_string(rng() % 3), std::nullopt};
    if (trial % 2) rule.else_class = "c" + std::to_string(rng() % 3);
    auto par = classify(rule, ds);
    auto ser = classify_serial(rule, ds);
    CHECK(par.metrics == ser.metrics);
    CHECK(par.fired == ser.fired);
    CHECK(par.decisions == ser.decisions);

    std::uint64_t coverage = 0, correct = 0, ecov = 0, ecorr = 0;
    for (const auto& row : ds.rows()) {
      const auto truth = naive_label(row.back());
      if (naive_eval(rule.antecedent, ds, row)) {
        ++coverage;
        correct += truth == rule.consequent;
      } else if (rule.else_class) {
        ++ecov;
        ecorr += truth == *rule.else_class;
      }
    }
    CHECK(par.metrics.rows == ds.num_rows());
    CHECK(par.metrics.coverage == coverage);
    CHECK(par.metrics.correct == correct);
    if (coverage) {
      CHECK(*par.metrics.precision == double(correct) / double(coverage));
      CHECK(*par.metrics.error_rate == 1.0 - double(correct) / double(coverage));
    } else {
      CHECK_FALSE(par.metrics.precision);
    }
    CHECK(par.metrics.else_covered == ecov);
    CHECK(par.metrics.else_correct == ecorr);
    if (rule.else_class) CHECK(*par.metrics.accuracy == double(correct + ecorr) / double(ds.num_rows()));
    else CHECK_FALSE(par.metrics.accuracy);
  }
}

TEST_CASE("normalize_rule preserves the selected rows") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    auto ds = random_dataset(rng, {.rows = 60, .attributes = 4, .values = 6, .missing = 0.1});
    Rule rule{random_expr(rng, ds, 3), "c0", std::nullopt};
    auto norm = normalize_rule(rule, ds);
    CHECK(selection(norm.antecedent, ds) == selection(rule.antecedent, ds));
    // No threshold atom survives on a nominal attribute.
    std::function<void(const Expr&)> scan = [&](const Expr& e) {
      if (e.op != Expr::Op::Atom) {
        for (const auto& a : e.args) scan(a);
        return;
      }
      const auto& attr = ds.attribute(ds.index_of(atom_attribute(*e.atom)));
      if (attr.mtype.kind() == ScaleKind::Nominal) {
        CHECK_FALSE(std::holds_alternative<InInterval>(*e.atom));
        CHECK_FALSE(std::holds_alternative<InRankRange>(*e.atom));
      }
    };
    scan(norm.antecedent);
    CHECK(validate_rule(norm, ds).size() <= validate_rule(rule, ds).size());
  }
}

TEST_CASE("normalize_rule with a coding scheme") {
  auto raw = parse_csv("land,class\ngrass,yes\nurban,no\nwoods,yes\nwater,no\n");
  CodingScheme scheme;
  SchemeEntry land{"land", MeasurementType::nominal()};
  land.codes = {{"grass", 1}, {"urban", 2}, {"woods", 3}, {"water", 4}};
  scheme.entries = {land, SchemeEntry{"class", MeasurementType::nominal()}};
  scheme.target = "class";
  auto ds = apply_scheme(raw, scheme);
  Rule rule{Expr::leaf(InInterval{"land", 2, 3}), "yes", std::nullopt};
  auto norm = normalize_rule(rule, scheme);
  CHECK(norm.antecedent == Expr::leaf(InSet{"land", {"urban", "woods"}}));
  CHECK(selection(norm.antecedent, ds) == selection(rule.antecedent, ds));
  CHECK(normalize_rule(rule, ds) == norm);
  CHECK(validate_rule(norm, ds).empty());
  CHECK_FALSE(validate_rule(rule, ds).empty());
}

} // TEST_SUITE
