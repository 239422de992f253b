#include <doctest.h>

#include <map>
#include <random>

#include "hetviz/ingest.hpp"
#include "hetviz/viewlayout.hpp"
#include "../support/random_data.hpp"

using namespace hetviz;
using hetviz::testing::random_dataset;

namespace {

Dataset nominal_csv(const std::string& csv, std::optional<std::string> target = std::nullopt) {
  return apply_scheme(parse_csv(csv), {{}, target, ScaleKind::Nominal});
}

// Column "v" with the given (value, class, count) triples.
Dataset counted(const std::vector<std::tuple<std::string, std::string, int>>& cells) {
  std::string csv = "v,class\n";
  for (const auto& [v, c, n] : cells)
    for (int i = 0; i < n; ++i) csv += v + "," + c + "\n";
  return nominal_csv(csv, "class");
}

std::vector<std::string> groups(const AxisLayout& l) {
  std::vector<std::string> out;
  for (const auto& b : l.bars) out.push_back(b.group);
  return out;
}

AxisLayout synthetic(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& bars, std::uint64_t rows) {
  // Each bar: (dominant-class count, other-class count).
  AxisLayout l;
  l.attribute = "X";
  l.reference = "class";
  l.classes = {"a", "b"};
  l.rows = rows;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    Bar b;
    b.group = "g" + std::to_string(i);
    b.members = {b.group};
    b.per_class = {bars[i].first, bars[i].second};
    b.total = bars[i].first + bars[i].second;
    b.dominant = bars[i].first >= bars[i].second ? 0 : 1;
    b.purity = double(b.per_class[*b.dominant]) / double(b.total);
    b.height = double(b.total) / double(rows);
    l.bars.push_back(b);
  }
  return l;
}

} // namespace

TEST_SUITE("viewlayout") {

TEST_CASE("frequency bars: descending, encounter ties, Missing on top") {
  auto ds = nominal_csv("v\nc\nb\na\na\n?\nb\na\nc\na\nb\na\n");
  auto l = frequency_layout(ds, 0);
  CHECK(groups(l) == std::vector<std::string>{"a", "b", "c", "?"});
  CHECK(l.bars[0].total == 5);
  CHECK(l.bars[1].total == 3);
  CHECK(l.bars[2].total == 2);
  CHECK(l.bars[3].total == 1);
  double sum = 0;
  for (const auto& b : l.bars) sum += b.height;
  CHECK(sum == doctest::Approx(1.0));
  CHECK_FALSE(l.reference);

  auto tie = nominal_csv("v\ny\nx\nx\ny\nz\n");
  CHECK(groups(frequency_layout(tie, 0)) == std::vector<std::string>{"y", "x", "z"});
}

TEST_CASE("equal frequencies keep separate bars") {
  auto ds = counted({{"red", "p", 3}, {"blue", "p", 3}, {"green", "q", 4}});
  auto l = frequency_layout(ds, 0);
  REQUIRE(l.bars.size() == 3);
  CHECK(l.bars[1].height == 0.3);
  CHECK(l.bars[2].height == 0.3);
  CHECK(l.bars[1].group != l.bars[2].group);
}

TEST_CASE("reference bars of the worked example") {
  auto ds = counted({{"a", "0", 10}, {"a", "1", 70}, {"a", "2", 12}, {"a", "3", 8}});
  auto l = reference_layout(ds, 0, 1);
  REQUIRE(l.bars.size() == 1);
  const auto& b = l.bars[0];
  CHECK(l.classes == std::vector<std::string>{"0", "1", "2", "3"});
  CHECK(b.per_class == std::vector<std::uint64_t>{10, 70, 12, 8});
  CHECK(l.classes[*b.dominant] == "1");
  CHECK(b.purity == 0.70);
  auto j = join_nondominant(l);
  CHECK(j.bars[0].joined);
  CHECK(j.bars[0].per_class[*j.bars[0].dominant] == 70);
  CHECK(j.bars[0].nondominant() == 30);
  CHECK(j.bars[0].total == b.total);
}

TEST_CASE("reference counts equal counting") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto ds = random_dataset(rng, {.rows = 300, .attributes = 3, .values = 5, .classes = 3, .missing = 0.1});
    for (std::size_t c = 0; c < 3; ++c) {
      if (ds.attribute(c).mtype.kind() == ScaleKind::Ratio) continue;
      auto l = reference_layout(ds, c, 3);
      std::map<std::string, std::map<std::string, std::uint64_t>> oracle;
      for (const auto& row : ds.rows()) ++oracle[display(row[c])][display(row[3])];
      CHECK(l.bars.size() == oracle.size());
      std::uint64_t sum = 0;
      for (const auto& b : l.bars) {
        sum += b.total;
        std::uint64_t best = 0, total = 0;
        for (std::size_t k = 0; k < l.classes.size(); ++k) {
          CHECK(b.per_class[k] == oracle[b.group][l.classes[k]]);
          best = std::max(best, b.per_class[k]);
          total += b.per_class[k];
        }
        CHECK(b.total == total);
        CHECK(b.purity == double(best) / double(total));
      }
      CHECK(sum == ds.num_rows());
      for (std::size_t i = 0; i + 2 < l.bars.size(); ++i) CHECK(l.bars[i].total >= l.bars[i + 1].total);
    }
  }
}

TEST_CASE("continuous references must be grouped") {
  std::vector<Attribute> attrs(2);
  attrs[0] = hetviz::testing::random_attribute("v", ScaleKind::Nominal, 2);
  attrs[1] = hetviz::testing::random_attribute("t", ScaleKind::Ratio, 2);
  Dataset ds(attrs, {{Category{"n0"}, 1.0}});
  CHECK_THROWS_AS(reference_layout(ds, 0, 1), Error);
  attrs[1].grouped = true;
  Dataset grouped(attrs, {{Category{"n0"}, 1.0}});
  CHECK_NOTHROW(reference_layout(grouped, 0, 1));
}

TEST_CASE("single-class data is pure everywhere") {
  auto ds = counted({{"a", "k", 3}, {"b", "k", 5}});
  for (const auto& b : reference_layout(ds, 0, 1).bars) CHECK(b.purity == 1.0);
}

TEST_CASE("purity filter equals its predicate and conserves mass") {
  auto l = synthetic({{85, 15}, {10, 2}, {50, 50}, {5, 0}, {60, 3}}, 280);
  CHECK(filter_by_purity(l, 0, 0) == l);
  auto f = filter_by_purity(l, 0.8, 0.1);
  std::vector<std::string> expect;
  std::uint64_t kept = 0;
  for (const auto& b : l.bars)
    if (b.purity >= 0.8 && b.height >= 0.1) expect.push_back(b.group);
  CHECK(groups(f) == expect);
  for (const auto& b : f.bars) kept += b.total;
  CHECK(kept + f.residual.total == 280);
  CHECK(f.residual.groups == std::vector<std::string>{"g1", "g2", "g3"});
  CHECK(f.residual.per_class == std::vector<std::uint64_t>{65, 52});
  CHECK_THROWS_AS(filter_by_purity(l, 1.5, 0), Error);

  auto defaults = synthetic({{85, 15}, {10, 2}, {700, 188}}, 1000);
  auto kept_default = filter_by_purity(defaults, 0.8, 0.1);
  CHECK(kept_default.bars.size() == 1); // purity 0.85, height 0.10
  CHECK(kept_default.bars[0].group == "g0");
}

TEST_CASE("small blocks move to the top") {
  auto l = synthetic({{50, 0}, {30, 0}, {15, 0}, {5, 0}}, 100);
  auto moved = relocate_small_blocks(sort_bars_by_purity(l), 0.2);
  CHECK(groups(moved) == std::vector<std::string>{"g0", "g1", "g2", "g3"});
  auto shuffled = synthetic({{15, 0}, {50, 0}, {5, 0}, {30, 0}}, 100);
  CHECK(groups(relocate_small_blocks(shuffled, 0.2)) == std::vector<std::string>{"g1", "g3", "g0", "g2"});
  CHECK(relocate_small_blocks(shuffled, 0) == shuffled);

  auto merged = relocate_small_blocks(shuffled, 0.2, true);
  REQUIRE(merged.bars.size() == 3);
  CHECK(merged.bars.back().members == std::vector<std::string>{"g0", "g2"});
  CHECK(merged.bars.back().total == 20);
  CHECK(merged.bar_of("g2") == 2);
}

TEST_CASE("flipping") {
  std::vector<double> x = {0.25, 0, 1, 0.5};
  auto f = flip_attribute(x);
  CHECK(f[0] == 0.75);
  CHECK(flip_attribute(f) == x);
  std::vector<double> bad = {1.5};
  CHECK_THROWS_AS(flip_attribute(bad), Error);

  CodingScheme scheme;
  SchemeEntry grade{"grade", MeasurementType::ordinal()};
  grade.order = {"D", "C", "B", "A"};
  scheme.entries = {grade};
  auto ds = apply_scheme(parse_csv("grade\nA\nC\nD\n"), scheme);
  auto norm = normalize_unit_interval(ds);
  auto flipped = flip_attribute(norm.columns[0]);
  CHECK(norm.columns[0][0] == 1.0);
  CHECK(flipped[0] == 0.0);

  auto l = synthetic({{5, 0}, {3, 0}, {2, 0}}, 10);
  auto fl = flip_layout(l);
  CHECK(fl.flipped);
  CHECK(groups(fl) == std::vector<std::string>{"g2", "g1", "g0"});
  CHECK(flip_layout(fl) == l);
}

TEST_CASE("axis order by qualifying blocks") {
  std::vector<AxisLayout> ls = {synthetic({{90, 0}, {90, 0}, {90, 0}, {10, 10}}, 300),
                                synthetic({{90, 0}, {40, 40}}, 170), synthetic({{90, 0}, {90, 0}, {10, 10}}, 210)};
  CHECK(sort_axes(ls, SortMode::Purity, 0.8, 0.1) == std::vector<std::size_t>{0, 2, 1});
  std::vector<AxisLayout> same = {ls[1], ls[1], ls[1]};
  CHECK(sort_axes(same, SortMode::Purity, 0.8, 0.1) == std::vector<std::size_t>{0, 1, 2});
  CHECK(sort_axes(ls, SortMode::FrequencyDesc, 0.8, 0.1) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("bars sorted by color priority") {
  auto l = synthetic({{9, 1}, {1, 9}, {8, 2}, {2, 8}}, 40); // dominants a, b, a, b
  auto s = sort_bars_by_color(l, std::vector<std::string>{"b"});
  CHECK(groups(s) == std::vector<std::string>{"g0", "g2", "g1", "g3"});
  auto both = sort_bars_by_color(l, std::vector<std::string>{"a", "b"});
  CHECK(groups(both) == std::vector<std::string>{"g1", "g3", "g0", "g2"});
  CHECK(sort_bars_by_color(l, std::vector<std::string>{}) == l);
  CHECK_THROWS_AS(sort_bars_by_color(l, std::vector<std::string>{"yellow"}), Error);
}

TEST_CASE("edge weights equal pairwise counting and conserve bar counts") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto ds = random_dataset(rng, {.rows = 250, .attributes = 2, .values = 4, .classes = 3, .missing = 0.1});
    auto a = reference_layout(ds, 0, 2), b = reference_layout(ds, 1, 2);
    auto e = edge_weights(ds, a, b);
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::uint64_t> oracle;
    for (const auto& row : ds.rows()) {
      auto cls = std::find(a.classes.begin(), a.classes.end(), display(row[2])) - a.classes.begin();
      ++oracle[{*a.bar_of(display(row[0])), *b.bar_of(display(row[1])), std::size_t(cls)}];
    }
    CHECK(e.entries.size() == oracle.size());
    for (const auto& x : e.entries) CHECK(x.count == (oracle[{x.left, x.right, x.cls}]));
    std::vector<std::vector<std::uint64_t>> out(a.bars.size(), std::vector<std::uint64_t>(a.classes.size(), 0));
    for (const auto& x : e.entries) out[x.left][x.cls] += x.count;
    for (std::size_t i = 0; i < a.bars.size(); ++i) CHECK(out[i] == a.bars[i].per_class);
  }
  auto one = counted({{"a", "k", 1}});
  auto l = reference_layout(one, 0, 1);
  auto e = edge_weights(one, l, l);
  REQUIRE(e.entries.size() == 1);
  CHECK(e.entries[0].count == 1);
}

TEST_CASE("report lines") {
  CHECK(percent(81, 100) == 81);
  CHECK(percent(1, 200) == 1);  // 0.5 rounds up
  CHECK(percent(1, 3) == 33);
  CHECK(percent(2, 3) == 67);
  CHECK(percent(0, 0) == 0);

  auto ds = counted({{"a", "p", 81}, {"a", "q", 19}, {"b", "q", 150}});
  auto l = reference_layout(ds, 0, 1);
  std::vector<AxisLayout> ls = {l};
  auto lines = linguistic_report(ls);
  CHECK(lines == std::vector<std::string>{"v, block, 1 has a total frequency of 60", "v, block, 2 has a purity of 81"});

  auto small = counted({{"a", "p", 81}, {"a", "q", 19}, {"b", "q", 400}, {"c", "p", 30}});
  std::vector<AxisLayout> ls2 = {reference_layout(small, 0, 1)};
  auto lines2 = linguistic_report(ls2);
  CHECK(lines2 == std::vector<std::string>{"v, block, 1 has a total frequency of 75",
                                           "v, block, 2 has a purity of 81", "v has a small frequency block."});

  std::vector<AxisLayout> none = {synthetic({{50, 50}}, 100)};
  CHECK(linguistic_report(none).empty());
}

TEST_CASE("configuration bounds") {
  ViewConfig v;
  CHECK_NOTHROW(v.validate());
  v.min_block_size = -0.1;
  CHECK_THROWS_AS(v.validate(), Error);
  CHECK(parse_sort_mode("purity") == SortMode::Purity);
  CHECK_FALSE(parse_sort_mode("random"));
}

} // TEST_SUITE
