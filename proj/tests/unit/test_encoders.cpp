#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "hetviz/encoders.hpp"
#include "hetviz/ingest.hpp"

using namespace hetviz;

namespace {

Dataset nominal_ds(const std::string& csv, std::optional<std::string> target = std::nullopt) {
  return apply_scheme(parse_csv(csv), {{}, target, ScaleKind::Nominal});
}

// Binary-target dataset: attribute "v" with values and class labels.
Dataset with_classes(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string csv = "v,class\n";
  for (const auto& [v, c] : rows) csv += v + "," + c + "\n";
  return nominal_ds(csv, "class");
}

Dataset random_ds(std::mt19937& rng, std::size_t n, int values, int classes) {
  std::string csv = "v,class\n";
  for (std::size_t r = 0; r < n; ++r) {
    int v = int(rng() % unsigned(values + 1));
    csv += (v == values ? std::string("?") : "v" + std::to_string(v)) + ",c" + std::to_string(rng() % unsigned(classes)) + "\n";
  }
  return nominal_ds(csv, "class");
}

struct Oracle {
  std::map<std::string, double> total;
  std::map<std::string, std::map<std::string, double>> by_class;
  std::map<std::string, double> class_total;
  double rows = 0;
};

Oracle count(const Dataset& ds) {
  Oracle o;
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    auto v = display(ds.at(r, 0));
    auto c = display(ds.at(r, 1));
    o.total[v] += 1;
    o.by_class[v][c] += 1;
    o.class_total[c] += 1;
    o.rows += 1;
  }
  return o;
}

} // namespace

TEST_SUITE("encoders") {

TEST_CASE("one-hot") {
  auto ds = nominal_ds("h\ngrass\nurban\nwoods\ngrass\n?\n");
  auto r = one_hot(ds, 0);
  REQUIRE(r.columns.size() == 4);
  CHECK(r.columns[0].name == "h=grass");
  CHECK(*r.code_of("grass") == std::vector<double>{1, 0, 0, 0});
  for (std::size_t row = 0; row < ds.num_rows(); ++row) {
    double sum = 0;
    for (const auto& c : r.columns) sum += c.values[row];
    CHECK(sum == 1);
  }
  for (const auto& [a, ca] : r.code_map)
    for (const auto& [b, cb] : r.code_map) {
      if (a == b) continue;
      int hamming = 0;
      for (std::size_t k = 0; k < ca.size(); ++k) hamming += ca[k] != cb[k];
      CHECK(hamming == 2);
    }
  CHECK(r.lossy_collisions.empty());
  auto num = apply_scheme(parse_csv("x\n1\n"), {{}, {}, ScaleKind::Ratio});
  CHECK_THROWS_AS(one_hot(num, 0), Error);
}

TEST_CASE("one-hot follows the declared order for ordinal values") {
  SchemeEntry e;
  e.name = "s";
  e.mtype = MeasurementType::ordinal();
  e.order = {"short", "medium", "tall"};
  auto ds = apply_scheme(parse_csv("s\ntall\nshort\nmedium\n"), {{e}, {}, {}});
  auto r = one_hot(ds, 0);
  CHECK(r.columns[0].name == "s=short");
  CHECK(r.columns[2].name == "s=tall");
}

TEST_CASE("label coding") {
  auto ds = nominal_ds("h\ngrass\nleaves\nmeadows\ngrass\n");
  auto r = label_encode(ds, 0);
  CHECK(*r.code_of("grass") == std::vector<double>{1});
  CHECK(*r.code_of("leaves") == std::vector<double>{2});
  CHECK(*r.code_of("meadows") == std::vector<double>{3});
  CHECK(r.columns[0].values == std::vector<double>{1, 2, 3, 1});
  CHECK(r.interpretability_note.find("distances") != std::string::npos);
  CHECK(label_encode(ds, 0) == r);
  CHECK(*label_encode(nominal_ds("h\nx\nx\n"), 0).code_of("x") == std::vector<double>{1});
}

TEST_CASE("ordinal coding") {
  SchemeEntry e;
  e.name = "height";
  e.mtype = MeasurementType::ordinal();
  e.order = {"very short", "short", "medium", "tall", "very tall"};
  auto ds = apply_scheme(parse_csv("height\ntall\nvery short\nmedium\nshort\nvery tall\n"), {{e}, {}, {}});
  auto r = ordinal_encode(ds, 0);
  CHECK(r.columns[0].values == std::vector<double>{4, 1, 3, 2, 5});
  CHECK(r.code_map.front().first == "very short");

  std::vector<std::string> reversed(e.order.rbegin(), e.order.rend());
  auto rev = ordinal_encode(ds, 0, reversed);
  CHECK(rev.columns[0].values == std::vector<double>{2, 5, 3, 4, 1});

  try {
    ordinal_encode(ds, 0, std::vector<std::string>{"short", "tall"});
    FAIL("expected error");
  } catch (const Error& err) {
    CHECK(err.value() == "very short");
  }
  CHECK_THROWS_AS(ordinal_encode(nominal_ds("x\na\n"), 0), Error);
}

TEST_CASE("frequency coding and collisions") {
  std::string csv = "color\n";
  for (int i = 0; i < 3; ++i) csv += "red\nblue\n";
  for (int i = 0; i < 4; ++i) csv += "green\n";
  auto r = frequency_encode(nominal_ds(csv), 0);
  CHECK((*r.code_of("red"))[0] == 0.3);
  CHECK((*r.code_of("blue"))[0] == 0.3);
  CHECK((*r.code_of("green"))[0] == doctest::Approx(0.4));
  REQUIRE(r.lossy_collisions.size() == 1);
  CHECK(r.lossy_collisions[0] == std::vector<std::string>{"red", "blue"});
  CHECK(r.interpretability_note.find("indistinguishable") != std::string::npos);

  auto all = frequency_encode(nominal_ds("c\nx\nx\n"), 0);
  CHECK((*all.code_of("x"))[0] == 1.0);
  CHECK(all.lossy_collisions.empty());
}

TEST_CASE("target codings on the worked numbers") {
  std::vector<std::pair<std::string, std::string>> rows{
      {"v", "1"}, {"v", "1"}, {"v", "1"}, {"v", "0"}, {"w", "0"}, {"w", "0"}, {"w", "1"}, {"w", "0"}};
  auto ds = with_classes(rows);
  CHECK((*mean_target_encode(ds, 0).code_of("v"))[0] == 0.75);
  // global mean 4/8 = 0.5, lambda = 4/5
  CHECK((*james_stein_encode(ds, 0).code_of("v"))[0] == doctest::Approx(0.70));
  CHECK((*james_stein_encode(ds, 0).code_of("w"))[0] == doctest::Approx(0.8 * 0.25 + 0.2 * 0.5));

  std::vector<std::pair<std::string, std::string>> ratio;
  for (int i = 0; i < 6; ++i) ratio.push_back({"a", "1"});
  for (int i = 0; i < 2; ++i) ratio.push_back({"a", "0"});
  ratio.push_back({"b", "1"});
  ratio.push_back({"b", "0"});
  ratio.push_back({"z", "1"});
  auto rd = with_classes(ratio);
  auto smoothed = probability_ratio_encode(rd, 0);
  CHECK((*smoothed.code_of("a"))[0] == doctest::Approx(7.0 / 3.0));
  CHECK((*smoothed.code_of("z"))[0] == 2.0);
  try {
    probability_ratio_encode(rd, 0, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.value() == "z");
  }
  auto exact = probability_ratio_encode(with_classes({{"a", "1"}, {"a", "1"}, {"a", "1"}, {"a", "1"}, {"a", "1"},
                                                       {"a", "1"}, {"a", "0"}, {"a", "0"}, {"b", "0"}, {"b", "1"}}),
                                        0, 0);
  CHECK((*exact.code_of("a"))[0] == 3.0);
  CHECK((*exact.code_of("b"))[0] == 1.0);

  auto only0 = mean_target_encode(with_classes({{"x", "0"}, {"y", "1"}}), 0);
  CHECK((*only0.code_of("x"))[0] == 0.0);
  CHECK((*only0.code_of("y"))[0] == 1.0);

  CHECK_THROWS_AS(mean_target_encode(nominal_ds("v\na\n"), 0), Error);
  CHECK_THROWS_AS(james_stein_encode(ds, 0, 0), Error);
  CHECK_THROWS_AS(probability_ratio_encode(ds, 0, -1), Error);
}

TEST_CASE("James-Stein limits") {
  // value mean equal to the global mean is a fixed point
  auto eq = with_classes({{"a", "1"}, {"a", "0"}, {"b", "1"}, {"b", "0"}});
  for (double shrink : {0.1, 1.0, 50.0})
    CHECK((*james_stein_encode(eq, 0, shrink).code_of("a"))[0] == doctest::Approx(0.5));

  // n_v = 10^6 drives the code to the value mean
  std::vector<Row> rows;
  std::vector<Attribute> attrs(2);
  attrs[0].name = "v";
  attrs[1].name = "class";
  for (int i = 0; i < 1000000; ++i) rows.push_back({Category{"a"}, Category{i % 4 == 0 ? "0" : "1"}});
  rows.push_back({Category{"b"}, Category{"0"}});
  Dataset big(attrs, std::move(rows), 1);
  CHECK((*james_stein_encode(big, 0).code_of("a"))[0] == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("multi-class targets are coded one-vs-rest") {
  auto ds = with_classes({{"a", "x"}, {"a", "y"}, {"b", "z"}, {"a", "x"}});
  auto r = mean_target_encode(ds, 0);
  REQUIRE(r.columns.size() == 3);
  CHECK(r.columns[0].name == "v|x");
  auto a = *r.code_of("a");
  CHECK(a[0] == doctest::Approx(2.0 / 3.0));
  CHECK(a[1] == doctest::Approx(1.0 / 3.0));
  CHECK(a[2] == 0.0);
}

TEST_CASE("statistics codings match a counting oracle") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int classes = trial % 3 == 0 ? 3 : 2;
    auto ds = random_ds(rng, 1 + rng() % 400, 1 + int(rng() % 9), classes);
    auto o = count(ds);
    std::vector<std::string> labels;
    for (const auto& [c, n] : o.class_total) labels.push_back(c);
    std::vector<std::string> coded =
        labels.size() <= 2 ? std::vector<std::string>{labels.back()} : labels;

    auto freq = frequency_encode(ds, 0);
    auto mean = mean_target_encode(ds, 0);
    auto ratio = probability_ratio_encode(ds, 0, 1.0);
    auto js = james_stein_encode(ds, 0, 2.0);
    for (const auto& [v, n] : o.total) {
      CHECK((*freq.code_of(v))[0] == n / o.rows);
      for (std::size_t k = 0; k < coded.size(); ++k) {
        const double n1 = o.by_class[v][coded[k]];
        CHECK((*mean.code_of(v))[k] == n1 / n);
        CHECK((*ratio.code_of(v))[k] == (n1 + 1) / (n - n1 + 1));
        const double global = o.class_total[coded[k]] / o.rows;
        const double lambda = n / (n + 2.0);
        CHECK((*js.code_of(v))[k] == doctest::Approx(lambda * n1 / n + (1 - lambda) * global));
      }
    }
    for (std::size_t r = 0; r < ds.num_rows(); ++r)
      CHECK(freq.columns[0].values[r] == (*freq.code_of(display(ds.at(r, 0))))[0]);
    // collisions exactly when two values share a frequency
    std::map<double, int> same;
    for (const auto& [v, n] : o.total) ++same[n];
    bool any = false;
    for (const auto& [n, k] : same) any |= k > 1;
    CHECK(any == !freq.lossy_collisions.empty());
  }
}

TEST_CASE("hash coding") {
  std::string csv = "w\n";
  for (int i = 0; i < 1000; ++i) csv += "word" + std::to_string(i) + "\n";
  csv += "word7\n";
  auto ds = nominal_ds(csv);
  auto r = hash_encode(ds, 0, 64, 17);
  CHECK(r.columns.size() == 64);
  for (const auto& [v, code] : r.code_map) CHECK(code.size() == 64);
  std::vector<double> first, last;
  for (const auto& c : r.columns) {
    first.push_back(c.values[7]);
    last.push_back(c.values[1000]);
  }
  CHECK(first == last);
  CHECK(hash_encode(ds, 0, 64, 17) == r);
  CHECK(hash_encode(ds, 0, 64, 18) != r);
  std::size_t colliding = 0;
  for (const auto& set : r.lossy_collisions) colliding += set.size();
  const double fraction = double(colliding) / 1000.0;
  MESSAGE("hash collision fraction over 1000 values at dim 64: " << fraction);
  CHECK(fraction > 0); // 1000 values in 128 signed slots must collide
  CHECK(r.interpretability_note.find("not interpretable") != std::string::npos);
  CHECK_THROWS_AS(hash_encode(ds, 0, 0), Error);
}

TEST_CASE("wavelength coding") {
  auto ds = nominal_ds("c\nred\ngreen\nblue\n?\n");
  auto r = wavelength_color_encode(ds, 0);
  CHECK(*r.code_of("blue") == std::vector<double>{0});
  CHECK(*r.code_of("green") == std::vector<double>{1});
  CHECK(*r.code_of("red") == std::vector<double>{2});
  CHECK(r.columns[0].mtype.kind() == ScaleKind::Ordinal);
  CHECK(std::isnan(r.columns[0].values[3]));
  CHECK(*wavelength_color_encode(nominal_ds("c\nred\n"), 0).code_of("red") == std::vector<double>{0});
  try {
    wavelength_color_encode(nominal_ds("c\nred\nmauve\n"), 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.value() == "mauve");
  }
  auto nm = apply_scheme(parse_csv("w\n700\n460\n530\n"), {{}, {}, ScaleKind::Ratio});
  CHECK(wavelength_color_encode(nm, 0).columns[0].values == std::vector<double>{2, 0, 1});
}

TEST_CASE("dispatch and parallel encoding") {
  auto ds = nominal_ds("a,b,class\nx,p,1\ny,q,0\nx,q,1\n", "class");
  for (auto kind : {"one_hot", "label", "frequency", "mean_target", "prob_ratio", "james_stein", "hash"})
    CHECK(encode(ds, 0, kind).encoder == kind);
  CHECK_THROWS_AS(encode(ds, 0, "word2vec"), Error);
  std::vector<std::size_t> attrs{0, 1};
  auto many = encode_many(ds, attrs, "one_hot");
  CHECK(many[0] == one_hot(ds, 0));
  CHECK(many[1] == one_hot(ds, 1));
  auto num = apply_scheme(parse_csv("x\n1\n"), {{}, {}, ScaleKind::Ratio});
  std::vector<std::size_t> one{0};
  CHECK_THROWS_AS(encode_many(num, one, "one_hot"), Error);
}

} // TEST_SUITE
