#pragma once

// Naive oracles and random instances shared by unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetviz/hyperblock.hpp"
#include "hetviz/rules.hpp"
#include "random_data.hpp"

namespace hetviz::testing {

// Independent reading of atom semantics over raw values.
inline std::optional<double> naive_numeric(const Attribute& a, const Value& v) {
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto c = std::get_if<Category>(&v)) {
    auto it = a.codes.find(c->symbol);
    if (it == a.codes.end()) return std::nullopt;
    return it->second;
  }
  if (auto l = std::get_if<Level>(&v)) return double(l->rank);
  return std::nullopt;
}

inline std::string naive_label(const Value& v) {
  if (auto d = std::get_if<double>(&v)) return format_number(*d);
  if (auto c = std::get_if<Category>(&v)) return c->symbol;
  if (auto l = std::get_if<Level>(&v)) return l->symbol;
  return "?";
}

inline bool naive_eval(const Expr& e, const Dataset& ds, const Row& x) {
  switch (e.op) {
  case Expr::Op::And: {
    bool all = true;
    for (const auto& a : e.args) all = all && naive_eval(a, ds, x);
    return all;
  }
  case Expr::Op::Or: {
    bool any = false;
    for (const auto& a : e.args) any = any || naive_eval(a, ds, x);
    return any;
  }
  case Expr::Op::Not: return !naive_eval(e.args[0], ds, x);
  case Expr::Op::Atom: break;
  }
  const auto& atom = *e.atom;
  const auto col = ds.index_of(atom_attribute(atom));
  const auto& v = x[col];
  if (is_missing(v)) return false;
  const auto& attr = ds.attribute(col);
  if (auto a = std::get_if<Equals>(&atom)) return naive_label(v) == a->value;
  if (auto a = std::get_if<NotEquals>(&atom)) return naive_label(v) != a->value;
  if (auto a = std::get_if<InSet>(&atom)) {
    for (const auto& s : a->values)
      if (s == naive_label(v)) return true;
    return false;
  }
  auto n = naive_numeric(attr, v);
  if (auto a = std::get_if<InRankRange>(&atom)) return n && *n >= a->start && *n <= a->end;
  if (auto a = std::get_if<InInterval>(&atom)) return n && a->lo <= *n && *n <= a->hi;
  throw std::logic_error("pair atom");
}

inline Atom random_atom(std::mt19937& rng, const Dataset& ds) {
  const auto col = rng() % (ds.num_attributes() - 1);
  const auto& name = ds.attribute(col).name;
  const auto pick = [&] { return naive_label(ds.at(rng() % ds.num_rows(), col)); };
  switch (rng() % 5) {
  case 0: return Equals{name, pick()};
  case 1: return NotEquals{name, pick()};
  case 2: {
    InSet s{name, {}};
    for (unsigned k = rng() % 3; k > 0; --k) s.values.push_back(pick());
    return s;
  }
  case 3: {
    std::uint32_t a = rng() % 5, b = rng() % 5;
    return InRankRange{name, std::min(a, b), std::max(a, b)};
  }
  default: {
    double a = double(rng() % 120) / 2 - 10, b = double(rng() % 120) / 2 - 10;
    if (rng() % 6 == 0) a = -std::numeric_limits<double>::infinity();
    return InInterval{name, std::min(a, b), std::max(a, b)};
  }
  }
}

inline Expr random_expr(std::mt19937& rng, const Dataset& ds, int depth) {
  if (depth == 0 || rng() % 3 == 0) return Expr::leaf(random_atom(rng, ds));
  switch (rng() % 3) {
  case 0: return Expr::negate(random_expr(rng, ds, depth - 1));
  case 1: {
    std::vector<Expr> xs;
    for (unsigned k = rng() % 4; k > 0; --k) xs.push_back(random_expr(rng, ds, depth - 1));
    return Expr::all(std::move(xs));
  }
  default: {
    std::vector<Expr> xs;
    for (unsigned k = rng() % 4; k > 0; --k) xs.push_back(random_expr(rng, ds, depth - 1));
    return Expr::any(std::move(xs));
  }
  }
}

// Schema: ratio "w", ordinal "g", nominal "c", cyclical "h", nominal class.
inline Dataset grid_schema() {
  std::vector<Attribute> attrs(5);
  attrs[0] = random_attribute("w", ScaleKind::Ratio, 5);
  attrs[1] = random_attribute("g", ScaleKind::Ordinal, 5);
  attrs[2] = random_attribute("c", ScaleKind::Nominal, 5);
  attrs[3] = random_attribute("h", ScaleKind::Cyclical, 5);
  attrs[4] = random_attribute("class", ScaleKind::Nominal, 2);
  return Dataset(attrs, {}, 4);
}

inline bool naive_contains(const HyperBlock& hb, const Row& x) {
  for (const auto& ac : hb.constraints) {
    const auto& v = x[ac.attribute];
    bool ok = false;
    if (auto b = std::get_if<NumericBand>(&ac.constraint)) {
      if (auto d = std::get_if<double>(&v)) ok = b->center - b->length / 2 <= *d && *d <= b->center + b->length / 2;
    } else if (auto r = std::get_if<OrdinalRange>(&ac.constraint)) {
      if (auto l = std::get_if<Level>(&v)) ok = r->start <= l->rank && l->rank <= r->end;
    } else {
      const auto& set = std::get<NominalSet>(ac.constraint).values;
      std::string label = std::holds_alternative<Category>(v) ? std::get<Category>(v).symbol
                          : std::holds_alternative<double>(v) ? format_number(std::get<double>(v))
                                                              : "";
      ok = !label.empty() && std::find(set.begin(), set.end(), label) != set.end();
    }
    if (!ok) return false;
  }
  return true;
}

inline HyperBlock random_block(std::mt19937& rng, const Dataset& schema) {
  HyperBlock hb;
  for (std::size_t a = 0; a + 1 < schema.num_attributes(); ++a) {
    if (rng() % 3 == 0) continue;
    const auto kind = schema.attribute(a).mtype.kind();
    if (kind == ScaleKind::Ratio) {
      hb.constraints.push_back({a, NumericBand{double(rng() % 13) * 0.5, double(rng() % 9) * 0.75}});
    } else if (kind == ScaleKind::Ordinal) {
      std::uint32_t x = rng() % 6, y = rng() % 6;
      hb.constraints.push_back({a, OrdinalRange{std::min(x, y), std::max(x, y)}});
    } else {
      NominalSet s;
      for (int v = 0; v < 5; ++v)
        if (rng() % 2)
          s.values.push_back(kind == ScaleKind::Nominal ? "n" + std::to_string(v) : format_number(30.0 * v));
      if (s.values.empty()) s.values.push_back(kind == ScaleKind::Nominal ? "n0" : "0");
      hb.constraints.push_back({a, s});
    }
  }
  return hb;
}

// All tuples over the grid schema, each attribute with its 5 values or Missing.
inline std::vector<Row> grid_points(const Dataset& schema) {
  std::vector<Row> points;
  std::vector<int> idx(4, 0);
  for (int i = 0; i < 6 * 6 * 6 * 6; ++i) {
    int k = i;
    Row row;
    for (std::size_t a = 0; a < 4; ++a, k /= 6) {
      const int v = k % 6;
      const auto& attr = schema.attribute(a);
      if (v == 5) {
        row.push_back(Missing{});
        continue;
      }
      switch (attr.mtype.kind()) {
      case ScaleKind::Ratio: row.push_back(double(v) * 1.5); break;
      case ScaleKind::Ordinal: row.push_back(Level{"o" + std::to_string(v), std::uint32_t(v + 1)}); break;
      case ScaleKind::Nominal: row.push_back(Category{"n" + std::to_string(v)}); break;
      default: row.push_back(double(30 * v)); break;
      }
    }
    row.push_back(Category{"c0"});
    points.push_back(std::move(row));
  }
  return points;
}

inline std::vector<std::uint8_t> members(const HyperBlock& hb, const Dataset& ds) {
  std::vector<std::uint8_t> out;
  for (const auto& row : ds.rows()) out.push_back(contains(hb, ds, row));
  return out;
}

} // namespace hetviz::testing
