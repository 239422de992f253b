#include "hetviz/hyperblock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>

#include "hetviz/kernels.hpp"

namespace hetviz {

const Constraint* HyperBlock::find(std::size_t attribute) const {
  for (const auto& c : constraints)
    if (c.attribute == attribute) return &c.constraint;
  return nullptr;
}

namespace {

const char* kind_name(const Constraint& c) {
  switch (c.index()) {
  case 0: return "numeric band";
  case 1: return "ordinal range";
  default: return "nominal set";
  }
}

bool kind_fits(const Attribute& attr, const Constraint& c) {
  const auto k = attr.mtype.kind();
  if (std::holds_alternative<NumericBand>(c))
    return k == ScaleKind::Interval || k == ScaleKind::Ratio || k == ScaleKind::Absolute;
  if (std::holds_alternative<OrdinalRange>(c)) return k == ScaleKind::Ordinal;
  return k == ScaleKind::Nominal || k == ScaleKind::Cyclical;
}

void check_kind(const Attribute& attr, const Constraint& c) {
  if (!kind_fits(attr, c))
    throw Error(ErrorCode::TypeViolation,
                std::string("a ") + kind_name(c) + " cannot constrain " +
                    std::string(to_string(attr.mtype.kind())) + " attribute '" + attr.name + "'",
                attr.name);
}

} // namespace

void validate_hyperblock(const HyperBlock& hb, const Dataset& schema) {
  std::optional<std::size_t> previous;
  for (const auto& ac : hb.constraints) {
    if (ac.attribute >= schema.num_attributes())
      throw Error(ErrorCode::UnknownAttribute, "constraint on attribute index " + std::to_string(ac.attribute) +
                                                   " outside the schema");
    if (previous && ac.attribute <= *previous)
      throw Error(ErrorCode::InvalidArgument, "constraints must name distinct attributes in ascending order");
    previous = ac.attribute;
    const auto& attr = schema.attribute(ac.attribute);
    check_kind(attr, ac.constraint);
    auto bad = [&](const std::string& what) {
      throw Error(ErrorCode::InvalidArgument, "constraint on '" + attr.name + "': " + what, attr.name);
    };
    if (auto b = std::get_if<NumericBand>(&ac.constraint)) {
      if (!std::isfinite(b->center) || !std::isfinite(b->length) || b->length < 0)
        bad("band needs a finite center and a non-negative length");
    } else if (auto r = std::get_if<OrdinalRange>(&ac.constraint)) {
      if (r->start > r->end) bad("rank range start exceeds end");
    } else if (std::get<NominalSet>(ac.constraint).values.empty()) {
      bad("value set is empty");
    }
  }
}

bool constraint_holds(const Attribute& attr, const Constraint& c, const Value& x) {
  check_kind(attr, c);
  if (is_missing(x)) return false;
  if (auto b = std::get_if<NumericBand>(&c)) return std::fabs(std::get<double>(x) - b->center) <= b->length / 2;
  if (auto r = std::get_if<OrdinalRange>(&c)) {
    const auto rank = std::get<Level>(x).rank;
    return r->start <= rank && rank <= r->end;
  }
  const auto& values = std::get<NominalSet>(c).values;
  return std::find(values.begin(), values.end(), display(x)) != values.end();
}

bool contains(const HyperBlock& hb, const Dataset& schema, const Row& x) {
  for (const auto& ac : hb.constraints)
    if (!constraint_holds(schema.attribute(ac.attribute), ac.constraint, x.at(ac.attribute))) return false;
  return true;
}

namespace {

// Order-preserving map between doubles (no NaN) and unsigned keys.
std::uint64_t key_of(double x) {
  const auto b = std::bit_cast<std::uint64_t>(x);
  return (b >> 63) ? ~b : b | (std::uint64_t(1) << 63);
}
double double_of(std::uint64_t k) {
  return std::bit_cast<double>((k >> 63) ? k & ~(std::uint64_t(1) << 63) : ~k);
}

// Smallest key in (out, in] where pred holds, given pred(out) false, pred(in)
// true and pred monotone between them.
template <class P>
std::uint64_t boundary(std::uint64_t out, std::uint64_t in, bool ascending, P&& pred) {
  while ((ascending ? in - out : out - in) > 1) {
    const std::uint64_t mid = ascending ? out + (in - out) / 2 : in + (out - in) / 2;
    (pred(double_of(mid)) ? in : out) = mid;
  }
  return in;
}

} // namespace

std::pair<double, double> band_bounds(const NumericBand& band) {
  if (!std::isfinite(band.center) || !std::isfinite(band.length) || band.length < 0)
    throw Error(ErrorCode::InvalidArgument, "band needs a finite center and a non-negative length");
  const double c = band.center, half = band.length / 2;
  auto in = [&](double x) { return std::fabs(x - c) <= half; };
  constexpr double inf = std::numeric_limits<double>::infinity();
  // fl(|x - c|) is monotone on each side of c, so the accepted doubles are contiguous.
  const double lo = double_of(boundary(key_of(-inf), key_of(c), true, in));
  const double hi = double_of(boundary(key_of(inf), key_of(c), false, in));
  return {lo, hi};
}

bool hb_contained_in(const HyperBlock& inner, const HyperBlock& outer) {
  for (const auto& oc : outer.constraints) {
    const Constraint* ic = inner.find(oc.attribute);
    if (!ic || ic->index() != oc.constraint.index()) return false;
    if (auto ob = std::get_if<NumericBand>(&oc.constraint)) {
      auto [ilo, ihi] = band_bounds(std::get<NumericBand>(*ic));
      auto [olo, ohi] = band_bounds(*ob);
      if (ilo < olo || ihi > ohi) return false;
    } else if (auto orr = std::get_if<OrdinalRange>(&oc.constraint)) {
      const auto& ir = std::get<OrdinalRange>(*ic);
      if (ir.start < orr->start || ir.end > orr->end) return false;
    } else {
      const auto& ov = std::get<NominalSet>(oc.constraint).values;
      for (const auto& v : std::get<NominalSet>(*ic).values)
        if (std::find(ov.begin(), ov.end(), v) == ov.end()) return false;
    }
  }
  return true;
}

namespace {

struct ClassCodes {
  std::vector<std::string> labels; // lexical
  std::vector<std::int32_t> codes; // per row
};

ClassCodes class_codes(const Dataset& ds) {
  if (!ds.target()) throw Error(ErrorCode::InvalidArgument, "purity needs a target attribute");
  auto col = discretize(ds, *ds.target());
  ClassCodes out;
  out.labels = col.labels;
  std::sort(out.labels.begin(), out.labels.end());
  std::vector<std::int32_t> remap(col.labels.size());
  for (std::size_t i = 0; i < col.labels.size(); ++i)
    remap[i] = std::int32_t(std::lower_bound(out.labels.begin(), out.labels.end(), col.labels[i]) - out.labels.begin());
  out.codes.resize(col.codes.size());
  for (std::size_t r = 0; r < col.codes.size(); ++r) out.codes[r] = remap[std::size_t(col.codes[r])];
  return out;
}

} // namespace

PurityStats purity(const HyperBlock& hb, const Dataset& ds) {
  validate_hyperblock(hb, ds);
  auto classes = class_codes(ds);
  auto mask = kernels::parallel::mask_rows(ds.num_rows(), [&](std::size_t r) { return contains(hb, ds, ds.row(r)); });
  PurityStats s;
  s.classes = classes.labels;
  s.per_class = kernels::parallel::masked_class_counts(mask, classes.codes, classes.labels.size());
  for (auto n : s.per_class) s.total += n;
  if (s.total) {
    s.dominant = std::size_t(std::max_element(s.per_class.begin(), s.per_class.end()) - s.per_class.begin());
    s.purity = double(s.per_class[*s.dominant]) / double(s.total);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Discovery

namespace {

enum class AxisKind { Band, Rank, Set };

/// Per-attribute discrete view: each row maps to a slot (an observed number,
/// rank or label); bands and ranges are slot intervals, sets are slot sets.
struct Axis {
  std::size_t attribute = 0;
  AxisKind kind = AxisKind::Set;
  std::vector<std::int32_t> slot; // per row, -1 for Missing
  std::vector<std::vector<std::uint32_t>> rows_by_slot;
  std::vector<double> numbers;    // Band slots, ascending
  std::vector<std::uint32_t> ranks; // Rank slots, ascending
  std::vector<std::string> labels;  // Set slots
};

std::vector<Axis> build_axes(const Dataset& ds) {
  std::vector<Axis> axes;
  for (std::size_t c = 0; c < ds.num_attributes(); ++c) {
    if (ds.target() == c) continue;
    Axis ax;
    ax.attribute = c;
    const auto kind = ds.attribute(c).mtype.kind();
    ax.kind = kind == ScaleKind::Ordinal                            ? AxisKind::Rank
              : (kind == ScaleKind::Nominal || kind == ScaleKind::Cyclical) ? AxisKind::Set
                                                                    : AxisKind::Band;
    ax.slot.assign(ds.num_rows(), -1);
    if (ax.kind == AxisKind::Set) {
      auto col = discretize(ds, c);
      for (std::size_t r = 0; r < ds.num_rows(); ++r)
        if (!col.missing_code || col.codes[r] != *col.missing_code) ax.slot[r] = col.codes[r];
      ax.labels = col.labels;
      if (col.missing_code) ax.labels.pop_back();
    } else {
      for (std::size_t r = 0; r < ds.num_rows(); ++r) {
        const auto& v = ds.at(r, c);
        if (is_missing(v)) continue;
        if (ax.kind == AxisKind::Band) ax.numbers.push_back(std::get<double>(v));
        else ax.ranks.push_back(std::get<Level>(v).rank);
      }
      std::sort(ax.numbers.begin(), ax.numbers.end());
      ax.numbers.erase(std::unique(ax.numbers.begin(), ax.numbers.end()), ax.numbers.end());
      std::sort(ax.ranks.begin(), ax.ranks.end());
      ax.ranks.erase(std::unique(ax.ranks.begin(), ax.ranks.end()), ax.ranks.end());
      for (std::size_t r = 0; r < ds.num_rows(); ++r) {
        const auto& v = ds.at(r, c);
        if (is_missing(v)) continue;
        if (ax.kind == AxisKind::Band)
          ax.slot[r] = std::int32_t(std::lower_bound(ax.numbers.begin(), ax.numbers.end(), std::get<double>(v)) -
                                    ax.numbers.begin());
        else
          ax.slot[r] = std::int32_t(std::lower_bound(ax.ranks.begin(), ax.ranks.end(), std::get<Level>(v).rank) -
                                    ax.ranks.begin());
      }
    }
    const std::size_t slots = ax.kind == AxisKind::Band ? ax.numbers.size()
                              : ax.kind == AxisKind::Rank ? ax.ranks.size()
                                                          : ax.labels.size();
    ax.rows_by_slot.resize(slots);
    for (std::size_t r = 0; r < ds.num_rows(); ++r)
      if (ax.slot[r] >= 0) ax.rows_by_slot[std::size_t(ax.slot[r])].push_back(std::uint32_t(r));
    axes.push_back(std::move(ax));
  }
  return axes;
}

/// A block in slot space. Inactive axes are unconstrained.
struct SlotBlock {
  std::vector<std::uint8_t> active;
  std::vector<std::int32_t> lo, hi;              // Band / Rank
  std::vector<std::vector<std::uint8_t>> in_set; // Set
  std::int32_t cls = 0;

  bool holds(const std::vector<Axis>& axes, std::size_t row) const {
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (!active[a]) continue;
      const auto s = axes[a].slot[row];
      if (s < 0) return false;
      if (axes[a].kind == AxisKind::Set ? !in_set[a][std::size_t(s)] : (s < lo[a] || s > hi[a])) return false;
    }
    return true;
  }

  bool inside(const SlotBlock& outer, const std::vector<Axis>& axes) const {
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (!outer.active[a]) continue;
      if (!active[a]) return false;
      if (axes[a].kind == AxisKind::Set) {
        for (std::size_t s = 0; s < in_set[a].size(); ++s)
          if (in_set[a][s] && !outer.in_set[a][s]) return false;
      } else if (lo[a] < outer.lo[a] || hi[a] > outer.hi[a]) {
        return false;
      }
    }
    return true;
  }
};

/// Greedy expansion from one seed row; nullopt when another class shares the
/// seed's known values.
std::optional<SlotBlock> expand(const std::vector<Axis>& axes, const std::vector<std::int32_t>& cls,
                                std::size_t seed, std::vector<std::uint32_t>& violations) {
  const std::size_t n = cls.size(), m = axes.size();
  SlotBlock b;
  b.cls = cls[seed];
  b.active.assign(m, 0);
  b.lo.assign(m, 0);
  b.hi.assign(m, 0);
  b.in_set.resize(m);
  std::fill(violations.begin(), violations.end(), 0u);
  for (std::size_t a = 0; a < m; ++a) {
    const auto s = axes[a].slot[seed];
    if (s < 0) continue; // a Missing seed value leaves the attribute free
    b.active[a] = 1;
    b.lo[a] = b.hi[a] = s;
    if (axes[a].kind == AxisKind::Set) {
      b.in_set[a].assign(axes[a].labels.size(), 0);
      b.in_set[a][std::size_t(s)] = 1;
    }
    for (std::size_t r = 0; r < n; ++r) violations[r] += axes[a].slot[r] != s;
  }
  for (std::size_t r = 0; r < n; ++r)
    if (violations[r] == 0 && cls[r] != b.cls) return std::nullopt;

  // Adding a slot admits the rows whose single violation is this attribute.
  auto try_add = [&](std::size_t a, std::size_t s) {
    for (auto r : axes[a].rows_by_slot[s])
      if (violations[r] == 1 && cls[r] != b.cls) return false;
    for (auto r : axes[a].rows_by_slot[s]) --violations[r];
    return true;
  };

  // A rejected step stays rejected: the block only grows, so the offending
  // row stays admissible.
  std::vector<std::uint8_t> frozen_lo(m, 0), frozen_hi(m, 0);
  std::vector<std::vector<std::uint8_t>> rejected(m);
  for (std::size_t a = 0; a < m; ++a)
    if (b.active[a] && axes[a].kind == AxisKind::Set) rejected[a].assign(axes[a].labels.size(), 0);

  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t a = 0; a < m; ++a) {
      if (!b.active[a]) continue;
      if (axes[a].kind == AxisKind::Set) {
        for (std::size_t s = 0; s < axes[a].labels.size(); ++s) {
          if (b.in_set[a][s] || rejected[a][s]) continue;
          if (try_add(a, s)) {
            b.in_set[a][s] = 1;
            progress = true;
            break;
          }
          rejected[a][s] = 1;
        }
        continue;
      }
      const auto slots = std::int32_t(axes[a].rows_by_slot.size());
      if (!frozen_lo[a]) {
        if (b.lo[a] > 0 && try_add(a, std::size_t(b.lo[a] - 1))) {
          --b.lo[a];
          progress = true;
        } else {
          frozen_lo[a] = 1;
        }
      }
      if (!frozen_hi[a]) {
        if (b.hi[a] + 1 < slots && try_add(a, std::size_t(b.hi[a] + 1))) {
          ++b.hi[a];
          progress = true;
        } else {
          frozen_hi[a] = 1;
        }
      }
    }
  }
  return b;
}

NumericBand band_for(double lo, double hi) {
  NumericBand band{0.5 * lo + 0.5 * hi, hi - lo};
  auto covers = [&](double x) { return std::fabs(x - band.center) <= band.length / 2; };
  while (!covers(lo) || !covers(hi)) band.length = std::nextafter(band.length, std::numeric_limits<double>::infinity());
  return band;
}

HyperBlock to_hyperblock(const SlotBlock& b, const std::vector<Axis>& axes, const std::string& label) {
  HyperBlock hb;
  hb.label = label;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (!b.active[a]) continue;
    const auto& ax = axes[a];
    Constraint c;
    if (ax.kind == AxisKind::Band) {
      c = band_for(ax.numbers[std::size_t(b.lo[a])], ax.numbers[std::size_t(b.hi[a])]);
    } else if (ax.kind == AxisKind::Rank) {
      c = OrdinalRange{ax.ranks[std::size_t(b.lo[a])], ax.ranks[std::size_t(b.hi[a])]};
    } else {
      NominalSet set;
      for (std::size_t s = 0; s < ax.labels.size(); ++s)
        if (b.in_set[a][s]) set.values.push_back(ax.labels[s]);
      std::sort(set.values.begin(), set.values.end());
      c = std::move(set);
    }
    hb.constraints.push_back({ax.attribute, std::move(c)});
  }
  return hb;
}

} // namespace

std::vector<HyperBlock> discover_pure_hbs(const Dataset& ds, const DiscoveryOptions& options) {
  auto classes = class_codes(ds);
  const auto axes = build_axes(ds);
  const std::size_t n = ds.num_rows();
  const std::size_t batch = std::max<std::size_t>(1, options.batch);

  std::vector<SlotBlock> found;
  std::vector<std::optional<SlotBlock>> results;
  std::vector<std::size_t> seeds;
  for (std::size_t first = 0; first < n; first += batch) {
    seeds.clear();
    for (std::size_t r = first; r < std::min(n, first + batch); ++r) {
      bool covered = false;
      for (const auto& b : found)
        if (b.cls == classes.codes[r] && b.holds(axes, r)) {
          covered = true;
          break;
        }
      if (!covered) seeds.push_back(r);
    }
    results.assign(seeds.size(), std::nullopt);
    const auto count = static_cast<std::int64_t>(seeds.size());
    std::exception_ptr failure;
    if (options.parallel) {
#pragma omp parallel
      {
        std::vector<std::uint32_t> violations(n);
#pragma omp for schedule(dynamic)
        for (std::int64_t i = 0; i < count; ++i) {
          try {
            results[std::size_t(i)] = expand(axes, classes.codes, seeds[std::size_t(i)], violations);
          } catch (...) {
#pragma omp critical(hetviz_discovery_error)
            if (!failure) failure = std::current_exception();
          }
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      std::vector<std::uint32_t> violations(n);
      for (std::int64_t i = 0; i < count; ++i)
        results[std::size_t(i)] = expand(axes, classes.codes, seeds[std::size_t(i)], violations);
    }
    for (auto& r : results)
      if (r) found.push_back(std::move(*r));
  }

  // Drop blocks inside another block; of identical blocks the first stays.
  std::vector<HyperBlock> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < found.size() && !redundant; ++j) {
      if (i == j || !found[i].inside(found[j], axes)) continue;
      redundant = !found[j].inside(found[i], axes) || j < i;
    }
    if (!redundant) out.push_back(to_hyperblock(found[i], axes, classes.labels[std::size_t(found[i].cls)]));
  }
  return out;
}

std::vector<std::uint8_t> conflicted_rows(const Dataset& ds) {
  auto classes = class_codes(ds);
  const std::size_t n = ds.num_rows();
  const auto target = *ds.target();
  return kernels::parallel::mask_rows(n, [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (classes.codes[y] == classes.codes[x]) continue;
      bool same = true;
      for (std::size_t c = 0; c < ds.num_attributes() && same; ++c) {
        if (c == target || is_missing(ds.at(x, c))) continue;
        same = ds.at(x, c) == ds.at(y, c);
      }
      if (same) return true;
    }
    return false;
  });
}

Rule hb_to_rule(const HyperBlock& hb, const Dataset& schema) {
  validate_hyperblock(hb, schema);
  std::vector<Expr> atoms;
  for (const auto& ac : hb.constraints) {
    const auto& name = schema.attribute(ac.attribute).name;
    if (auto b = std::get_if<NumericBand>(&ac.constraint)) {
      auto [lo, hi] = band_bounds(*b);
      atoms.push_back(Expr::leaf(InInterval{name, lo, hi}));
    } else if (auto r = std::get_if<OrdinalRange>(&ac.constraint)) {
      atoms.push_back(Expr::leaf(InRankRange{name, r->start, r->end}));
    } else {
      atoms.push_back(Expr::leaf(InSet{name, std::get<NominalSet>(ac.constraint).values}));
    }
  }
  return {Expr::all(std::move(atoms)), hb.label.value_or(""), std::nullopt};
}

} // namespace hetviz
