#include "hetviz/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hetviz/kernels.hpp"

namespace hetviz {

namespace {

void require_discrete(const Dataset& ds, std::size_t attr, const char* encoder) {
  const auto& a = ds.attribute(attr);
  if (a.mtype.is_numeric())
    throw Error(ErrorCode::TypeViolation,
                std::string(encoder) + " coding is not permitted for " +
                    std::string(to_string(a.mtype.kind())) + " attribute '" + a.name + "'",
                a.name);
}

void find_collisions(EncodingResult& r) {
  std::map<std::vector<double>, std::vector<std::string>> by_code;
  std::vector<const std::vector<double>*> order;
  for (const auto& [value, code] : r.code_map) {
    auto [it, inserted] = by_code.try_emplace(code);
    if (inserted) order.push_back(&it->first);
    it->second.push_back(value);
  }
  for (const auto* code : order) {
    const auto& values = by_code.at(*code);
    if (values.size() > 1) r.lossy_collisions.push_back(values);
  }
}

/// Builds the per-row columns from a per-value code table.
void fill_columns(EncodingResult& r, const DiscreteColumn& col,
                  const std::vector<std::vector<double>>& codes_by_label) {
  for (std::size_t k = 0; k < r.columns.size(); ++k) {
    auto& out = r.columns[k].values;
    out.resize(col.codes.size());
    for (std::size_t row = 0; row < col.codes.size(); ++row)
      out[row] = codes_by_label[std::size_t(col.codes[row])][k];
  }
  for (std::size_t v = 0; v < col.labels.size(); ++v) r.code_map.emplace_back(col.labels[v], codes_by_label[v]);
  find_collisions(r);
}

EncodingResult start(const Dataset& ds, std::size_t attr, const char* encoder) {
  EncodingResult r;
  r.attribute = ds.attribute(attr).name;
  r.encoder = encoder;
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

enum class TargetCode { Mean, Ratio, JamesStein };

EncodingResult target_encode(const Dataset& ds, std::size_t attr, TargetCode how, double param,
                             const char* encoder) {
  auto stats = target_stats(ds, attr);
  auto r = start(ds, attr, encoder);
  const auto coded = stats.coded_classes();
  for (auto cls : coded)
    r.columns.push_back({stats.binary() ? r.attribute : r.attribute + "|" + stats.classes[cls],
                         MeasurementType::ratio(),
                         {}});

  std::vector<std::vector<double>> table(stats.values.size());
  for (std::size_t v = 0; v < stats.values.size(); ++v) {
    for (auto cls : coded) {
      const double n = double(stats.totals[v]);
      const double n1 = double(stats.per_class[v][cls]);
      const double n0 = n - n1;
      double code = 0;
      switch (how) {
      case TargetCode::Mean: code = n1 / n; break;
      case TargetCode::Ratio:
        if (param == 0 && n0 == 0)
          throw Error(ErrorCode::InvalidArgument,
                      "probability ratio undefined for value '" + stats.values[v] + "' of '" + r.attribute +
                          "': it never occurs outside class '" + stats.classes[cls] + "'",
                      r.attribute, stats.values[v]);
        code = (n1 + param) / (n0 + param);
        break;
      case TargetCode::JamesStein: {
        std::uint64_t in_class = 0;
        for (std::size_t w = 0; w < stats.values.size(); ++w) in_class += stats.per_class[w][cls];
        const double global = double(in_class) / double(stats.rows);
        const double lambda = n / (n + param);
        code = lambda * (n1 / n) + (1 - lambda) * global;
        break;
      }
      }
      table[v].push_back(code);
    }
  }
  fill_columns(r, discretize(ds, attr), table);
  return r;
}

} // namespace

const std::vector<double>* EncodingResult::code_of(std::string_view value) const {
  for (const auto& [v, code] : code_map)
    if (v == value) return &code;
  return nullptr;
}

std::vector<std::size_t> TargetStats::coded_classes() const {
  if (binary()) return {positive};
  std::vector<std::size_t> all(classes.size());
  std::iota(all.begin(), all.end(), std::size_t(0));
  return all;
}

double TargetStats::class_frequency(std::size_t value, std::size_t cls) const {
  return totals[value] ? double(per_class[value][cls]) / double(totals[value]) : 0.0;
}

TargetStats target_stats(const Dataset& ds, std::size_t attr) {
  if (!ds.target())
    throw Error(ErrorCode::InvalidArgument,
                "target-based coding of '" + ds.attribute(attr).name + "' needs a target attribute",
                ds.attribute(attr).name);
  auto col = discretize(ds, attr);
  auto target = discretize(ds, *ds.target());

  TargetStats s;
  s.values = col.labels;
  s.classes = target.labels;
  std::sort(s.classes.begin(), s.classes.end());
  std::vector<std::int32_t> remap(target.labels.size());
  for (std::size_t i = 0; i < target.labels.size(); ++i)
    remap[i] = std::int32_t(std::lower_bound(s.classes.begin(), s.classes.end(), target.labels[i]) -
                            s.classes.begin());
  std::vector<std::int32_t> classes(target.codes.size());
  for (std::size_t r = 0; r < classes.size(); ++r) classes[r] = remap[std::size_t(target.codes[r])];

  auto table = kernels::parallel::contingency(col.codes, s.values.size(), classes, s.classes.size());
  s.rows = ds.num_rows();
  s.totals.assign(s.values.size(), 0);
  s.per_class.assign(s.values.size(), std::vector<std::uint64_t>(s.classes.size(), 0));
  for (std::size_t v = 0; v < s.values.size(); ++v)
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
      s.per_class[v][c] = table.at(v, c);
      s.totals[v] += table.at(v, c);
    }
  s.positive = s.classes.empty() ? 0 : s.classes.size() - 1;
  return s;
}

EncodingResult one_hot(const Dataset& ds, std::size_t attr) {
  require_discrete(ds, attr, "one-hot");
  auto col = discretize(ds, attr);
  const auto& a = ds.attribute(attr);

  // Column order: declared order for ordinal values, first appearance otherwise.
  std::vector<std::size_t> position(col.size());
  std::iota(position.begin(), position.end(), std::size_t(0));
  if (a.mtype.kind() == ScaleKind::Ordinal) {
    auto rank = [&](std::size_t label) {
      auto r = a.rank_of(col.labels[label]);
      return r ? std::int64_t(*r) : std::numeric_limits<std::int64_t>::max(); // "?" last
    };
    std::vector<std::size_t> order(col.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return rank(x) < rank(y); });
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  }

  auto r = start(ds, attr, "one_hot");
  r.columns.resize(col.size());
  for (std::size_t v = 0; v < col.size(); ++v)
    r.columns[position[v]] = {a.name + "=" + col.labels[v], MeasurementType::nominal(), {}};
  std::vector<std::vector<double>> table(col.size(), std::vector<double>(col.size(), 0.0));
  for (std::size_t v = 0; v < col.size(); ++v) table[v][position[v]] = 1.0;
  fill_columns(r, col, table);
  r.interpretability_note =
      "one binary column per value; every pair of distinct values is at Hamming distance 2";
  return r;
}

EncodingResult label_encode(const Dataset& ds, std::size_t attr) {
  const auto& a = ds.attribute(attr);
  if (a.mtype.kind() != ScaleKind::Nominal)
    throw Error(ErrorCode::TypeViolation,
                "label coding applies to nominal attributes; '" + a.name + "' is " +
                    std::string(to_string(a.mtype.kind())),
                a.name);
  auto col = discretize(ds, attr);
  auto r = start(ds, attr, "label");
  r.columns.push_back({a.name, MeasurementType::nominal(), {}});
  std::vector<std::vector<double>> table;
  for (std::size_t v = 0; v < col.size(); ++v) table.push_back({double(v + 1)});
  fill_columns(r, col, table);
  r.interpretability_note =
      "codes 1..k are arbitrary labels; differences of distances between codes carry no meaning";
  return r;
}

EncodingResult ordinal_encode(const Dataset& ds, std::size_t attr,
                              const std::optional<std::vector<std::string>>& order) {
  const auto& a = ds.attribute(attr);
  const std::vector<std::string>* levels = order ? &*order : &a.declared_order;
  if (a.mtype.is_numeric())
    throw Error(ErrorCode::TypeViolation, "ordinal coding is not permitted for numeric attribute '" + a.name + "'",
                a.name);
  if (levels->empty())
    throw Error(ErrorCode::InvalidArgument, "ordinal coding of '" + a.name + "' needs a declared order", a.name);

  auto col = discretize(ds, attr);
  auto r = start(ds, attr, "ordinal");
  r.columns.push_back({a.name, MeasurementType::ordinal(), {}});
  std::vector<std::vector<double>> table;
  for (const auto& label : col.labels) {
    if (col.missing_code && label == col.labels[std::size_t(*col.missing_code)]) {
      table.push_back({0.0});
      continue;
    }
    auto pos = std::find(levels->begin(), levels->end(), label);
    if (pos == levels->end())
      throw Error(ErrorCode::UnknownValue,
                  "value '" + label + "' of '" + a.name + "' is not in the declared order", a.name, label);
    table.push_back({double(pos - levels->begin() + 1)});
  }
  fill_columns(r, col, table);
  // code_map lists values along the order, which is how the codes read
  std::stable_sort(r.code_map.begin(), r.code_map.end(),
                   [](const auto& x, const auto& y) { return x.second < y.second; });
  r.interpretability_note = "codes follow the declared order; only their order is meaningful";
  return r;
}

EncodingResult frequency_encode(const Dataset& ds, std::size_t attr) {
  auto col = discretize(ds, attr);
  std::vector<std::int32_t> none(col.codes.size(), 0);
  auto counts = kernels::parallel::contingency(col.codes, col.size(), none, 1);
  auto r = start(ds, attr, "frequency");
  r.columns.push_back({r.attribute, MeasurementType::ratio(), {}});
  std::vector<std::vector<double>> table;
  for (std::size_t v = 0; v < col.size(); ++v)
    table.push_back({double(counts.at(v, 0)) / double(ds.num_rows())});
  fill_columns(r, col, table);
  r.interpretability_note = r.lossy_collisions.empty()
                                ? "codes are relative frequencies"
                                : "codes are relative frequencies; values with equal frequency are "
                                  "indistinguishable (see collisions)";
  return r;
}

EncodingResult mean_target_encode(const Dataset& ds, std::size_t attr) {
  auto r = target_encode(ds, attr, TargetCode::Mean, 0, "mean_target");
  r.interpretability_note = "code is the share of the value's cases in the coded class";
  return r;
}

EncodingResult probability_ratio_encode(const Dataset& ds, std::size_t attr, double smoothing) {
  if (!(smoothing >= 0) || !std::isfinite(smoothing))
    throw Error(ErrorCode::InvalidArgument, "smoothing must be a non-negative number");
  auto r = target_encode(ds, attr, TargetCode::Ratio, smoothing, "prob_ratio");
  r.interpretability_note = "code is P(class)/P(not class) for the value, smoothed additively";
  return r;
}

EncodingResult james_stein_encode(const Dataset& ds, std::size_t attr, double shrink) {
  if (!(shrink > 0) || !std::isfinite(shrink))
    throw Error(ErrorCode::InvalidArgument, "shrink must be a positive number");
  auto r = target_encode(ds, attr, TargetCode::JamesStein, shrink, "james_stein");
  r.interpretability_note = "value mean shrunk toward the global mean; rare values sit near the global mean";
  return r;
}

EncodingResult hash_encode(const Dataset& ds, std::size_t attr, std::size_t dim, std::uint64_t seed) {
  const auto& a = ds.attribute(attr);
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "hash dimension must be positive", a.name);
  if (a.mtype.kind() != ScaleKind::Nominal)
    throw Error(ErrorCode::TypeViolation, "hash coding applies to nominal attributes; '" + a.name + "' is not",
                a.name);
  auto col = discretize(ds, attr);
  auto r = start(ds, attr, "hash");
  for (std::size_t k = 0; k < dim; ++k)
    r.columns.push_back({a.name + "#" + std::to_string(k), MeasurementType::interval(), {}});
  std::vector<std::vector<double>> table;
  for (const auto& label : col.labels) {
    const auto h = splitmix64(fnv1a(label) ^ splitmix64(seed));
    std::vector<double> v(dim, 0.0);
    v[h % dim] = (splitmix64(h) >> 63) ? -1.0 : 1.0;
    table.push_back(std::move(v));
  }
  fill_columns(r, col, table);
  r.interpretability_note = "hashed space: buckets mix unrelated values and the new space can be not interpretable";
  return r;
}

std::vector<ColorBand> default_palette() {
  return {{"violet", 380, 450}, {"blue", 450, 495},   {"green", 495, 570},
          {"yellow", 570, 590}, {"orange", 590, 620}, {"red", 620, 750}};
}

EncodingResult wavelength_color_encode(const Dataset& ds, std::size_t attr, const std::vector<ColorBand>& palette) {
  const auto& a = ds.attribute(attr);
  std::vector<ColorBand> bands = palette;
  for (const auto& b : bands)
    if (!(b.lo_nm < b.hi_nm)) throw Error(ErrorCode::InvalidArgument, "color band '" + b.color + "' is empty");
  std::stable_sort(bands.begin(), bands.end(), [](const auto& x, const auto& y) { return x.lo_nm < y.lo_nm; });

  auto band_of = [&](const Value& v) -> std::size_t {
    if (auto x = std::get_if<double>(&v)) {
      for (std::size_t i = 0; i < bands.size(); ++i)
        if (*x >= bands[i].lo_nm && *x < bands[i].hi_nm) return i;
    } else {
      const auto name = display(v);
      for (std::size_t i = 0; i < bands.size(); ++i)
        if (bands[i].color == name) return i;
    }
    throw Error(ErrorCode::UnknownValue, "color '" + display(v) + "' of '" + a.name + "' is not in the palette",
                a.name, display(v));
  };

  std::vector<std::optional<std::size_t>> row_band(ds.num_rows());
  std::vector<bool> present(bands.size(), false);
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    if (is_missing(ds.at(r, attr))) continue;
    row_band[r] = band_of(ds.at(r, attr));
    present[*row_band[r]] = true;
  }
  std::vector<double> code(bands.size(), -1);
  double next = 0;
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (present[i]) code[i] = next++;

  auto r = start(ds, attr, "wavelength");
  r.columns.push_back({a.name, MeasurementType::ordinal(), std::vector<double>(ds.num_rows(), NAN)});
  for (std::size_t row = 0; row < ds.num_rows(); ++row)
    if (row_band[row]) r.columns[0].values[row] = code[*row_band[row]];
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (present[i]) r.code_map.emplace_back(bands[i].color, std::vector<double>{code[i]});
  find_collisions(r);
  r.interpretability_note =
      "colors coded from 0 along the spectrum; read as ordinal, although wavelength itself is a ratio quantity";
  return r;
}

EncodingResult encode(const Dataset& ds, std::size_t attr, std::string_view encoder, const EncoderParams& p) {
  if (encoder == "one_hot") return one_hot(ds, attr);
  if (encoder == "label") return label_encode(ds, attr);
  if (encoder == "ordinal") return ordinal_encode(ds, attr, p.order);
  if (encoder == "frequency") return frequency_encode(ds, attr);
  if (encoder == "mean_target") return mean_target_encode(ds, attr);
  if (encoder == "prob_ratio") return probability_ratio_encode(ds, attr, p.smoothing);
  if (encoder == "james_stein") return james_stein_encode(ds, attr, p.shrink);
  if (encoder == "hash") return hash_encode(ds, attr, p.dim, p.seed);
  if (encoder == "wavelength") return wavelength_color_encode(ds, attr, p.palette ? *p.palette : default_palette());
  throw Error(ErrorCode::InvalidArgument, "unknown encoder '" + std::string(encoder) + "'");
}

std::vector<EncodingResult> encode_many(const Dataset& ds, std::span<const std::size_t> attrs,
                                        std::string_view encoder, const EncoderParams& params) {
  std::vector<EncodingResult> out(attrs.size());
  std::vector<std::exception_ptr> errors(attrs.size());
  const auto n = static_cast<std::int64_t>(attrs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = encode(ds, attrs[i], encoder, params);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

} // namespace hetviz
