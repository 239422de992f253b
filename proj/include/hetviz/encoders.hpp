#pragma once

// Numeric codings of discrete attributes. Every encoder returns the generated
// columns together with its value-to-code map, the value sets that collide
// under that map, and a short note on how the codes may be interpreted.
//
// Missing values are coded as their own value "?" except by the wavelength
// encoder, which leaves them NaN.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetviz/core.hpp"

namespace hetviz {

struct EncodedColumn {
  std::string name;
  MeasurementType mtype;
  std::vector<double> values; // one per row
  bool operator==(const EncodedColumn&) const = default;
};

struct EncodingResult {
  std::string attribute;
  std::string encoder;
  std::vector<EncodedColumn> columns;
  /// value -> code vector (one entry per generated column), in value order
  std::vector<std::pair<std::string, std::vector<double>>> code_map;
  /// Sets of values sharing one code vector. Empty iff code_map is injective.
  std::vector<std::vector<std::string>> lossy_collisions;
  std::string interpretability_note;

  const std::vector<double>* code_of(std::string_view value) const;
  bool operator==(const EncodingResult&) const = default;
};

/// Value/target co-occurrence counts for the statistics-based encoders.
struct TargetStats {
  std::vector<std::string> values;  // first-appearance order, "?" last
  std::vector<std::string> classes; // lexical order
  std::vector<std::uint64_t> totals;
  std::vector<std::vector<std::uint64_t>> per_class; // [value][class]
  std::uint64_t rows = 0;
  /// Binary targets use the lexically last class as class 1.
  std::size_t positive = 0;

  bool binary() const noexcept { return classes.size() <= 2; }
  /// Class indices that receive an output column: the positive class for
  /// binary targets, every class (one-vs-rest) otherwise.
  std::vector<std::size_t> coded_classes() const;
  /// n(value, cls) / n(value)
  double class_frequency(std::size_t value, std::size_t cls) const;
};

/// Throws InvalidArgument when the dataset has no target.
TargetStats target_stats(const Dataset& ds, std::size_t attr);

/// Binary vectors; every pair of distinct values is at Hamming distance 2.
EncodingResult one_hot(const Dataset& ds, std::size_t attr);
/// Codes 1..k in first-appearance order. Nominal attributes only.
EncodingResult label_encode(const Dataset& ds, std::size_t attr);
/// Codes 1..k along the declared order, or along `order` when given. Missing is 0.
EncodingResult ordinal_encode(const Dataset& ds, std::size_t attr,
                              const std::optional<std::vector<std::string>>& order = std::nullopt);
EncodingResult frequency_encode(const Dataset& ds, std::size_t attr);
EncodingResult mean_target_encode(const Dataset& ds, std::size_t attr);
/// (n1 + s) / (n0 + s); s = 0 with n0 = 0 is an error naming the value.
EncodingResult probability_ratio_encode(const Dataset& ds, std::size_t attr, double smoothing = 1.0);
/// lambda * mean_v + (1 - lambda) * global with lambda = n_v / (n_v + shrink).
EncodingResult james_stein_encode(const Dataset& ds, std::size_t attr, double shrink = 1.0);
/// Seeded signed feature hashing into `dim` buckets.
EncodingResult hash_encode(const Dataset& ds, std::size_t attr, std::size_t dim,
                           std::uint64_t seed = 0);

struct ColorBand {
  std::string color;
  double lo_nm = 0; // [lo, hi)
  double hi_nm = 0;
  bool operator==(const ColorBand&) const = default;
};

/// Visible spectrum, violet to red.
std::vector<ColorBand> default_palette();

/// Colors present in the data are coded 0, 1, ... by the position of their
/// band along the spectrum. Numeric attributes are read as wavelengths in nm.
EncodingResult wavelength_color_encode(const Dataset& ds, std::size_t attr,
                                       const std::vector<ColorBand>& palette = default_palette());

struct EncoderParams {
  double smoothing = 1.0;
  double shrink = 1.0;
  std::size_t dim = 16;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> order;
  std::optional<std::vector<ColorBand>> palette;
};

/// Dispatch on a stable encoder identifier (one_hot, label, ordinal, ...).
EncodingResult encode(const Dataset& ds, std::size_t attr, std::string_view encoder,
                      const EncoderParams& params = {});

/// Encodes several attributes concurrently; results follow `attrs`.
std::vector<EncodingResult> encode_many(const Dataset& ds, std::span<const std::size_t> attrs,
                                        std::string_view encoder, const EncoderParams& params = {});

} // namespace hetviz
