#pragma once

// Row-parallel counting kernels. Each kernel exists twice: a plain serial
// reference (kept for tests and the benchmark) and an OpenMP version used by
// the engine. Codes are dense indices; a negative code means "skip this row".

#include <cstdint>
#include <span>
#include <vector>

#include <omp.h>

namespace hetviz::kernels {

/// counts[value * num_classes + cls]
struct Contingency {
  std::size_t num_values = 0;
  std::size_t num_classes = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t value, std::size_t cls) const {
    return counts[value * num_classes + cls];
  }
  bool operator==(const Contingency&) const = default;
};

struct EdgeCount {
  std::int32_t left = 0;
  std::int32_t right = 0;
  std::int32_t cls = 0;
  std::uint64_t count = 0;
  bool operator==(const EdgeCount&) const = default;
};

namespace serial {

Contingency contingency(std::span<const std::int32_t> values, std::size_t num_values,
                        std::span<const std::int32_t> classes, std::size_t num_classes);

/// Sorted by (left, right, cls); zero counts omitted.
std::vector<EdgeCount> edge_counts(std::span<const std::int32_t> left,
                                   std::span<const std::int32_t> right,
                                   std::span<const std::int32_t> classes);

std::vector<std::uint64_t> masked_class_counts(std::span<const std::uint8_t> mask,
                                               std::span<const std::int32_t> classes,
                                               std::size_t num_classes);

template <class Pred>
std::vector<std::uint8_t> mask_rows(std::size_t n, Pred&& pred) {
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t r = 0; r < n; ++r) mask[r] = pred(r) ? 1 : 0;
  return mask;
}

} // namespace serial

namespace parallel {

Contingency contingency(std::span<const std::int32_t> values, std::size_t num_values,
                        std::span<const std::int32_t> classes, std::size_t num_classes);

std::vector<EdgeCount> edge_counts(std::span<const std::int32_t> left,
                                   std::span<const std::int32_t> right,
                                   std::span<const std::int32_t> classes);

std::vector<std::uint64_t> masked_class_counts(std::span<const std::uint8_t> mask,
                                               std::span<const std::int32_t> classes,
                                               std::size_t num_classes);

/// pred must be safe to call concurrently for distinct rows.
template <class Pred>
std::vector<std::uint8_t> mask_rows(std::size_t n, Pred&& pred) {
  std::vector<std::uint8_t> mask(n, 0);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < count; ++r) mask[r] = pred(static_cast<std::size_t>(r)) ? 1 : 0;
  return mask;
}

} // namespace parallel

} // namespace hetviz::kernels
