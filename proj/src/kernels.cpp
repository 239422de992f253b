#include "hetviz/kernels.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace hetviz::kernels {

namespace serial {

Contingency contingency(std::span<const std::int32_t> values, std::size_t num_values,
                        std::span<const std::int32_t> classes, std::size_t num_classes) {
  Contingency out{num_values, num_classes, std::vector<std::uint64_t>(num_values * num_classes)};
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] < 0 || classes[r] < 0) continue;
    ++out.counts[std::size_t(values[r]) * num_classes + std::size_t(classes[r])];
  }
  return out;
}

std::vector<EdgeCount> edge_counts(std::span<const std::int32_t> left,
                                   std::span<const std::int32_t> right,
                                   std::span<const std::int32_t> classes) {
  std::map<std::tuple<std::int32_t, std::int32_t, std::int32_t>, std::uint64_t> counts;
  for (std::size_t r = 0; r < left.size(); ++r) {
    if (left[r] < 0 || right[r] < 0 || classes[r] < 0) continue;
    ++counts[{left[r], right[r], classes[r]}];
  }
  std::vector<EdgeCount> out;
  out.reserve(counts.size());
  for (const auto& [key, n] : counts)
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), n});
  return out;
}

std::vector<std::uint64_t> masked_class_counts(std::span<const std::uint8_t> mask,
                                               std::span<const std::int32_t> classes,
                                               std::size_t num_classes) {
  std::vector<std::uint64_t> out(num_classes, 0);
  for (std::size_t r = 0; r < mask.size(); ++r)
    if (mask[r] && classes[r] >= 0) ++out[std::size_t(classes[r])];
  return out;
}

} // namespace serial

namespace parallel {

namespace {

// Per-thread dense tables are used while they stay small; beyond that the
// edge kernel switches to sorting packed keys.
constexpr std::size_t kDenseLimit = std::size_t(1) << 20;

std::int32_t max_code(std::span<const std::int32_t> codes) {
  std::int32_t m = -1;
  const auto n = static_cast<std::int64_t>(codes.size());
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::int64_t r = 0; r < n; ++r) m = std::max(m, codes[r]);
  return m;
}

} // namespace

Contingency contingency(std::span<const std::int32_t> values, std::size_t num_values,
                        std::span<const std::int32_t> classes, std::size_t num_classes) {
  const std::size_t cells = num_values * num_classes;
  Contingency out{num_values, num_classes, std::vector<std::uint64_t>(cells, 0)};
  const auto n = static_cast<std::int64_t>(values.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t r = 0; r < n; ++r) {
      if (values[r] < 0 || classes[r] < 0) continue;
      ++local[std::size_t(values[r]) * num_classes + std::size_t(classes[r])];
    }
#pragma omp critical(hetviz_contingency_merge)
    for (std::size_t i = 0; i < cells; ++i) out.counts[i] += local[i];
  }
  return out;
}

std::vector<EdgeCount> edge_counts(std::span<const std::int32_t> left,
                                   std::span<const std::int32_t> right,
                                   std::span<const std::int32_t> classes) {
  const auto n = static_cast<std::int64_t>(left.size());
  const std::size_t nl = std::size_t(max_code(left) + 1);
  const std::size_t nr = std::size_t(max_code(right) + 1);
  const std::size_t nc = std::size_t(max_code(classes) + 1);
  std::vector<EdgeCount> out;
  if (nl == 0 || nr == 0 || nc == 0) return out;

  const std::size_t cells = nl * nr * nc;
  if (cells <= kDenseLimit) {
    std::vector<std::uint64_t> table(cells, 0);
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static) nowait
      for (std::int64_t r = 0; r < n; ++r) {
        if (left[r] < 0 || right[r] < 0 || classes[r] < 0) continue;
        ++local[(std::size_t(left[r]) * nr + std::size_t(right[r])) * nc + std::size_t(classes[r])];
      }
#pragma omp critical(hetviz_edge_merge)
      for (std::size_t i = 0; i < cells; ++i) table[i] += local[i];
    }
    for (std::size_t i = 0; i < cells; ++i) {
      if (!table[i]) continue;
      out.push_back({std::int32_t(i / (nr * nc)), std::int32_t((i / nc) % nr), std::int32_t(i % nc),
                     table[i]});
    }
    return out;
  }

  std::vector<std::uint64_t> keys(left.size(), ~std::uint64_t(0));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    if (left[r] < 0 || right[r] < 0 || classes[r] < 0) continue;
    keys[r] = (std::uint64_t(left[r]) * nr + std::uint64_t(right[r])) * nc + std::uint64_t(classes[r]);
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size();) {
    if (keys[i] == ~std::uint64_t(0)) break;
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const auto k = keys[i];
    out.push_back({std::int32_t(k / (nr * nc)), std::int32_t((k / nc) % nr), std::int32_t(k % nc),
                   std::uint64_t(j - i)});
    i = j;
  }
  return out;
}

std::vector<std::uint64_t> masked_class_counts(std::span<const std::uint8_t> mask,
                                               std::span<const std::int32_t> classes,
                                               std::size_t num_classes) {
  std::vector<std::uint64_t> out(num_classes, 0);
  const auto n = static_cast<std::int64_t>(mask.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(num_classes, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t r = 0; r < n; ++r)
      if (mask[r] && classes[r] >= 0) ++local[std::size_t(classes[r])];
#pragma omp critical(hetviz_class_merge)
    for (std::size_t c = 0; c < num_classes; ++c) out[c] += local[c];
  }
  return out;
}

} // namespace parallel

} // namespace hetviz::kernels
