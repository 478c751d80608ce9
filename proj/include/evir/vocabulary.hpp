#pragma once

// Visual vocabulary: k-means over local CEDD vectors, k-means++ seeding,
// Lloyd iterations to an assignment fixpoint.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evir/error.hpp"
#include "evir/local_features.hpp"

namespace evir {

/// Dense row-major sample matrix.
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<float> data;

  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t d) : dim(d) {}

  [[nodiscard]] std::size_t rows() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  [[nodiscard]] std::span<const float> row(std::size_t i) const noexcept { return {data.data() + i * dim, dim}; }
  void append(std::span<const float> values) { data.insert(data.end(), values.begin(), values.end()); }
};

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::size_t k, std::size_t dim, std::vector<float> centroids, std::uint64_t seed, int iterations_run)
      : k_(k), dim_(dim), centroids_(std::move(centroids)), seed_(seed), iterations_run_(iterations_run) {
    if (centroids_.size() != k_ * dim_) fail(ErrorCode::Malformed, "centroid buffer does not match k x dim");
  }

  [[nodiscard]] bool empty() const noexcept { return k_ == 0; }
  [[nodiscard]] std::size_t size() const noexcept { return k_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] int iterations_run() const noexcept { return iterations_run_; }
  [[nodiscard]] std::span<const float> centroids() const noexcept { return centroids_; }
  [[nodiscard]] std::span<const float> centroid(std::size_t i) const noexcept {
    return {centroids_.data() + i * dim_, dim_};
  }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::size_t k_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> centroids_;
  std::uint64_t seed_ = 0;
  int iterations_run_ = 0;
};

struct KMeansTrace {
  /// Within-cluster sum of squares of each iteration's assignment against
  /// that iteration's centroids.
  std::vector<double> wcss;
};

namespace kmeans {

/// Uniform double in [0, 1) from the raw generator output, independent of the
/// standard library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename C>
double squared_l2(std::span<const float> x, std::span<const C> c) noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = static_cast<double>(x[j]) - static_cast<double>(c[j]);
    sum += d * d;
  }
  return sum;
}

/// Nearest centroid by squared L2, ties to the lowest index. Summation stops
/// early once a candidate exceeds the best distance seen so far; the partial
/// sums only grow, so the result equals the exhaustive search.
template <typename C>
std::size_t nearest(std::span<const float> x, std::span<const C> centroids, std::size_t dim, double* best_out = nullptr) noexcept {
  const std::size_t k = centroids.size() / dim;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const C* row = centroids.data() + c * dim;
    double sum = 0.0;
    std::size_t j = 0;
    for (; j < dim; j += 16) {
      const std::size_t end = std::min(dim, j + 16);
      for (std::size_t t = j; t < end; ++t) {
        const double d = static_cast<double>(x[t]) - static_cast<double>(row[t]);
        sum += d * d;
      }
      if (sum > best_d) break;
    }
    if (sum < best_d) {
      best_d = sum;
      best = c;
    }
  }
  if (best_out != nullptr) *best_out = best_d;
  return best;
}

}  // namespace kmeans

/// Trains a k-word vocabulary. Deterministic per (samples, k, seed, max_iter).
inline Vocabulary train_vocabulary(const FeatureMatrix& samples, std::size_t k, std::uint64_t seed, int max_iter,
                                   KMeansTrace* trace = nullptr) {
  const std::size_t n = samples.rows();
  const std::size_t dim = samples.dim;
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be >= 1");
  if (n < k) fail(ErrorCode::NotEnoughSamples, std::to_string(n) + " samples for " + std::to_string(k) + " words");

  std::mt19937_64 rng(seed);
  std::vector<double> centroids(k * dim);
  auto set_centroid = [&](std::size_t c, std::span<const float> x) {
    std::copy(x.begin(), x.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
  };

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(kmeans::unit_uniform(rng) * static_cast<double>(n));
  set_centroid(0, samples.row(std::min(first, n - 1)));
  for (std::size_t c = 1; c < k; ++c) {
    const std::span<const double> prev(centroids.data() + (c - 1) * dim, dim);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], kmeans::squared_l2(samples.row(i), prev));
      total += d2[i];
    }
    if (total <= 0.0) {
      fail(ErrorCode::NotEnoughSamples, "only " + std::to_string(c) + " distinct samples for " + std::to_string(k) + " words");
    }
    const double target = kmeans::unit_uniform(rng) * total;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    set_centroid(c, samples.row(pick));
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> previous;
  std::vector<double> dist(n, 0.0);
  int iterations = 0;
  for (int it = 0; it < max_iter; ++it) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = kmeans::nearest<double>(samples.row(i), centroids, dim, &dist[i]);
      wcss += dist[i];
    }
    if (trace != nullptr) trace->wcss.push_back(wcss);
    if (assign == previous) break;

    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = samples.row(i);
      double* s = sums.data() + assign[i] * dim;
      for (std::size_t j = 0; j < dim; ++j) s[j] += x[j];
      ++counts[assign[i]];
    }

    // Empty clusters take the farthest member of the currently largest cluster.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      const auto largest = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::vector<double> mean(dim);
      for (std::size_t j = 0; j < dim; ++j) mean[j] = sums[largest * dim + j] / static_cast<double>(counts[largest]);
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] != largest) continue;
        const double d = kmeans::squared_l2<double>(samples.row(i), mean);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const auto x = samples.row(far);
      for (std::size_t j = 0; j < dim; ++j) {
        sums[largest * dim + j] -= x[j];
        sums[c * dim + j] = x[j];
      }
      --counts[largest];
      counts[c] = 1;
      assign[far] = c;
    }
    previous = assign;

    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) centroids[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);
    }
    iterations = it + 1;
  }

  std::vector<float> out(centroids.size());
  std::transform(centroids.begin(), centroids.end(), out.begin(), [](double v) { return static_cast<float>(v); });
  return Vocabulary(k, dim, std::move(out), seed, iterations);
}

inline Vocabulary train_vocabulary(std::span<const LocalDescriptor> samples, std::size_t k, std::uint64_t seed,
                                   int max_iter, KMeansTrace* trace = nullptr) {
  FeatureMatrix m(dimension(Model::Cedd));
  m.data.reserve(samples.size() * m.dim);
  for (const LocalDescriptor& s : samples) m.append(s.values.values());
  return train_vocabulary(m, k, seed, max_iter, trace);
}

}  // namespace evir
