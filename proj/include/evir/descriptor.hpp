#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evir/error.hpp"

namespace evir {

/// Retrieval model tag. The numeric values are part of the index file format.
enum class Model : std::uint8_t { Cedd = 0, Acc = 1, Phog = 2, Bovw = 3 };

inline constexpr std::array<Model, 4> kAllModels = {Model::Cedd, Model::Acc, Model::Phog, Model::Bovw};
inline constexpr std::array<Model, 3> kGlobalModels = {Model::Cedd, Model::Acc, Model::Phog};

constexpr std::size_t dimension(Model model) noexcept {
  switch (model) {
    case Model::Cedd: return 144;
    case Model::Acc: return 256;
    case Model::Phog: return 630;
    case Model::Bovw: return 512;
  }
  return 0;
}

constexpr std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::Cedd: return "CEDD";
    case Model::Acc: return "ACC";
    case Model::Phog: return "PHOG";
    case Model::Bovw: return "BOVW";
  }
  return "?";
}

enum class DistanceMetric : std::uint8_t { Tanimoto = 0, L1 = 1 };

constexpr std::string_view to_string(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::Tanimoto ? "Tanimoto" : "L1";
}

constexpr bool metric_allowed(Model model, DistanceMetric metric) noexcept {
  switch (model) {
    case Model::Cedd: return metric == DistanceMetric::Tanimoto;
    case Model::Acc:
    case Model::Phog: return metric == DistanceMetric::L1;
    case Model::Bovw: return true;
  }
  return false;
}

constexpr DistanceMetric default_metric(Model model) noexcept {
  return model == Model::Acc || model == Model::Phog ? DistanceMetric::L1 : DistanceMetric::Tanimoto;
}

/// Fixed-length feature vector tagged with its retrieval model.
class Descriptor {
 public:
  Descriptor(Model model, std::vector<float> values) : model_(model), values_(std::move(values)) {
    if (values_.size() != dimension(model_)) {
      fail(ErrorCode::InvalidArgument, std::string(to_string(model_)) + " descriptor needs " +
                                           std::to_string(dimension(model_)) + " values, got " +
                                           std::to_string(values_.size()));
    }
  }

  explicit Descriptor(Model model) : Descriptor(model, std::vector<float>(dimension(model), 0.0f)) {}

  [[nodiscard]] Model model() const noexcept { return model_; }
  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] float operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;

 private:
  Model model_;
  std::vector<float> values_;
};

namespace metric {

template <typename A, typename B>
double tanimoto(std::span<const A> a, std::span<const B> b) noexcept {
  double dot = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    aa += x * x;
    bb += y * y;
  }
  const double denom = aa + bb - dot;
  if (denom <= 0.0) return 0.0;  // both all-zero
  return 1.0 - dot / denom;
}

template <typename A, typename B>
double l1(std::span<const A> a, std::span<const B> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return sum;
}

template <typename A, typename B>
double distance(DistanceMetric m, std::span<const A> a, std::span<const B> b) noexcept {
  return m == DistanceMetric::Tanimoto ? tanimoto(a, b) : l1(a, b);
}

}  // namespace metric

inline double descriptor_distance(const Descriptor& a, const Descriptor& b, DistanceMetric m) {
  if (a.model() != b.model()) {
    fail(ErrorCode::ModelMismatch,
         std::string(to_string(a.model())) + " vs " + std::string(to_string(b.model())));
  }
  if (!metric_allowed(a.model(), m)) {
    fail(ErrorCode::MetricMismatch,
         std::string(to_string(m)) + " is not defined for " + std::string(to_string(a.model())));
  }
  return metric::distance(m, a.values(), b.values());
}

/// Maps a distance onto a higher-is-better score in (0, 1].
inline double similarity_from_distance(double d) {
  if (!(d >= 0.0)) fail(ErrorCode::NegativeDistance, "distance " + std::to_string(d));
  return 1.0 / (1.0 + d);
}

}  // namespace evir
