#pragma once

// Bag of visual words encoding against a trained vocabulary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evir/descriptor.hpp"
#include "evir/local_features.hpp"
#include "evir/vocabulary.hpp"

namespace evir {

struct BovwHistogram {
  std::vector<std::uint32_t> term_counts;  // before normalization
  std::vector<float> weights;              // L2-normalized counts, all zero when raw_count == 0
  std::size_t raw_count = 0;

  [[nodiscard]] Descriptor descriptor() const { return Descriptor(Model::Bovw, weights); }
};

/// Hard-assigns each descriptor to its nearest word (ties to the lowest index).
inline std::size_t assign_word(std::span<const float> values, const Vocabulary& vocab) {
  return kmeans::nearest<float>(values, vocab.centroids(), vocab.dim());
}

inline BovwHistogram encode_bovw(std::span<const LocalDescriptor> descs, const Vocabulary& vocab) {
  if (vocab.empty()) fail(ErrorCode::VocabularyMissing, "cannot encode without a trained vocabulary");
  BovwHistogram h;
  h.term_counts.assign(vocab.size(), 0);
  for (const LocalDescriptor& d : descs) ++h.term_counts[assign_word(d.values.values(), vocab)];
  h.raw_count = descs.size();

  h.weights.assign(vocab.size(), 0.0f);
  if (h.raw_count == 0) return h;
  double norm = 0.0;
  for (std::uint32_t c : h.term_counts) norm += static_cast<double>(c) * c;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < h.term_counts.size(); ++i) h.weights[i] = static_cast<float>(h.term_counts[i] / norm);
  return h;
}

/// Cosine similarity clamped to [0, 1]; 0 when either side is all-zero.
template <typename A, typename B>
double cosine_similarity(std::span<const A> a, std::span<const B> b) noexcept {
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
  if (aa <= 0.0 || bb <= 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(aa * bb), 0.0, 1.0);
}

inline double bovw_similarity(const BovwHistogram& a, const BovwHistogram& b) {
  if (a.weights.size() != b.weights.size()) fail(ErrorCode::ModelMismatch, "histograms from different vocabularies");
  return cosine_similarity<float, float>(a.weights, b.weights);
}

}  // namespace evir
