#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evir {

enum class ErrorCode {
  DecodeError,
  UnsupportedFormat,
  BadDimensions,
  ImageTooSmall,
  ModelMismatch,
  MetricMismatch,
  NegativeDistance,
  NotEnoughSamples,
  DuplicateFrame,
  VocabularyMissing,
  EmptyIndex,
  IoError,
  FormatVersionMismatch,
  ChecksumMismatch,
  Malformed,
  RankExceedsN,
  EmptyList,
  ModelSetMismatch,
  SourceMissing,
  DecoderFailed,
  QueryMissingFromGroundTruth,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::MetricMismatch: return "MetricMismatch";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::NotEnoughSamples: return "NotEnoughSamples";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::VocabularyMissing: return "VocabularyMissing";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::RankExceedsN: return "RankExceedsN";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::ModelSetMismatch: return "ModelSetMismatch";
    case ErrorCode::SourceMissing: return "SourceMissing";
    case ErrorCode::DecoderFailed: return "DecoderFailed";
    case ErrorCode::QueryMissingFromGroundTruth: return "QueryMissingFromGroundTruth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace evir
