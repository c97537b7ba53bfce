// Copyright 2026 The mcqa-space Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCQA_ERROR_HPP_
#define MCQA_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcqa {

// Every failure the library reports carries one of these codes so callers can
// branch on the kind of failure without parsing messages.
enum class ErrorCode {
  // Vocabulary / tokenizer.
  kFileUnreadable,
  kMalformedLine,
  kDuplicateSurface,
  kDuplicateTokenId,
  kNonContiguousIds,
  kEmbeddingRowMismatch,
  kEncoding,
  kMissingEmbeddings,
  kZeroNormEmbedding,
  kInvalidTokenId,
  // Prompt rendering.
  kTooManyOptions,
  kExemplarOverlap,
  kIncompatibleVariation,
  kInvalidPermutation,
  kPermutationCountExceeded,
  kTemplate,
  // Scoring backend.
  kTransport,
  kMalformedResponse,
  kCandidateRejected,
  kProtocolViolation,
  // Metrics and statistics.
  kNonFinite,
  kEmptyInput,
  // Harness.
  kSchemaViolation,
  kDuplicateExampleId,
  kGoldOutOfRange,
  kPairingMismatch,
  kMissingStrategy,
  kScoringFailed,
  kCacheConflict,
  kConfig,
  // Generic precondition violation.
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  // Byte offset (encoding errors) or 1-based line number (file parsing).
  std::optional<std::size_t> position() const noexcept { return position_; }
  Error& with_position(std::size_t position) {
    position_ = position;
    return *this;
  }

  // Example ids involved in the failure (scoring errors, run aborts).
  const std::vector<std::string>& example_ids() const noexcept {
    return example_ids_;
  }
  Error& with_example_ids(std::vector<std::string> ids) {
    example_ids_ = std::move(ids);
    return *this;
  }

  // Transport failures are the only retryable kind.
  bool retryable() const noexcept { return code_ == ErrorCode::kTransport; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
  std::vector<std::string> example_ids_;
};

}  // namespace mcqa

#endif  // MCQA_ERROR_HPP_
