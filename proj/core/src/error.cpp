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

#include "mcqa/error.hpp"

namespace mcqa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileUnreadable: return "file_unreadable";
    case ErrorCode::kMalformedLine: return "malformed_line";
    case ErrorCode::kDuplicateSurface: return "duplicate_surface";
    case ErrorCode::kDuplicateTokenId: return "duplicate_token_id";
    case ErrorCode::kNonContiguousIds: return "non_contiguous_ids";
    case ErrorCode::kEmbeddingRowMismatch: return "embedding_row_mismatch";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kMissingEmbeddings: return "missing_embeddings";
    case ErrorCode::kZeroNormEmbedding: return "zero_norm_embedding";
    case ErrorCode::kInvalidTokenId: return "invalid_token_id";
    case ErrorCode::kTooManyOptions: return "too_many_options";
    case ErrorCode::kExemplarOverlap: return "exemplar_overlap";
    case ErrorCode::kIncompatibleVariation: return "incompatible_variation";
    case ErrorCode::kInvalidPermutation: return "invalid_permutation";
    case ErrorCode::kPermutationCountExceeded: return "permutation_count_exceeded";
    case ErrorCode::kTemplate: return "template";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kCandidateRejected: return "candidate_rejected";
    case ErrorCode::kProtocolViolation: return "protocol_violation";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kSchemaViolation: return "schema_violation";
    case ErrorCode::kDuplicateExampleId: return "duplicate_example_id";
    case ErrorCode::kGoldOutOfRange: return "gold_out_of_range";
    case ErrorCode::kPairingMismatch: return "pairing_mismatch";
    case ErrorCode::kMissingStrategy: return "missing_strategy";
    case ErrorCode::kScoringFailed: return "scoring_failed";
    case ErrorCode::kCacheConflict: return "cache_conflict";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace mcqa
