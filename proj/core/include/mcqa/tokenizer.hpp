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

#ifndef MCQA_TOKENIZER_HPP_
#define MCQA_TOKENIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mcqa {

using TokenId = std::int32_t;

// Where the space preceding the answer label is tokenized.
//
//   kLetterOnly:  prompt ends with "Answer: " and the scored token is "X".
//   kSpaceLetter: prompt ends with "Answer:" and the scored token is " X".
enum class TokenizationStrategy { kLetterOnly, kSpaceLetter };

std::string_view to_string(TokenizationStrategy strategy);
// Accepts "letter" / "space-letter" (CLI spelling) as well as the enum names.
TokenizationStrategy parse_strategy(std::string_view text);

// Dense row-major embedding matrix, one row per token id.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
};

// Immutable vocabulary exported from a model tokenizer.
//
// Surfaces are stored exactly as in the vocabulary file, i.e. a leading space
// is spelled with `space_marker()` (a literal " " by default, but e.g. "Ġ" or
// "␣" for other tokenizer families).
class TokenizerModel {
 public:
  static constexpr std::string_view kDefaultSpaceMarker = " ";

  // Builds a model from an id-ordered surface list. Validates the same
  // invariants as `load_vocab`.
  TokenizerModel(std::vector<std::string> surfaces,
                 std::string space_marker = std::string(kDefaultSpaceMarker),
                 std::optional<EmbeddingMatrix> embeddings = std::nullopt);

  std::size_t size() const noexcept { return surfaces_.size(); }
  const std::string& space_marker() const noexcept { return space_marker_; }
  bool has_embeddings() const noexcept { return embeddings_.has_value(); }
  const std::optional<EmbeddingMatrix>& embeddings() const noexcept {
    return embeddings_;
  }

  std::optional<TokenId> find(std::string_view surface) const;
  const std::string& surface(TokenId id) const;
  std::size_t max_surface_bytes() const noexcept { return max_surface_bytes_; }

  // Concatenation of the surfaces of `ids`.
  std::string decode(std::span<const TokenId> ids) const;

  // Converts between plain text (literal spaces) and surface spelling.
  std::string to_surface_text(std::string_view text) const;
  std::string to_plain_text(std::string_view surface_text) const;

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> ids_;
  std::string space_marker_;
  std::optional<EmbeddingMatrix> embeddings_;
  std::size_t max_surface_bytes_ = 0;
};

// Reads a `surface<TAB>id` vocabulary file. An optional first line
// `#!space_marker<TAB><marker>` sets the space marker. When
// `embeddings_path` is given, each of its lines holds one embedding row
// (space-separated reals) in token-id order.
TokenizerModel load_vocab(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& embeddings_path = std::nullopt);

// Greedy left-to-right longest-match encoding of `text` (surface spelling).
// Throws Error{kEncoding} with the byte offset of the first uncoverable
// position.
std::vector<TokenId> encode_longest_match(const TokenizerModel& model,
                                          std::string_view text);

struct LabelTokens {
  std::string label;           // label surface as passed in, e.g. "A"
  std::vector<TokenId> tokens;  // resolved ids for the scored surface
  bool single_token = false;
};

using LabelTokenSet = std::vector<LabelTokens>;

// Resolves the token sequence scored for each label under `strategy`:
// kLetterOnly encodes the label, kSpaceLetter encodes space_marker + label.
LabelTokenSet resolve_label_tokens(const TokenizerModel& model,
                                   std::span<const std::string> labels,
                                   TokenizationStrategy strategy);

// Square matrix of cosine similarities between the embedding rows of `ids`.
using SimilarityMatrix = std::vector<std::vector<double>>;
SimilarityMatrix embedding_similarity(const TokenizerModel& model,
                                      std::span<const TokenId> ids);

}  // namespace mcqa

#endif  // MCQA_TOKENIZER_HPP_
