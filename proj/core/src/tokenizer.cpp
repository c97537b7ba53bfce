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

#include "mcqa/tokenizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "mcqa/error.hpp"
#include "text_util.hpp"

namespace mcqa {

namespace {

constexpr std::string_view kMarkerDirective = "#!space_marker\t";

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot open embeddings file: " + path.string());
  }
  EmbeddingMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (std::string_view field : detail::split_whitespace(line)) {
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedLine,
                    path.string() + ":" + std::to_string(line_no) +
                        ": not a finite real: '" + std::string(field) + "'")
            .with_position(line_no);
      }
      row.push_back(v);
    }
    if (m.rows == 0) {
      m.dim = row.size();
    } else if (row.size() != m.dim) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(line_no) +
                      ": embedding row has " + std::to_string(row.size()) +
                      " values, expected " + std::to_string(m.dim))
          .with_position(line_no);
    }
    m.values.insert(m.values.end(), row.begin(), row.end());
    ++m.rows;
  }
  return m;
}

}  // namespace

std::string_view to_string(TokenizationStrategy strategy) {
  switch (strategy) {
    case TokenizationStrategy::kLetterOnly: return "letter";
    case TokenizationStrategy::kSpaceLetter: return "space-letter";
  }
  return "?";
}

TokenizationStrategy parse_strategy(std::string_view text) {
  if (text == "letter" || text == "LetterOnly" || text == "X") {
    return TokenizationStrategy::kLetterOnly;
  }
  if (text == "space-letter" || text == "SpaceLetter" || text == " X") {
    return TokenizationStrategy::kSpaceLetter;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown tokenization strategy: '" + std::string(text) +
                  "' (expected letter|space-letter)");
}

TokenizerModel::TokenizerModel(std::vector<std::string> surfaces,
                               std::string space_marker,
                               std::optional<EmbeddingMatrix> embeddings)
    : surfaces_(std::move(surfaces)),
      space_marker_(std::move(space_marker)),
      embeddings_(std::move(embeddings)) {
  if (space_marker_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "space marker must be non-empty");
  }
  ids_.reserve(surfaces_.size());
  for (std::size_t i = 0; i < surfaces_.size(); ++i) {
    const std::string& s = surfaces_[i];
    if (s.empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  "empty surface for token id " + std::to_string(i));
    }
    auto [it, inserted] = ids_.emplace(s, static_cast<TokenId>(i));
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateSurface,
                  "duplicate surface '" + s + "' (ids " +
                      std::to_string(it->second) + " and " +
                      std::to_string(i) + ")");
    }
    max_surface_bytes_ = std::max(max_surface_bytes_, s.size());
  }
  if (embeddings_ && embeddings_->rows != surfaces_.size()) {
    throw Error(ErrorCode::kEmbeddingRowMismatch,
                "embedding matrix has " + std::to_string(embeddings_->rows) +
                    " rows for a vocabulary of " +
                    std::to_string(surfaces_.size()) + " tokens");
  }
}

std::optional<TokenId> TokenizerModel::find(std::string_view surface) const {
  auto it = ids_.find(std::string(surface));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& TokenizerModel::surface(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) {
    throw Error(ErrorCode::kInvalidTokenId,
                "token id out of range: " + std::to_string(id));
  }
  return surfaces_[static_cast<std::size_t>(id)];
}

std::string TokenizerModel::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += surface(id);
  return out;
}

std::string TokenizerModel::to_surface_text(std::string_view text) const {
  return detail::replace_all(text, " ", space_marker_);
}

std::string TokenizerModel::to_plain_text(std::string_view surface_text) const {
  return detail::replace_all(surface_text, space_marker_, " ");
}

TokenizerModel load_vocab(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& embeddings_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot open vocabulary file: " + path.string());
  }
  std::string marker(TokenizerModel::kDefaultSpaceMarker);
  std::map<TokenId, std::string> by_id;
  std::unordered_map<std::string, std::size_t> seen_surface;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with(kMarkerDirective)) {
      marker = line.substr(kMarkerDirective.size());
      if (marker.empty()) {
        throw Error(ErrorCode::kMalformedLine,
                    path.string() + ":1: empty space marker")
            .with_position(1);
      }
      continue;
    }
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected 'surface<TAB>id'")
          .with_position(line_no);
    }
    std::string surface = line.substr(0, tab);
    std::string_view id_text = std::string_view(line).substr(tab + 1);
    TokenId id = -1;
    auto [ptr, ec] =
        std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec != std::errc() || ptr != id_text.data() + id_text.size() || id < 0) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(line_no) +
                      ": invalid token id '" + std::string(id_text) + "'")
          .with_position(line_no);
    }
    if (auto it = seen_surface.find(surface); it != seen_surface.end()) {
      throw Error(ErrorCode::kDuplicateSurface,
                  path.string() + ":" + std::to_string(line_no) +
                      ": duplicate surface '" + surface + "' (first on line " +
                      std::to_string(it->second) + ")")
          .with_position(line_no);
    }
    if (by_id.contains(id)) {
      throw Error(ErrorCode::kDuplicateTokenId,
                  path.string() + ":" + std::to_string(line_no) +
                      ": duplicate token id " + std::to_string(id))
          .with_position(line_no);
    }
    seen_surface.emplace(surface, line_no);
    by_id.emplace(id, std::move(surface));
  }

  std::vector<std::string> surfaces;
  surfaces.reserve(by_id.size());
  TokenId expected = 0;
  for (auto& [id, surface] : by_id) {
    if (id != expected) {
      throw Error(ErrorCode::kNonContiguousIds,
                  path.string() + ": token ids are not contiguous from 0 "
                                  "(missing id " +
                      std::to_string(expected) + ")");
    }
    surfaces.push_back(std::move(surface));
    ++expected;
  }

  std::optional<EmbeddingMatrix> embeddings;
  if (embeddings_path) embeddings = load_embeddings(*embeddings_path);
  return TokenizerModel(std::move(surfaces), std::move(marker),
                        std::move(embeddings));
}

std::vector<TokenId> encode_longest_match(const TokenizerModel& model,
                                          std::string_view text) {
  std::vector<TokenId> ids;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t longest =
        std::min(model.max_surface_bytes(), text.size() - pos);
    std::optional<TokenId> match;
    std::size_t match_len = 0;
    for (std::size_t len = longest; len > 0; --len) {
      if (auto id = model.find(text.substr(pos, len))) {
        match = id;
        match_len = len;
        break;
      }
    }
    if (!match) {
      throw Error(ErrorCode::kEncoding,
                  "no vocabulary surface covers byte offset " +
                      std::to_string(pos) + " of '" + std::string(text) + "'")
          .with_position(pos);
    }
    ids.push_back(*match);
    pos += match_len;
  }
  return ids;
}

LabelTokenSet resolve_label_tokens(const TokenizerModel& model,
                                   std::span<const std::string> labels,
                                   TokenizationStrategy strategy) {
  if (labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "label list is empty");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate label '" + labels[i] + "'");
      }
    }
  }
  LabelTokenSet out;
  out.reserve(labels.size());
  for (const std::string& label : labels) {
    const std::string scored = strategy == TokenizationStrategy::kSpaceLetter
                                   ? model.space_marker() + label
                                   : label;
    LabelTokens entry;
    entry.label = label;
    entry.tokens = encode_longest_match(model, scored);
    entry.single_token = entry.tokens.size() == 1;
    out.push_back(std::move(entry));
  }
  return out;
}

SimilarityMatrix embedding_similarity(const TokenizerModel& model,
                                      std::span<const TokenId> ids) {
  if (!model.has_embeddings()) {
    throw Error(ErrorCode::kMissingEmbeddings,
                "tokenizer model has no embedding matrix");
  }
  const EmbeddingMatrix& emb = *model.embeddings();
  std::vector<double> norms;
  norms.reserve(ids.size());
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= emb.rows) {
      throw Error(ErrorCode::kInvalidTokenId,
                  "token id out of range: " + std::to_string(id));
    }
    double sq = 0.0;
    for (double v : emb.row(static_cast<std::size_t>(id))) sq += v * v;
    if (sq == 0.0) {
      throw Error(ErrorCode::kZeroNormEmbedding,
                  "embedding row for token id " + std::to_string(id) +
                      " has zero norm");
    }
    norms.push_back(std::sqrt(sq));
  }

  const std::size_t n = ids.size();
  SimilarityMatrix sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    sim[i][i] = 1.0;
    auto a = emb.row(static_cast<std::size_t>(ids[i]));
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 1.0;
      if (ids[i] != ids[j]) {
        auto b = emb.row(static_cast<std::size_t>(ids[j]));
        double dot = 0.0;
        for (std::size_t k = 0; k < emb.dim; ++k) dot += a[k] * b[k];
        value = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      }
      sim[i][j] = value;
      sim[j][i] = value;
    }
  }
  return sim;
}

}  // namespace mcqa
