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

#include "mcqa/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "mcqa/error.hpp"
#include "text_util.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

Error schema_error(std::string_view origin, std::size_t line,
                   const std::string& what) {
  return Error(ErrorCode::kSchemaViolation, std::string(origin) + ":" +
                                                std::to_string(line) + ": " +
                                                what)
      .with_position(line);
}

std::string require_string(const json& obj, const char* field,
                           std::string_view origin, std::size_t line) {
  if (!obj.contains(field) || !obj.at(field).is_string()) {
    throw schema_error(origin, line,
                       std::string("field '") + field + "' must be a string");
  }
  return obj.at(field).get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           std::string_view origin,
                                           std::size_t line) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  if (!obj.at(field).is_string()) {
    throw schema_error(origin, line,
                       std::string("field '") + field + "' must be a string");
  }
  return obj.at(field).get<std::string>();
}

}  // namespace

std::vector<Question> parse_dataset(std::string_view jsonl,
                                    std::string_view origin) {
  std::vector<Question> out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw schema_error(origin, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
      throw schema_error(origin, line_no, "record must be a JSON object");
    }
    Question q;
    q.id = require_string(obj, "id", origin, line_no);
    q.stem = require_string(obj, "question", origin, line_no);
    if (!obj.contains("options") || !obj.at("options").is_array()) {
      throw schema_error(origin, line_no, "field 'options' must be an array");
    }
    for (const json& o : obj.at("options")) {
      if (!o.is_string() || o.get<std::string>().empty()) {
        throw schema_error(origin, line_no,
                           "options must be non-empty strings");
      }
      q.options.push_back(o.get<std::string>());
    }
    if (q.options.size() < 2) {
      throw schema_error(origin, line_no, "need at least two options");
    }
    if (!obj.contains("answer") || !obj.at("answer").is_number_integer()) {
      throw schema_error(origin, line_no, "field 'answer' must be an integer");
    }
    const auto answer = obj.at("answer").get<long long>();
    if (answer < 0 || static_cast<std::size_t>(answer) >= q.options.size()) {
      throw Error(ErrorCode::kGoldOutOfRange,
                  std::string(origin) + ":" + std::to_string(line_no) +
                      ": answer index " + std::to_string(answer) +
                      " out of range for " + std::to_string(q.options.size()) +
                      " options")
          .with_position(line_no);
    }
    q.gold_index = static_cast<std::size_t>(answer);
    q.subject = optional_string(obj, "subject", origin, line_no);
    q.language = optional_string(obj, "language", origin, line_no);

    auto [it, inserted] = first_line.emplace(q.id, line_no);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateExampleId,
                  std::string(origin) + ":" + std::to_string(line_no) +
                      ": duplicate id '" + q.id + "' (first on line " +
                      std::to_string(it->second) + ")")
          .with_position(line_no)
          .with_example_ids({q.id});
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot open dataset: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path.string());
}

std::string to_jsonl(const std::vector<Question>& questions) {
  std::string out;
  for (const auto& q : questions) {
    json obj = {{"id", q.id},
                {"question", q.stem},
                {"options", q.options},
                {"answer", q.gold_index}};
    if (q.subject) obj["subject"] = *q.subject;
    if (q.language) obj["language"] = *q.language;
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace mcqa
