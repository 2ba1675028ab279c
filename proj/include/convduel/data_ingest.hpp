// Copyright 2026 The convduel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVDUEL_DATA_INGEST_HPP_
#define CONVDUEL_DATA_INGEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "convduel/envsim.hpp"

namespace convduel {

struct TagTriple {
  Index user;
  Index item;
  Index tag;

  friend bool operator==(const TagTriple&, const TagTriple&) = default;
  friend auto operator<=>(const TagTriple&, const TagTriple&) = default;
};

// Tag assignments with dense ids. The *_ids vectors map a dense id back to
// the id used in the files; dense ids follow ascending original ids.
struct RawInteractions {
  std::vector<TagTriple> triples;  // sorted, unique
  std::vector<long> user_ids;
  std::vector<long> item_ids;
  std::vector<long> tag_ids;
  std::size_t raw_records = 0;     // data lines read, before dedup
};

// Reads HetRec-style tag files (user, item, tag, ... per line, one header
// line). The delimiter, tab or comma, is detected from the header. Extra
// columns are ignored. Throws FormatError for a missing file, a malformed
// line (with its number) or an empty result.
RawInteractions parse_hetrec(const std::vector<std::string>& paths);

struct PrepareOptions {
  Index dim = 10;
  Index max_items = 2000;
  Index max_users = 100;
  Index max_tags_per_item = 20;
  LinkKind link = LinkKind::Sigmoid;
};

struct Factorization {
  RowMatrix items;  // unit rows
  RowMatrix users;  // unit rows
  Vector singular_values;
  Index degenerate_items = 0;  // zero factor rows replaced by random directions
  Index degenerate_users = 0;
};

// Rank-d truncated SVD F ~ U S V^T of a users x items matrix. Items get
// V S^{1/2}, users U S^{1/2}, both row-normalized. A zero row (an item or
// user the kept data never touches) is replaced by a random unit vector
// drawn from `seed`.
Factorization factorize_feedback(const Matrix& feedback, Index dim, std::uint64_t seed);

struct PreparedDataset {
  Environment env;
  std::vector<long> item_ids;     // original id per arm
  std::vector<long> user_ids;     // original id per user
  std::vector<long> keyterm_ids;  // original tag id per key-term
  Vector singular_values;
};

// Selects the most tagged items, the most active users and the most shared
// tags per item, then factorizes the binary user x item matrix. Ties go to
// the smaller id. Throws StructuralError when the data has fewer items or
// users than requested.
PreparedDataset build_environment(const RawInteractions& raw, const PrepareOptions& options,
                                  std::uint64_t seed);

constexpr int kEnvironmentFormatVersion = 1;

// Self-describing JSON environment file; see the README for the fields.
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);

void export_environment(const Environment& env, const std::string& path);
Environment import_environment(const std::string& path);

// Hex SHA-256 of the canonical document body.
std::string environment_checksum(const Environment& env);

}  // namespace convduel

#endif  // CONVDUEL_DATA_INGEST_HPP_
