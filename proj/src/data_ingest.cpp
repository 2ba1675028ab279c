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

#include "convduel/data_ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/SVD>

#include "json.hpp"

namespace convduel {

namespace {

using Json = nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = line.find(delim, begin);
    out.push_back(line.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

bool parse_long(std::string_view text, long& value) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"')) text.remove_suffix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Dense ids in ascending order of the original ids.
std::vector<long> dense_ids(std::set<long> values) { return {values.begin(), values.end()}; }

Index lookup(const std::vector<long>& ids, long original) {
  return static_cast<Index>(std::lower_bound(ids.begin(), ids.end(), original) - ids.begin());
}

// The k largest scores, ties to the smaller index; result ascending.
std::vector<Index> top_k(const std::vector<long>& score, Index k) {
  std::vector<Index> order(score.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(k)));
  std::sort(order.begin(), order.end());
  return order;
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

Json matrix_to_json(const RowMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RowMatrix matrix_from_json(const Json& rows, Index cols, const char* field) {
  if (!rows.is_array()) throw FormatError(std::string("field '") + field + "' must be an array");
  RowMatrix m(static_cast<Index>(rows.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw FormatError(std::string("row ") + std::to_string(i) + " of '" + field + "' must have " +
                        std::to_string(cols) + " numbers");
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

Json environment_body(const Environment& env) {
  Json body;
  body["format"] = "convduel-environment";
  body["version"] = kEnvironmentFormatVersion;
  body["d"] = env.dim();
  body["link"] = std::string(to_string(env.link.kind));
  body["num_keyterms"] = env.num_keyterms();
  body["theta_star"] = matrix_to_json(env.users);
  body["arms"] = matrix_to_json(env.arms);
  Json weights = Json::array();
  for (const auto& t : env.graph.triples()) weights.push_back(Json::array({t.arm, t.keyterm, t.weight}));
  body["weights"] = std::move(weights);
  body["provenance"] = env.provenance;
  return body;
}

}  // namespace

RawInteractions parse_hetrec(const std::vector<std::string>& paths) {
  if (paths.empty()) throw FormatError("no input files given");
  std::set<std::array<long, 3>> unique;
  RawInteractions raw;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    char delim = '\t';
    if (line.find('\t') == std::string::npos) {
      if (line.find(',') == std::string::npos) {
        throw FormatError(path + ":1: header has neither tab nor comma delimiters");
      }
      delim = ',';
    }
    std::size_t number = 1;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto fields = split(line, delim);
      std::array<long, 3> triple{};
      if (fields.size() < 3 || !parse_long(fields[0], triple[0]) || !parse_long(fields[1], triple[1]) ||
          !parse_long(fields[2], triple[2])) {
        throw FormatError(path + ":" + std::to_string(number) +
                          ": expected integer user, item and tag ids");
      }
      ++raw.raw_records;
      unique.insert(triple);
    }
  }
  if (unique.empty()) throw FormatError("no interaction records found");

  std::set<long> users, items, tags;
  for (const auto& t : unique) {
    users.insert(t[0]);
    items.insert(t[1]);
    tags.insert(t[2]);
  }
  raw.user_ids = dense_ids(std::move(users));
  raw.item_ids = dense_ids(std::move(items));
  raw.tag_ids = dense_ids(std::move(tags));
  raw.triples.reserve(unique.size());
  for (const auto& t : unique) {
    raw.triples.push_back({lookup(raw.user_ids, t[0]), lookup(raw.item_ids, t[1]), lookup(raw.tag_ids, t[2])});
  }
  std::sort(raw.triples.begin(), raw.triples.end());
  return raw;
}

Factorization factorize_feedback(const Matrix& feedback, Index dim, std::uint64_t seed) {
  if (dim < 1 || dim > std::min(feedback.rows(), feedback.cols())) {
    throw ConfigError("factorization rank must lie in [1, min(users, items)]");
  }
  Eigen::BDCSVD<Matrix> svd(feedback, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector root = svd.singularValues().head(dim).cwiseSqrt();
  Factorization f;
  f.singular_values = svd.singularValues().head(dim);
  f.items = svd.matrixV().leftCols(dim) * root.asDiagonal();
  f.users = svd.matrixU().leftCols(dim) * root.asDiagonal();
  RandomStream rng(seed, 0, Purpose::Environment);
  const auto normalize = [&](RowMatrix& m, Index& degenerate) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double n = m.row(i).norm();
      if (n > 1e-12) {
        m.row(i) /= n;
        continue;
      }
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
      m.row(i).normalize();
      ++degenerate;
    }
  };
  normalize(f.items, f.degenerate_items);
  normalize(f.users, f.degenerate_users);
  return f;
}

PreparedDataset build_environment(const RawInteractions& raw, const PrepareOptions& options,
                                  std::uint64_t seed) {
  if (raw.triples.empty()) throw StructuralError("no interactions to build an environment from");
  if (options.max_items < 2 || options.max_users < 1 || options.max_tags_per_item < 1) {
    throw ConfigError("item, user and tag caps must be positive (at least 2 items)");
  }
  const auto num_items = static_cast<Index>(raw.item_ids.size());
  const auto num_users = static_cast<Index>(raw.user_ids.size());
  if (num_items < options.max_items) {
    throw StructuralError("dataset has " + std::to_string(num_items) + " items, fewer than the " +
                          std::to_string(options.max_items) + " requested; lower the item cap");
  }

  // Items with the most tag assignments.
  std::vector<long> item_score(static_cast<std::size_t>(num_items), 0);
  for (const auto& t : raw.triples) ++item_score[static_cast<std::size_t>(t.item)];
  const std::vector<Index> items = top_k(item_score, options.max_items);
  std::vector<Index> item_slot(static_cast<std::size_t>(num_items), -1);
  for (std::size_t i = 0; i < items.size(); ++i) item_slot[static_cast<std::size_t>(items[i])] = static_cast<Index>(i);

  // Users with the most assignments on kept items.
  std::vector<long> user_score(static_cast<std::size_t>(num_users), 0);
  for (const auto& t : raw.triples) {
    if (item_slot[static_cast<std::size_t>(t.item)] >= 0) ++user_score[static_cast<std::size_t>(t.user)];
  }
  const auto active = std::count_if(user_score.begin(), user_score.end(), [](long s) { return s > 0; });
  if (active < options.max_users) {
    throw StructuralError("only " + std::to_string(active) + " users tagged the kept items, fewer than the " +
                          std::to_string(options.max_users) + " requested; lower the user cap");
  }
  const std::vector<Index> users = top_k(user_score, options.max_users);
  std::vector<Index> user_slot(static_cast<std::size_t>(num_users), -1);
  for (std::size_t u = 0; u < users.size(); ++u) user_slot[static_cast<std::size_t>(users[u])] = static_cast<Index>(u);

  // Tags per kept item, and how many kept items share each tag.
  std::vector<std::set<Index>> item_tags(items.size());
  for (const auto& t : raw.triples) {
    const Index slot = item_slot[static_cast<std::size_t>(t.item)];
    if (slot >= 0) item_tags[static_cast<std::size_t>(slot)].insert(t.tag);
  }
  std::vector<long> tag_reach(raw.tag_ids.size(), 0);
  for (const auto& tags : item_tags) {
    for (Index tag : tags) ++tag_reach[static_cast<std::size_t>(tag)];
  }
  std::vector<std::vector<Index>> kept_tags(items.size());
  std::set<Index> vocabulary;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::vector<Index> tags(item_tags[i].begin(), item_tags[i].end());
    std::stable_sort(tags.begin(), tags.end(), [&](Index a, Index b) {
      return tag_reach[static_cast<std::size_t>(a)] > tag_reach[static_cast<std::size_t>(b)];
    });
    tags.resize(std::min<std::size_t>(tags.size(), static_cast<std::size_t>(options.max_tags_per_item)));
    std::sort(tags.begin(), tags.end());
    vocabulary.insert(tags.begin(), tags.end());
    kept_tags[i] = std::move(tags);
  }
  const std::vector<Index> keyterms(vocabulary.begin(), vocabulary.end());

  std::vector<WeightTriple> triples;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double w = 1.0 / static_cast<double>(kept_tags[i].size());
    for (Index tag : kept_tags[i]) {
      const auto k = static_cast<Index>(std::lower_bound(keyterms.begin(), keyterms.end(), tag) - keyterms.begin());
      triples.push_back({static_cast<Index>(i), k, w});
    }
  }
  WeightGraph graph(static_cast<Index>(items.size()), static_cast<Index>(keyterms.size()), triples);

  Matrix feedback = Matrix::Zero(static_cast<Index>(users.size()), static_cast<Index>(items.size()));
  for (const auto& t : raw.triples) {
    const Index u = user_slot[static_cast<std::size_t>(t.user)];
    const Index i = item_slot[static_cast<std::size_t>(t.item)];
    if (u >= 0 && i >= 0) feedback(u, i) = 1.0;
  }
  Factorization f = factorize_feedback(feedback, options.dim, seed);

  PreparedDataset ds;
  for (Index i : items) ds.item_ids.push_back(raw.item_ids[static_cast<std::size_t>(i)]);
  for (Index u : users) ds.user_ids.push_back(raw.user_ids[static_cast<std::size_t>(u)]);
  for (Index k : keyterms) ds.keyterm_ids.push_back(raw.tag_ids[static_cast<std::size_t>(k)]);
  ds.singular_values = f.singular_values;

  std::ostringstream sv;
  sv.precision(17);
  for (Index i = 0; i < f.singular_values.size(); ++i) sv << (i ? " " : "") << f.singular_values(i);
  std::map<std::string, std::string> provenance{
      {"source", "hetrec"},
      {"seed", std::to_string(seed)},
      {"raw_records", std::to_string(raw.raw_records)},
      {"unique_triples", std::to_string(raw.triples.size())},
      {"num_arms", std::to_string(items.size())},
      {"num_users", std::to_string(users.size())},
      {"num_keyterms", std::to_string(keyterms.size())},
      {"max_tags_per_item", std::to_string(options.max_tags_per_item)},
      {"singular_values", sv.str()},
      {"degenerate_items", std::to_string(f.degenerate_items)},
      {"degenerate_users", std::to_string(f.degenerate_users)},
  };
  ds.env = make_environment(LinkFunction{options.link}, std::move(f.items), std::move(graph),
                            std::move(f.users), std::move(provenance));
  return ds;
}

std::string environment_checksum(const Environment& env) { return sha256_hex(environment_body(env).dump()); }

std::string environment_to_json(const Environment& env) {
  Json doc = environment_body(env);
  doc["checksum"] = "sha256:" + sha256_hex(doc.dump());
  return doc.dump(1) + "\n";
}

Environment environment_from_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("environment file is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != "convduel-environment") {
      throw FormatError("not a convduel environment file");
    }
    const int version = doc.at("version").get<int>();
    if (version != kEnvironmentFormatVersion) {
      throw FormatError("unsupported environment file version " + std::to_string(version) + " (expected " +
                        std::to_string(kEnvironmentFormatVersion) + ")");
    }
    const std::string checksum = doc.at("checksum").get<std::string>();
    Json body = doc;
    body.erase("checksum");
    if (checksum != "sha256:" + sha256_hex(body.dump())) {
      throw FormatError("environment file checksum mismatch");
    }
    const auto d = doc.at("d").get<Index>();
    if (d < 1) throw FormatError("dimension must be positive");
    RowMatrix users = matrix_from_json(doc.at("theta_star"), d, "theta_star");
    RowMatrix arms = matrix_from_json(doc.at("arms"), d, "arms");
    std::vector<WeightTriple> triples;
    for (const auto& w : doc.at("weights")) {
      if (!w.is_array() || w.size() != 3) throw FormatError("weights must be [arm, key-term, weight] triples");
      triples.push_back({w[0].get<Index>(), w[1].get<Index>(), w[2].get<double>()});
    }
    WeightGraph graph(arms.rows(), doc.at("num_keyterms").get<Index>(), triples);
    const LinkFunction link{parse_link_kind(doc.at("link").get<std::string>())};
    auto provenance = doc.value("provenance", std::map<std::string, std::string>{});
    return make_environment(link, std::move(arms), std::move(graph), std::move(users), std::move(provenance));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed environment file: ") + e.what());
  }
}

void export_environment(const Environment& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << environment_to_json(env);
  if (!out) throw FormatError("failed writing '" + path + "'");
}

Environment import_environment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return environment_from_json(text.str());
}

}  // namespace convduel
