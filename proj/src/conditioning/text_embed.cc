// conditioning/text_embed.cc

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "conditioning/text_embed.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "base/error.h"
#include "base/random.h"

namespace octsep {

namespace {

void Normalize(std::vector<double> *v, std::string_view what) {
  double norm = 0.0;
  for (double x : *v) norm += x * x;
  norm = std::sqrt(norm);
  Require(norm > 0.0, ErrorCode::kData, "zero text embedding for: ", what);
  for (double &x : *v) x /= norm;
}

}  // namespace

TextBackend ParseTextBackend(std::string_view s) {
  if (s == "hashed") return TextBackend::kHashed;
  if (s == "external" || s == "external-sentence-model") return TextBackend::kExternal;
  Fail(ErrorCode::kConfig, "unknown text backend: ", s);
}

TextPooling ParseTextPooling(std::string_view s) {
  if (s == "mean") return TextPooling::kMean;
  if (s == "first" || s == "first-token") return TextPooling::kFirstToken;
  Fail(ErrorCode::kConfig, "unknown text pooling: ", s);
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

HashedTextEmbedder::HashedTextEmbedder(int dim, int buckets, std::uint64_t seed)
    : dim_(dim), buckets_(buckets), table_(static_cast<std::size_t>(buckets)) {
  Require(dim > 0 && buckets > 0, ErrorCode::kConfig, "hashed text embedder: bad dimensions");
  for (int b = 0; b < buckets; ++b) {
    Rng rng(DeriveSeed({seed, static_cast<std::uint64_t>(b)}));
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double &x : v) x = Gaussian(rng);
    Normalize(&v, "bucket");
    table_[b] = std::move(v);
  }
}

int HashedTextEmbedder::BucketOf(std::string_view token) const {
  return static_cast<int>(Fnv1a64(token) % static_cast<std::uint64_t>(buckets_));
}

std::vector<double> HashedTextEmbedder::Embed(std::string_view text) const {
  const std::vector<std::string> tokens = Tokenize(text);
  Require(!tokens.empty(), ErrorCode::kInvalidArgument, "empty text description");
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  for (const std::string &tok : tokens) {
    const std::vector<double> &v = table_[BucketOf(tok)];
    for (int i = 0; i < dim_; ++i) out[i] += v[i];
  }
  for (double &x : out) x /= static_cast<double>(tokens.size());
  Normalize(&out, text);
  return out;
}

TokenTableEmbedder::TokenTableEmbedder(const std::string &table_path, TextPooling pooling)
    : pooling_(pooling) {
  std::ifstream in(table_path);
  Require(in.good(), ErrorCode::kUnsupported, "text embedding provider unavailable (", table_path,
          "); set cond.text_backend = hashed to fall back to the built-in backend");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    Require(tab != std::string::npos, ErrorCode::kData, table_path, ":", lineno, ": missing tab");
    std::vector<double> v;
    std::istringstream vs(line.substr(tab + 1));
    double x;
    while (vs >> x) v.push_back(x);
    if (dim_ == 0) dim_ = static_cast<int>(v.size());
    Require(dim_ > 0 && static_cast<int>(v.size()) == dim_, ErrorCode::kData, table_path, ":",
            lineno, ": inconsistent embedding dimension");
    std::string token = line.substr(0, tab);
    for (char &c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    table_[token] = std::move(v);
  }
  Require(!table_.empty(), ErrorCode::kData, "empty embedding table: ", table_path);
}

std::vector<double> TokenTableEmbedder::Embed(std::string_view text) const {
  const std::vector<std::string> tokens = Tokenize(text);
  Require(!tokens.empty(), ErrorCode::kInvalidArgument, "empty text description");
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  int used = 0;
  for (const std::string &tok : tokens) {
    auto it = table_.find(tok);
    if (it == table_.end()) continue;
    for (int i = 0; i < dim_; ++i) out[i] += it->second[i];
    ++used;
    if (pooling_ == TextPooling::kFirstToken) break;
  }
  Require(used > 0, ErrorCode::kData, "no known tokens in description: ", text);
  Normalize(&out, text);
  return out;
}

std::shared_ptr<const TextEmbedder> MakeTextEmbedder(const TextEmbedderConfig &config) {
  if (config.backend == TextBackend::kHashed)
    return std::make_shared<HashedTextEmbedder>(config.dim, config.buckets, config.seed);
  return std::make_shared<TokenTableEmbedder>(config.table_path, config.pooling);
}

}  // namespace octsep
