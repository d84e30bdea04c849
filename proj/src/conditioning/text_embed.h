// conditioning/text_embed.h

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

#ifndef OCTSEP_CONDITIONING_TEXT_EMBED_H_
#define OCTSEP_CONDITIONING_TEXT_EMBED_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace octsep {

enum class TextBackend { kHashed, kExternal };
enum class TextPooling { kMean, kFirstToken };

TextBackend ParseTextBackend(std::string_view s);
TextPooling ParseTextPooling(std::string_view s);

// Lower-cased, whitespace-separated tokens.
std::vector<std::string> Tokenize(std::string_view text);

class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual int dim() const = 0;
  // Unit-norm embedding of a non-empty description.
  virtual std::vector<double> Embed(std::string_view text) const = 0;
};

// Every token hashes (FNV-1a) into one of a fixed set of seeded random unit
// vectors; the description embedding is the renormalized mean.
class HashedTextEmbedder : public TextEmbedder {
 public:
  HashedTextEmbedder(int dim, int buckets, std::uint64_t seed);

  int dim() const override { return dim_; }
  int buckets() const { return buckets_; }
  std::vector<double> Embed(std::string_view text) const override;

  int BucketOf(std::string_view token) const;
  const std::vector<double> &BucketVector(int bucket) const { return table_[bucket]; }

 private:
  int dim_;
  int buckets_;
  std::vector<std::vector<double>> table_;
};

// Adapter for embeddings exported from an external sentence model: a text
// file with one "token<TAB>v1 v2 ... vd" line per vocabulary entry. Tokens
// missing from the table are skipped; pooling is mean (sentence-embedding
// style) or first-token.
class TokenTableEmbedder : public TextEmbedder {
 public:
  TokenTableEmbedder(const std::string &table_path, TextPooling pooling);

  int dim() const override { return dim_; }
  std::vector<double> Embed(std::string_view text) const override;

 private:
  int dim_ = 0;
  TextPooling pooling_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

struct TextEmbedderConfig {
  TextBackend backend = TextBackend::kHashed;
  int dim = 64;
  int buckets = 1024;
  std::uint64_t seed = 0x7e47;
  std::string table_path;
  TextPooling pooling = TextPooling::kMean;
};

std::shared_ptr<const TextEmbedder> MakeTextEmbedder(const TextEmbedderConfig &config);

}  // namespace octsep

#endif  // OCTSEP_CONDITIONING_TEXT_EMBED_H_
