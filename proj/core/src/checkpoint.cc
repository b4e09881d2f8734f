// Copyright 2026 The Clozekit Authors.
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

#include "clozekit/checkpoint.h"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "clozekit/error.h"

namespace clozekit {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'L', 'Z', 'K', 'C', 'K', 'P', 'T'};
constexpr std::string_view kMetaPrefix = "meta.";

void WriteU32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void WriteU64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t ReadUnsigned(std::istream& in, int bytes, const std::string& what) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ValidationError("checkpoint truncated in " + what);
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

void WriteBlock(std::ostream& out, const std::string& text) {
  WriteU64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string ReadBlock(std::istream& in, const std::string& what) {
  const std::uint64_t size = ReadUnsigned(in, 8, what);
  constexpr std::uint64_t kMaxBlock = std::uint64_t{1} << 34;
  if (size > kMaxBlock) throw ValidationError("checkpoint " + what + " block too large");
  std::string text(size, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(size))) {
    throw ValidationError("checkpoint truncated in " + what);
  }
  return text;
}

struct RawCheckpoint {
  KeyValueConfig header;
  std::string vocab_text;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

RawCheckpoint ReadRaw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ValidationError(path.string() + ": not a clozekit checkpoint (bad magic)");
  }
  const auto version = static_cast<std::uint32_t>(ReadUnsigned(in, 4, "version"));
  if (version != kCheckpointVersion) {
    throw ValidationError(path.string() + ": checkpoint version " + std::to_string(version) +
                          ", this build reads version " + std::to_string(kCheckpointVersion));
  }
  RawCheckpoint raw;
  raw.header = KeyValueConfig::Parse(ReadBlock(in, "header"), path.string() + " header");
  raw.vocab_text = ReadBlock(in, "vocabulary");
  const auto count = ReadUnsigned(in, 4, "tensor count");
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = ReadUnsigned(in, 4, "tensor name");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name_len))) {
      throw ValidationError("checkpoint truncated in tensor name");
    }
    try {
      Tensor t = ReadTensor(in);
      raw.tensors.emplace_back(std::move(name), std::move(t));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": tensor '" + name + "': " + e.what());
    }
  }
  return raw;
}

// Assigns stored tensors to `model`; the rest go to `extras` when given.
void AssignParameters(const std::filesystem::path& path,
                      std::vector<std::pair<std::string, Tensor>>& tensors, Model& model,
                      std::map<std::string, Tensor>* extras) {
  std::map<std::string, Parameter*> by_name;
  for (Parameter* p : model.Parameters()) by_name.emplace(p->name, p);
  std::set<std::string> assigned;
  for (auto& [name, tensor] : tensors) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      if (extras) extras->emplace(name, std::move(tensor));
      continue;
    }
    Parameter& p = *it->second;
    if (tensor.shape() != p.value.shape()) {
      throw ShapeError(path.string() + ": tensor '" + name + "' has shape " +
                       ShapeString(tensor.shape()) + ", model expects " +
                       ShapeString(p.value.shape()));
    }
    p.value = std::move(tensor);
    p.grad = Tensor(p.value.shape());
    assigned.insert(name);
  }
  for (const auto& [name, p] : by_name) {
    if (assigned.count(name) == 0) {
      throw ValidationError(path.string() + ": parameter '" + name + "' missing");
    }
  }
}

}  // namespace

void WriteModelConfig(const ModelConfig& config, KeyValueConfig& out) {
  out.Set("vocab_size", std::to_string(config.vocab_size));
  out.Set("embedding_dim", std::to_string(config.embedding_dim));
  out.Set("hidden", std::to_string(config.hidden));
  out.Set("layers", std::to_string(config.layers));
  out.Set("query_init", config.query_init ? "true" : "false");
}

ModelConfig ReadModelConfig(const KeyValueConfig& in) {
  ModelConfig config;
  config.vocab_size = in.GetSize("vocab_size", 0);
  config.embedding_dim = in.GetSize("embedding_dim", config.embedding_dim);
  config.hidden = in.GetSize("hidden", config.hidden);
  config.layers = in.GetSize("layers", config.layers);
  config.query_init = in.GetBool("query_init", config.query_init);
  config.Validate();
  return config;
}

void SaveCheckpoint(const std::filesystem::path& path, const Model& model,
                    const Vocabulary& vocab, const std::map<std::string, std::string>& metadata,
                    const std::map<std::string, Tensor>& extras) {
  KeyValueConfig header;
  WriteModelConfig(model.config(), header);
  for (const auto& [key, value] : metadata) {
    if (value.find('\n') != std::string::npos) {
      throw ValidationError("checkpoint metadata '" + key + "' contains a newline");
    }
    header.Set(std::string(kMetaPrefix) + key, value);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  WriteU32(out, kCheckpointVersion);
  WriteBlock(out, header.Serialize());
  WriteBlock(out, vocab.Serialize());
  const auto params = model.Parameters();
  WriteU32(out, static_cast<std::uint32_t>(params.size() + extras.size()));
  auto write_named = [&](const std::string& name, const Tensor& t) {
    WriteU32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteTensor(out, t);
  };
  for (const Parameter* p : params) write_named(p->name, p->value);
  for (const auto& [name, t] : extras) write_named(name, t);
  out.close();
  if (out.fail()) throw IoError("cannot write checkpoint " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  RawCheckpoint raw = ReadRaw(path);
  Checkpoint ckpt;
  KeyValueConfig model_keys;
  for (const auto& [key, value] : raw.header.entries()) {
    if (key.starts_with(kMetaPrefix)) {
      ckpt.metadata.emplace(key.substr(kMetaPrefix.size()), value);
    } else {
      model_keys.Set(key, value);
    }
  }
  const ModelConfig config = ReadModelConfig(model_keys);
  ckpt.vocab = Vocabulary::Deserialize(raw.vocab_text);
  if (ckpt.vocab.size() != config.vocab_size) {
    throw ValidationError(path.string() + ": vocabulary has " + std::to_string(ckpt.vocab.size()) +
                          " ids but the model was built for " + std::to_string(config.vocab_size));
  }
  ckpt.model = Model(config);
  AssignParameters(path, raw.tensors, ckpt.model, &ckpt.extras);
  return ckpt;
}

void LoadParameters(const std::filesystem::path& path, Model& model) {
  RawCheckpoint raw = ReadRaw(path);
  AssignParameters(path, raw.tensors, model, nullptr);
}

}  // namespace clozekit
