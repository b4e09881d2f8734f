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

// Model checkpoints.
//
// Layout: magic "CLZKCKPT", u32 format version, then three length-prefixed
// sections: the key=value block (model configuration plus metadata under
// "meta."), the vocabulary text, and the tensors as (u32 name length, name,
// tensor record) with a leading u32 count. Integers are little-endian.

#ifndef CLOZEKIT_CHECKPOINT_H_
#define CLOZEKIT_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <string>

#include "clozekit/asreader.h"
#include "clozekit/config.h"
#include "clozekit/tensor.h"
#include "clozekit/vocab.h"

namespace clozekit {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  Vocabulary vocab;
  std::map<std::string, std::string> metadata;
  // Tensors beyond the model parameters (optimizer moments and the like).
  std::map<std::string, Tensor> extras;
};

// Throws IoError when the file cannot be written.
void SaveCheckpoint(const std::filesystem::path& path, const Model& model,
                    const Vocabulary& vocab,
                    const std::map<std::string, std::string>& metadata = {},
                    const std::map<std::string, Tensor>& extras = {});

// Throws ValidationError on a bad magic or version and ShapeError naming
// the tensor when a stored shape disagrees with the stored configuration.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Copies the stored parameters into an existing model. Throws ShapeError
// naming the first tensor whose shape differs and ValidationError when a
// parameter is missing from the file.
void LoadParameters(const std::filesystem::path& path, Model& model);

// Model settings as key=value pairs, and back. The parse direction also
// validates the result.
void WriteModelConfig(const ModelConfig& config, KeyValueConfig& out);
ModelConfig ReadModelConfig(const KeyValueConfig& in);

}  // namespace clozekit

#endif  // CLOZEKIT_CHECKPOINT_H_
