// Copyright 2026 The satdetect Authors
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

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "satdetect/nn/model.hpp"
#include "satdetect/nn/train.hpp"

namespace satdetect::nn {

/// Lineage and training context stored alongside the weights.
struct ModelMetadata {
  std::string vocabulary_fingerprint;
  std::string embedding_fingerprint;
  TrainConfig train_config;
  nlohmann::json extra = nlohmann::json::object();
};

/// Model file layout:
///   8 bytes  magic "SDCNN\0\0\1"
///   u32      format version (1)
///   u64      header length, then that many bytes of UTF-8 JSON describing
///            dtype, input shape, layer specs, parameter shapes, metadata
///   payload  every parameter in layer order, canonical element order,
///            packed little-endian in the header's dtype (f32 or f64)
template <typename T>
void save_model(const Model<T>& model, const ModelMetadata& meta, const std::filesystem::path& path);

/// Loads into the requested scalar type, converting if the file's dtype
/// differs. Throws FormatError or MissingFile.
template <typename T>
Model<T> load_model(const std::filesystem::path& path, ModelMetadata* meta = nullptr);

}  // namespace satdetect::nn
