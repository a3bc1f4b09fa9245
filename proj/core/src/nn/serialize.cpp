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

#include "satdetect/nn/serialize.hpp"

#include <fstream>

#include "satdetect/binary_io.hpp"
#include "satdetect/error.hpp"

namespace satdetect::nn {
namespace {

constexpr std::string_view kMagic{"SDCNN\0\0\1", 8};
constexpr std::uint32_t kVersion = 1;

template <typename T>
constexpr const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

}  // namespace

template <typename T>
void save_model(const Model<T>& model, const ModelMetadata& meta, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["format"] = "satdetect-cnn";
  header["version"] = kVersion;
  header["dtype"] = dtype_name<T>();
  header["input_shape"] = model.input_shape();
  header["seed"] = model.seed();
  auto& layers = header["layers"] = nlohmann::ordered_json::array();
  auto& params = header["parameters"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    nlohmann::json spec;
    model.layer(i).spec().to_json(spec);
    layers.push_back(nlohmann::ordered_json::parse(spec.dump()));
    for (const auto& p : model.layer(i).parameters()) {
      params.push_back({{"layer", i}, {"name", p.name}, {"shape", p.shape}});
    }
  }
  header["vocabulary_fingerprint"] = meta.vocabulary_fingerprint;
  header["embedding_fingerprint"] = meta.embedding_fingerprint;
  nlohmann::json train;
  meta.train_config.to_json(train);
  header["train_config"] = train;
  header["extra"] = meta.extra;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  binio::write_magic(out, kMagic);
  binio::write_u32(out, kVersion);
  binio::write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    const auto& layer = model.layer(i);
    for (std::size_t p = 0; p < layer.parameters().size(); ++p) {
      const auto values = layer.export_parameter(p);
      if constexpr (sizeof(T) == 4) {
        binio::write_f32_array(out, values);
      } else {
        binio::write_f64_array(out, values);
      }
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

template <typename T>
Model<T> load_model(const std::filesystem::path& path, ModelMetadata* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "model not found: " + path.string());
  binio::expect_magic(in, kMagic, "model");
  const auto version = binio::read_u32(in);
  if (version != kVersion) throw Error(ErrorCode::kFormatError, "unsupported model version " + std::to_string(version));
  const auto header_len = binio::read_u64(in);
  if (header_len > (1u << 24)) throw Error(ErrorCode::kFormatError, "model header too large");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error(ErrorCode::kFormatError, "truncated model header");

  nlohmann::json header;
  Shape input_shape;
  std::vector<LayerSpec> specs;
  std::string dtype;
  std::uint64_t seed = 0;
  try {
    header = nlohmann::json::parse(text);
    dtype = header.at("dtype").get<std::string>();
    input_shape = header.at("input_shape").get<Shape>();
    seed = header.at("seed").get<std::uint64_t>();
    for (const auto& l : header.at("layers")) specs.push_back(LayerSpec::from_json(l));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("model header: ") + e.what());
  }
  if (dtype != "f32" && dtype != "f64") throw Error(ErrorCode::kFormatError, "unknown dtype '" + dtype + "'");

  // Building re-runs initialization; every value is overwritten below.
  Model<T> model(input_shape, specs, seed);
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    auto& layer = model.layer(i);
    for (std::size_t p = 0; p < layer.parameters().size(); ++p) {
      const std::size_t n = layer.parameters()[p].value.size();
      std::vector<T> values(n);
      if (dtype == "f32") {
        std::vector<float> raw(n);
        binio::read_f32_array(in, raw);
        std::copy(raw.begin(), raw.end(), values.begin());
      } else {
        std::vector<double> raw(n);
        binio::read_f64_array(in, raw);
        std::transform(raw.begin(), raw.end(), values.begin(), [](double v) { return static_cast<T>(v); });
      }
      layer.import_parameter(p, values);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kFormatError, "trailing bytes after model parameters");
  }

  if (meta) {
    meta->vocabulary_fingerprint = header.value("vocabulary_fingerprint", std::string{});
    meta->embedding_fingerprint = header.value("embedding_fingerprint", std::string{});
    if (header.contains("train_config")) meta->train_config = TrainConfig::from_json(header["train_config"]);
    meta->extra = header.value("extra", nlohmann::json::object());
  }
  return model;
}

template void save_model<float>(const Model<float>&, const ModelMetadata&, const std::filesystem::path&);
template void save_model<double>(const Model<double>&, const ModelMetadata&, const std::filesystem::path&);
template Model<float> load_model<float>(const std::filesystem::path&, ModelMetadata*);
template Model<double> load_model<double>(const std::filesystem::path&, ModelMetadata*);

}  // namespace satdetect::nn
