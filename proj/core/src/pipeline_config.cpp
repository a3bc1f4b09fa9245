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

#include "satdetect/pipeline_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "satdetect/error.hpp"

namespace satdetect {
namespace {

std::string canonical_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorCode::kInvalidArgument,
              "config key '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

std::size_t parse_size(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "an unsigned 64-bit integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  std::string value(raw);
  for (auto& ch : value) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

PipelineConfig PipelineConfig::for_preset(std::string_view preset) {
  PipelineConfig c;
  if (preset == "desk") {
    c.max_terms = 200;
  } else if (preset == "paper") {
    c.max_terms = 1000;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + std::string(preset) + "' (expected desk or paper)");
  }
  c.preset = std::string(preset);
  c.dim = 10;
  return c;
}

void PipelineConfig::set(std::string_view raw_key, std::string_view raw_value) {
  const std::string key = canonical_key(trim(raw_key));
  const std::string_view value = trim(raw_value);
  if (key == "preset") {
    if (value != "desk" && value != "paper") bad_value(key, value, "desk or paper");
    preset = std::string(value);
  } else if (key == "corpus") {
    corpus = std::string(value);
  } else if (key == "out_dir") {
    out_dir = std::string(value);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "train_fraction") {
    train_fraction = parse_real(key, value);
  } else if (key == "stratified") {
    stratified = parse_bool(key, value);
  } else if (key == "stopwords") {
    stopwords = std::string(value);
  } else if (key == "suffixes") {
    suffixes = std::string(value);
  } else if (key == "min_stem_len") {
    min_stem_len = parse_size(key, value);
  } else if (key == "stem") {
    stem = parse_bool(key, value);
  } else if (key == "remove_stopwords") {
    remove_stopwords = parse_bool(key, value);
  } else if (key == "min_df") {
    min_df = parse_real(key, value);
  } else if (key == "max_df") {
    max_df = parse_real(key, value);
  } else if (key == "max_terms") {
    max_terms = parse_size(key, value);
  } else if (key == "dim") {
    dim = parse_size(key, value);
  } else if (key == "window") {
    window = parse_size(key, value);
  } else if (key == "negatives") {
    negatives = parse_size(key, value);
  } else if (key == "emb_epochs") {
    emb_epochs = parse_size(key, value);
  } else if (key == "emb_lr") {
    emb_lr = parse_real(key, value);
  } else if (key == "min_count") {
    min_count = parse_size(key, value);
  } else if (key == "epochs") {
    epochs = parse_size(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_size(key, value);
  } else if (key == "lr") {
    lr = parse_real(key, value);
  } else if (key == "optimizer") {
    nn::parse_optimizer(value);
    optimizer = std::string(value);
  } else if (key == "kernel") {
    kernel = parse_size(key, value);
  } else if (key == "conv1_activation") {
    nn::parse_activation(value);
    conv1_activation = std::string(value);
  } else if (key == "patience") {
    patience = parse_size(key, value);
  } else if (key == "threshold") {
    threshold = parse_real(key, value);
  } else if (key == "repeats") {
    repeats = parse_size(key, value);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
  require(min_df >= 0.0 && max_df <= 1.0 && min_df < max_df, "need 0 <= min_df < max_df <= 1");
  require(max_terms > 0, "max_terms must be positive");
  require(dim > 0, "dim must be positive");
  require(window > 0, "window must be positive");
  require(emb_lr > 0.0, "emb_lr must be positive");
  require(min_count > 0, "min_count must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(lr >= 0.0, "lr must be non-negative");
  require(kernel > 0, "kernel must be positive");
  require(min_stem_len > 0, "min_stem_len must be positive");
  require(threshold >= 0.0 && threshold <= 1.0, "threshold must lie in [0, 1]");
  require(repeats > 0, "repeats must be positive");
  nn::parse_optimizer(optimizer);
  nn::parse_activation(conv1_activation);
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  auto line = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  line("preset", preset);
  line("corpus", corpus.string());
  line("out_dir", out_dir.string());
  line("seed", std::to_string(seed));
  line("train_fraction", format_real(train_fraction));
  line("stratified", flag(stratified));
  line("stopwords", stopwords);
  line("suffixes", suffixes);
  line("min_stem_len", std::to_string(min_stem_len));
  line("stem", flag(stem));
  line("remove_stopwords", flag(remove_stopwords));
  line("min_df", format_real(min_df));
  line("max_df", format_real(max_df));
  line("max_terms", std::to_string(max_terms));
  line("dim", std::to_string(dim));
  line("window", std::to_string(window));
  line("negatives", std::to_string(negatives));
  line("emb_epochs", std::to_string(emb_epochs));
  line("emb_lr", format_real(emb_lr));
  line("min_count", std::to_string(min_count));
  line("epochs", std::to_string(epochs));
  line("batch_size", std::to_string(batch_size));
  line("lr", format_real(lr));
  line("optimizer", optimizer);
  line("kernel", std::to_string(kernel));
  line("conv1_activation", conv1_activation);
  line("patience", std::to_string(patience));
  line("threshold", format_real(threshold));
  line("repeats", std::to_string(repeats));
  return os.str();
}

void PipelineConfig::to_json(nlohmann::json& j) const {
  j = nlohmann::json::object();
  for (const auto& [k, v] : parse_config_text(to_text())) j[k] = v;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "config must be a JSON object");
  PipelineConfig c = for_preset(j.value("preset", std::string("desk")));
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(ErrorCode::kFormatError, "config value for '" + k + "' must be a string");
    c.set(k, v.get<std::string>());
  }
  return c;
}

PreprocessConfig PipelineConfig::preprocess_config() const {
  PreprocessConfig p;
  p.stopwords = stopwords.empty() ? StopList::bangla_default() : StopList::load(stopwords);
  p.suffixes = suffixes.empty() ? SuffixTable::bangla_default(min_stem_len) : SuffixTable::load(suffixes, min_stem_len);
  p.remove_stopwords = remove_stopwords;
  p.stem = stem;
  return p;
}

VocabularyParams PipelineConfig::vocabulary_params() const { return {min_df, max_df, max_terms}; }

EmbeddingParams PipelineConfig::embedding_params(std::uint64_t stage_seed) const {
  EmbeddingParams p;
  p.dim = dim;
  p.window = window;
  p.negatives = negatives;
  p.epochs = emb_epochs;
  p.learning_rate = emb_lr;
  p.min_count = min_count;
  p.seed = stage_seed;
  return p;
}

nn::PaperModelOptions PipelineConfig::model_options() const {
  nn::PaperModelOptions o;
  o.kernel = kernel;
  o.conv1_activation = nn::parse_activation(conv1_activation);
  return o;
}

nn::TrainConfig PipelineConfig::train_config(std::uint64_t stage_seed) const {
  nn::TrainConfig t;
  t.optimizer.kind = nn::parse_optimizer(optimizer);
  t.optimizer.learning_rate = lr;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = stage_seed;
  if (patience > 0) t.patience = patience;
  return t;
}

SplitSpec PipelineConfig::split_spec(std::uint64_t stage_seed) const {
  return {train_fraction, stage_seed, stratified};
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(canonical_key(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "config file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

PipelineConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::string preset = "desk";
  for (const auto* entries : {&file_entries, &overrides}) {
    for (const auto& [k, v] : *entries) {
      if (canonical_key(k) == "preset") preset = std::string(trim(v));
    }
  }
  PipelineConfig c = PipelineConfig::for_preset(preset);
  for (const auto& [k, v] : file_entries) c.set(k, v);
  for (const auto& [k, v] : overrides) c.set(k, v);
  c.validate();
  return c;
}

}  // namespace satdetect
