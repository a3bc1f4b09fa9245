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

#include "satdetect/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "satdetect/error.hpp"
#include "satdetect/fingerprint.hpp"

namespace satdetect {
namespace {

// Decodes one code point at `pos`; malformed sequences yield U+FFFD.
UChar32 next_code_point(std::string_view s, std::size_t& pos) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  auto i = static_cast<std::int32_t>(pos);
  UChar32 c = 0;
  U8_NEXT(bytes, i, length, c);
  pos = static_cast<std::size_t>(i);
  return c < 0 ? 0xFFFD : c;
}

void append_utf8(std::string& out, UChar32 c) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_separator(UChar32 c) { return u_isUWhiteSpace(c) || (U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) != 0; }

bool is_all_decimal_digits(std::string_view fragment) {
  std::size_t pos = 0;
  while (pos < fragment.size()) {
    if (u_charType(next_code_point(fragment, pos)) != U_DECIMAL_DIGIT_NUMBER) return false;
  }
  return !fragment.empty();
}

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kIoError, "ICU NFC normalizer unavailable");
  const auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
  const icu::UnicodeString output = normalizer->normalize(input, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kIoError, "NFC normalization failed");
  std::string result;
  output.toUTF8String(result);
  return result;
}

std::vector<std::string> parse_lines(std::string_view contents) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string norm = normalize(line);
    if (!norm.empty() && norm.front() != '#') lines.push_back(std::move(norm));
    start = end + 1;
  }
  return lines;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::size_t utf8_length(std::string_view s) noexcept {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string normalize(std::string_view raw) {
  std::string filtered;
  filtered.reserve(raw.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const UChar32 c = next_code_point(raw, pos);
    if (u_isUWhiteSpace(c)) {
      pending_space = !filtered.empty();
      continue;
    }
    if (u_charType(c) == U_CONTROL_CHAR) continue;
    if (pending_space) {
      filtered.push_back(' ');
      pending_space = false;
    }
    append_utf8(filtered, c);
  }
  return nfc(filtered);
}

TokenList tokenize(std::string_view text, bool drop_numeric) {
  TokenList tokens;
  std::size_t pos = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    if (end > start) {
      std::string_view fragment = text.substr(start, end - start);
      if (!(drop_numeric && is_all_decimal_digits(fragment))) tokens.emplace_back(fragment);
    }
  };
  while (pos < text.size()) {
    const std::size_t here = pos;
    const UChar32 c = next_code_point(text, pos);
    if (is_separator(c)) {
      flush(here);
      start = pos;
    }
  }
  flush(text.size());
  return tokens;
}

TokenList remove_stopwords(const TokenList& tokens, const StopList& stops) {
  TokenList kept;
  kept.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(kept),
               [&](const Token& t) { return !stops.contains(t); });
  return kept;
}

Token stem(std::string_view token, const SuffixTable& table) {
  const std::size_t length = utf8_length(token);
  for (const auto& suffix : table.suffixes()) {
    if (!token.ends_with(suffix)) continue;
    const std::size_t suffix_length = utf8_length(suffix);
    if (length >= suffix_length + table.min_stem_length()) {
      return Token(token.substr(0, token.size() - suffix.size()));
    }
  }
  return Token(token);
}

TokenList preprocess(std::string_view raw, const PreprocessConfig& config) {
  TokenList tokens = tokenize(normalize(raw), config.drop_numeric);
  if (config.remove_stopwords) tokens = remove_stopwords(tokens, config.stopwords);
  if (config.stem) {
    for (auto& t : tokens) t = stem(t, config.suffixes);
  }
  return tokens;
}

// StopList

StopList::StopList(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    std::string norm = normalize(e);
    if (!norm.empty()) entries_.insert(std::move(norm));
  }
}

StopList StopList::parse(std::string_view contents) { return StopList(parse_lines(contents)); }

StopList StopList::load(const std::filesystem::path& path) { return parse(read_file(path)); }

StopList StopList::bangla_default() { return parse(resources::bangla_stopwords()); }

bool StopList::contains(std::string_view token) const {
  // Heterogeneous lookup on unordered_set needs a transparent hasher; the
  // copy is cheap next to normalization.
  return entries_.contains(std::string(token));
}

std::vector<std::string> StopList::sorted_entries() const {
  std::vector<std::string> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end());
  return out;
}

// SuffixTable

SuffixTable::SuffixTable(const std::vector<std::string>& suffixes, std::size_t min_stem_length)
    : min_stem_length_(min_stem_length) {
  if (min_stem_length == 0) throw Error(ErrorCode::kInvalidArgument, "min_stem_length must be positive");
  for (const auto& s : suffixes) {
    std::string norm = normalize(s);
    if (!norm.empty()) suffixes_.push_back(std::move(norm));
  }
  std::sort(suffixes_.begin(), suffixes_.end(), [](const std::string& a, const std::string& b) {
    const auto la = utf8_length(a);
    const auto lb = utf8_length(b);
    return la != lb ? la > lb : a < b;
  });
  suffixes_.erase(std::unique(suffixes_.begin(), suffixes_.end()), suffixes_.end());
}

SuffixTable SuffixTable::parse(std::string_view contents, std::size_t min_stem_length) {
  return SuffixTable(parse_lines(contents), min_stem_length);
}

SuffixTable SuffixTable::load(const std::filesystem::path& path, std::size_t min_stem_length) {
  return parse(read_file(path), min_stem_length);
}

SuffixTable SuffixTable::bangla_default(std::size_t min_stem_length) {
  return parse(resources::bangla_suffixes(), min_stem_length);
}

// PreprocessConfig

PreprocessConfig PreprocessConfig::bangla_default() {
  PreprocessConfig config;
  config.stopwords = StopList::bangla_default();
  config.suffixes = SuffixTable::bangla_default();
  return config;
}

std::string PreprocessConfig::fingerprint() const {
  Fnv1a64 h;
  h.update_field("preprocess-v1");
  h.update_u64(remove_stopwords).update_u64(stem).update_u64(drop_numeric);
  const auto stops = stopwords.sorted_entries();
  h.update_u64(stops.size());
  for (const auto& s : stops) h.update_field(s);
  h.update_u64(suffixes.min_stem_length());
  h.update_u64(suffixes.suffixes().size());
  for (const auto& s : suffixes.suffixes()) h.update_field(s);
  return h.hex();
}

}  // namespace satdetect
