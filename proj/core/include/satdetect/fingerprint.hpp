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

#include <cstdint>
#include <string>
#include <string_view>

namespace satdetect {

/// Streaming 64-bit FNV-1a. Used for artifact lineage checks, not security.
class Fnv1a64 {
 public:
  Fnv1a64& update(std::string_view bytes) noexcept;
  Fnv1a64& update_u64(std::uint64_t value) noexcept;
  /// Length-prefixed, so ("ab","c") and ("a","bc") hash differently.
  Fnv1a64& update_field(std::string_view bytes) noexcept;
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex64(std::uint64_t value);

}  // namespace satdetect
