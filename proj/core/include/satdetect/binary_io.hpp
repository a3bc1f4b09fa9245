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

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace satdetect::binio {

// Little-endian primitives for the artifact formats. Reads throw
// FormatError on truncation.

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, std::string_view s);
void write_f64_array(std::ostream& out, std::span<const double> values);
void write_f32_array(std::ostream& out, std::span<const float> values);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in, std::size_t max_length = 1u << 26);
void read_f64_array(std::istream& in, std::span<double> values);
void read_f32_array(std::istream& in, std::span<float> values);

void write_magic(std::ostream& out, std::string_view magic);
/// Throws FormatError naming `what` if the next bytes differ from `magic`.
void expect_magic(std::istream& in, std::string_view magic, std::string_view what);

}  // namespace satdetect::binio
