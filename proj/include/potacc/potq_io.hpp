//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "potacc/pot_codec.hpp"

namespace potacc {

// POTQ layout, all multi-byte fields little-endian:
//   "POTQ" | version u8 (=1) | method u8 | rank u8 | dims u32 x rank | scale_exp i8 | packed nibbles
// The nibble payload is ceil(n/2) bytes, low nibble first.
inline constexpr std::uint8_t kPotqVersion = 1;

std::vector<std::uint8_t> encode_potq(const QuantizedTensor& tensor);
QuantizedTensor decode_potq(std::span<const std::uint8_t> bytes);

void write_potq(const std::filesystem::path& path, const QuantizedTensor& tensor);
QuantizedTensor read_potq(const std::filesystem::path& path);

/// Raw little-endian float32 values, row-major; the shape is supplied by the caller.
std::vector<float> read_f32_file(const std::filesystem::path& path);
void write_f32_file(const std::filesystem::path& path, std::span<const float> values);

std::vector<std::int8_t> read_i8_file(const std::filesystem::path& path);
void write_i8_file(const std::filesystem::path& path, std::span<const std::int8_t> values);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace potacc
