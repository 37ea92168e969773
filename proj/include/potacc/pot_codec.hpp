//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace potacc {

/// Weight quantization schemes. The numeric values are the method ids stored in POTQ files.
enum class Method : std::uint8_t {
  QKeras = 0,   ///< 8_4_pot_QKeras: one PoT term, +-2^0 .. +-2^7, no zero level.
  Msq = 1,      ///< 8_4_pot_MSQ: two PoT terms.
  Apot = 2,     ///< 8_4_pot_APoT: two PoT terms, first-term code 3 selects 2^-4.
  Uniform = 3,  ///< 8_8_uni: plain int8 weights (multiplier baseline).
};

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

constexpr bool is_pot(Method m) noexcept { return m != Method::Uniform; }

/// Descriptor for one quantization scheme.
///
/// first_term[f] / second_term[f] give the base-2 exponent selected by field value f,
/// or nullopt when that field value encodes a zero term. For QKeras the first-term
/// field is the 3-bit shift; MSQ/APoT use a 2-bit first field and a 1-bit second field.
struct PoTMethod {
  Method id;
  std::string_view name;
  std::vector<std::optional<int>> first_term;
  std::vector<std::optional<int>> second_term;
  int fraction_bits;      ///< F: PE products are level * 2^F, always an integer.
  int default_scale_exp;  ///< tensor scale 2^default_scale_exp
};

const PoTMethod& pot_method(Method m);

/// One 4-bit encoded weight. Bit 3 is the sign for every method.
class WeightCode {
 public:
  constexpr WeightCode() noexcept = default;

  /// Throws InvalidInput when raw > 15 or the method has no 4-bit encoding.
  WeightCode(std::uint8_t raw, Method method);

  static WeightCode qkeras(bool negative, int shift);
  static WeightCode two_term(Method method, bool negative, int first_field, int second_field);

  constexpr std::uint8_t raw() const noexcept { return raw_; }
  constexpr Method method() const noexcept { return method_; }
  constexpr bool negative() const noexcept { return (raw_ & 0x8U) != 0; }

  /// Bits 2..0 (QKeras shift term).
  constexpr int shift_field() const noexcept { return raw_ & 0x7; }
  /// Bits 2..1 (MSQ/APoT first shift term).
  constexpr int first_field() const noexcept { return (raw_ >> 1) & 0x3; }
  /// Bit 0 (MSQ/APoT second shift term).
  constexpr int second_field() const noexcept { return raw_ & 0x1; }

  WeightCode with_sign_flipped() const noexcept;

  friend constexpr bool operator==(WeightCode, WeightCode) noexcept = default;

 private:
  std::uint8_t raw_ = 0;
  Method method_ = Method::QKeras;
};

/// Exact level value sign * (t1 + t2). Levels are dyadic rationals, so the double is exact.
double decode(WeightCode code);

/// level * 2^F as an integer (exact).
std::int32_t decode_scaled(WeightCode code);

/// True when the code decodes to zero (MSQ/APoT only; includes the negative-zero pattern).
bool is_zero_level(WeightCode code);

/// Every code the encoder may emit for the method, ascending by raw value.
std::vector<WeightCode> canonical_codes(Method method);

/// Sorted distinct level values (unscaled) of the method.
std::vector<double> level_values(Method method);

/// Single-term PoT rounding: sign(x) * 2^clamp(round(log2|x|), min_exp, max_exp).
/// Rounding is half-up in the log domain, i.e. the threshold between 2^e and 2^(e+1)
/// is the geometric midpoint 2^(e+0.5), decided exactly.
double quantize_pot_single(double x, int min_exp, int max_exp);

/// The clamped exponent chosen by quantize_pot_single.
int pot_exponent(double x, int min_exp, int max_exp);

/// Quantizes x (in real units) to the nearest level of the method at tensor scale 2^scale_exp.
/// QKeras follows the single-term rule over exponents [0, 7] and maps zero to +2^0.
/// MSQ/APoT pick the nearest enumerated level; ties go to the smaller magnitude, then to the
/// lower raw code.
WeightCode quantize_to_method(double x, Method method, int scale_exp);
WeightCode quantize_to_method(double x, Method method);

/// Packed 4-bit weight tensor: row-major, two codes per byte, low nibble holds the even index.
class QuantizedTensor {
 public:
  QuantizedTensor() = default;
  QuantizedTensor(Method method, std::vector<std::uint32_t> shape, int scale_exp);

  static QuantizedTensor from_codes(std::vector<std::uint32_t> shape, std::span<const WeightCode> codes,
                                    int scale_exp);
  /// Builds from raw nibbles; every raw must be < 16.
  static QuantizedTensor from_raw(Method method, std::vector<std::uint32_t> shape,
                                  std::span<const std::uint8_t> raw_codes, int scale_exp);

  Method method() const noexcept { return method_; }
  const std::vector<std::uint32_t>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  int scale_exp() const noexcept { return scale_exp_; }
  double scale() const noexcept;

  WeightCode code(std::size_t index) const;
  std::uint8_t raw(std::size_t index) const noexcept {
    const std::uint8_t byte = packed_[index / 2];
    return (index % 2 == 0) ? (byte & 0x0FU) : static_cast<std::uint8_t>(byte >> 4);
  }
  void set_code(std::size_t index, WeightCode code);

  std::span<const std::uint8_t> packed() const noexcept { return packed_; }
  std::vector<std::uint8_t>& packed_mut() noexcept { return packed_; }

  /// level * scale for every element.
  std::vector<double> dequantize() const;

  friend bool operator==(const QuantizedTensor&, const QuantizedTensor&) = default;

 private:
  Method method_ = Method::QKeras;
  std::vector<std::uint32_t> shape_;
  std::size_t size_ = 0;
  int scale_exp_ = 0;
  std::vector<std::uint8_t> packed_;
};

std::size_t element_count(std::span<const std::uint32_t> shape);

/// Quantizes a float tensor element by element.
QuantizedTensor quantize_tensor(std::span<const float> values, std::vector<std::uint32_t> shape, Method method,
                                int scale_exp);

/// Converts integer PoT weights (+-2^0 .. +-2^7) to QKeras 4-bit shift codes.
/// Throws ZeroWeightNotRepresentable / NotPoTWeight naming the offending index.
QuantizedTensor preprocess_weights(std::span<const std::int32_t> weights, std::vector<std::uint32_t> shape,
                                   int scale_exp);

}  // namespace potacc
