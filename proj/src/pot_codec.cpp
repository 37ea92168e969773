//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/pot_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "potacc/error.hpp"

namespace potacc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ZeroNotRepresentable: return "ZeroNotRepresentable";
    case ErrorCode::ZeroWeightNotRepresentable: return "ZeroWeightNotRepresentable";
    case ErrorCode::NotPoTWeight: return "NotPoTWeight";
    case ErrorCode::AccumulatorOverflow: return "AccumulatorOverflow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MethodMismatch: return "MethodMismatch";
    case ErrorCode::UnsupportedLayer: return "UnsupportedLayer";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::QKeras: return "qkeras";
    case Method::Msq: return "msq";
    case Method::Apot: return "apot";
    case Method::Uniform: return "uniform";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : {Method::QKeras, Method::Msq, Method::Apot, Method::Uniform}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

const PoTMethod& pot_method(Method m) {
  static const PoTMethod qkeras{Method::QKeras, "8_4_pot_QKeras", {0, 1, 2, 3, 4, 5, 6, 7}, {}, 0, -8};
  static const PoTMethod msq{Method::Msq, "8_4_pot_MSQ", {std::nullopt, -1, -2, -3}, {std::nullopt, -1}, 3, 0};
  // Field value 3 selects 2^-4: the remapped shift term.
  static const PoTMethod apot{Method::Apot, "8_4_pot_APoT", {std::nullopt, -1, -2, -4}, {std::nullopt, -3}, 4, 0};
  static const PoTMethod uniform{Method::Uniform, "8_8_uni", {}, {}, 0, 0};
  switch (m) {
    case Method::QKeras: return qkeras;
    case Method::Msq: return msq;
    case Method::Apot: return apot;
    case Method::Uniform: return uniform;
  }
  throw Error(ErrorCode::InvalidInput, "unknown method id " + std::to_string(static_cast<int>(m)));
}

WeightCode::WeightCode(std::uint8_t raw, Method method) : raw_(raw), method_(method) {
  if (raw > 0xF) throw Error(ErrorCode::InvalidInput, "weight code " + std::to_string(raw) + " exceeds 4 bits");
  if (!is_pot(method)) throw Error(ErrorCode::InvalidInput, "uniform weights have no 4-bit code");
}

WeightCode WeightCode::qkeras(bool negative, int shift) {
  if (shift < 0 || shift > 7) throw Error(ErrorCode::InvalidInput, "QKeras shift out of range 0..7");
  return WeightCode(static_cast<std::uint8_t>((negative ? 0x8 : 0) | shift), Method::QKeras);
}

WeightCode WeightCode::two_term(Method method, bool negative, int first_field, int second_field) {
  if (method != Method::Msq && method != Method::Apot) {
    throw Error(ErrorCode::InvalidInput, "two-term codes exist only for MSQ and APoT");
  }
  if (first_field < 0 || first_field > 3 || second_field < 0 || second_field > 1) {
    throw Error(ErrorCode::InvalidInput, "two-term field out of range");
  }
  return WeightCode(static_cast<std::uint8_t>((negative ? 0x8 : 0) | (first_field << 1) | second_field), method);
}

WeightCode WeightCode::with_sign_flipped() const noexcept {
  WeightCode flipped = *this;
  flipped.raw_ = static_cast<std::uint8_t>(raw_ ^ 0x8U);
  return flipped;
}

namespace {

// Sum of the selected term exponents, each shifted by `bias`; returns sign-less magnitude * 2^bias.
double magnitude(WeightCode code, int bias) {
  const PoTMethod& m = pot_method(code.method());
  if (code.method() == Method::QKeras) return std::ldexp(1.0, *m.first_term[code.shift_field()] + bias);
  double sum = 0.0;
  if (const auto e = m.first_term[code.first_field()]) sum += std::ldexp(1.0, *e + bias);
  if (const auto e = m.second_term[code.second_field()]) sum += std::ldexp(1.0, *e + bias);
  return sum;
}

}  // namespace

double decode(WeightCode code) {
  const double mag = magnitude(code, 0);
  return code.negative() ? -mag : mag;
}

std::int32_t decode_scaled(WeightCode code) {
  const auto mag = static_cast<std::int32_t>(magnitude(code, pot_method(code.method()).fraction_bits));
  return code.negative() ? -mag : mag;
}

bool is_zero_level(WeightCode code) {
  return code.method() != Method::QKeras && code.first_field() == 0 && code.second_field() == 0;
}

std::vector<WeightCode> canonical_codes(Method method) {
  if (!is_pot(method)) throw Error(ErrorCode::InvalidInput, "uniform weights have no 4-bit code");
  std::vector<WeightCode> codes;
  for (std::uint8_t raw = 0; raw < 16; ++raw) {
    const WeightCode c(raw, method);
    if (c.negative() && is_zero_level(c)) continue;
    codes.push_back(c);
  }
  return codes;
}

std::vector<double> level_values(Method method) {
  std::vector<double> levels;
  for (WeightCode c : canonical_codes(method)) levels.push_back(decode(c));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

int pot_exponent(double x, int min_exp, int max_exp) {
  if (min_exp > max_exp) throw Error(ErrorCode::InvalidInput, "min_exp > max_exp");
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "non-finite value");
  if (x == 0.0) throw Error(ErrorCode::ZeroNotRepresentable, "zero has no power-of-two level");

  int k = 0;
  const double r = 2.0 * std::frexp(std::fabs(x), &k);  // |x| = r * 2^(k-1), r in [1, 2)
  int e = k - 1;
  // Round up iff r >= sqrt(2), i.e. r*r >= 2, decided exactly via the FMA residual.
  const double p = r * r;
  const double residual = std::fma(r, r, -p);
  if (p > 2.0 || (p == 2.0 && residual >= 0.0)) ++e;
  return std::clamp(e, min_exp, max_exp);
}

double quantize_pot_single(double x, int min_exp, int max_exp) {
  const double q = std::ldexp(1.0, pot_exponent(x, min_exp, max_exp));
  return std::signbit(x) ? -q : q;
}

WeightCode quantize_to_method(double x, Method method, int scale_exp) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "non-finite value");
  switch (method) {
    case Method::QKeras: {
      if (x == 0.0) return WeightCode::qkeras(false, 0);
      const double scaled = std::ldexp(x, -scale_exp);
      return WeightCode::qkeras(std::signbit(x), pot_exponent(scaled, 0, 7));
    }
    case Method::Msq:
    case Method::Apot: {
      WeightCode best;
      double best_dist = std::numeric_limits<double>::infinity();
      double best_mag = std::numeric_limits<double>::infinity();
      for (WeightCode c : canonical_codes(method)) {
        const double level = std::ldexp(decode(c), scale_exp);
        const double dist = std::fabs(x - level);
        const double mag = std::fabs(level);
        if (dist < best_dist || (dist == best_dist && mag < best_mag)) {
          best = c;
          best_dist = dist;
          best_mag = mag;
        }
      }
      return best;
    }
    case Method::Uniform:
      break;
  }
  throw Error(ErrorCode::InvalidInput, "quantize_to_method requires a PoT method");
}

WeightCode quantize_to_method(double x, Method method) {
  return quantize_to_method(x, method, pot_method(method).default_scale_exp);
}

std::size_t element_count(std::span<const std::uint32_t> shape) {
  std::size_t n = 1;
  for (std::uint32_t d : shape) n *= d;
  return n;
}

QuantizedTensor::QuantizedTensor(Method method, std::vector<std::uint32_t> shape, int scale_exp)
    : method_(method), shape_(std::move(shape)), scale_exp_(scale_exp) {
  if (!is_pot(method)) throw Error(ErrorCode::InvalidInput, "QuantizedTensor requires a PoT method");
  if (scale_exp < std::numeric_limits<std::int8_t>::min() || scale_exp > std::numeric_limits<std::int8_t>::max()) {
    throw Error(ErrorCode::InvalidInput, "scale exponent must fit in a signed byte");
  }
  size_ = element_count(shape_);
  packed_.assign((size_ + 1) / 2, 0);
}

QuantizedTensor QuantizedTensor::from_codes(std::vector<std::uint32_t> shape, std::span<const WeightCode> codes,
                                            int scale_exp) {
  const Method method = codes.empty() ? Method::QKeras : codes.front().method();
  QuantizedTensor t(method, std::move(shape), scale_exp);
  if (codes.size() != t.size()) throw Error(ErrorCode::ShapeMismatch, "code count does not match shape");
  for (std::size_t i = 0; i < codes.size(); ++i) t.set_code(i, codes[i]);
  return t;
}

QuantizedTensor QuantizedTensor::from_raw(Method method, std::vector<std::uint32_t> shape,
                                          std::span<const std::uint8_t> raw_codes, int scale_exp) {
  QuantizedTensor t(method, std::move(shape), scale_exp);
  if (raw_codes.size() != t.size()) throw Error(ErrorCode::ShapeMismatch, "code count does not match shape");
  for (std::size_t i = 0; i < raw_codes.size(); ++i) t.set_code(i, WeightCode(raw_codes[i], method));
  return t;
}

double QuantizedTensor::scale() const noexcept { return std::ldexp(1.0, scale_exp_); }

WeightCode QuantizedTensor::code(std::size_t index) const {
  if (index >= size_) throw Error(ErrorCode::InvalidInput, "code index out of range");
  return WeightCode(raw(index), method_);
}

void QuantizedTensor::set_code(std::size_t index, WeightCode code) {
  if (index >= size_) throw Error(ErrorCode::InvalidInput, "code index out of range");
  if (code.method() != method_) throw Error(ErrorCode::MethodMismatch, "code method differs from tensor method");
  std::uint8_t& byte = packed_[index / 2];
  if (index % 2 == 0) {
    byte = static_cast<std::uint8_t>((byte & 0xF0U) | code.raw());
  } else {
    byte = static_cast<std::uint8_t>((byte & 0x0FU) | (code.raw() << 4));
  }
}

std::vector<double> QuantizedTensor::dequantize() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = std::ldexp(decode(WeightCode(raw(i), method_)), scale_exp_);
  return out;
}

QuantizedTensor quantize_tensor(std::span<const float> values, std::vector<std::uint32_t> shape, Method method,
                                int scale_exp) {
  QuantizedTensor t(method, std::move(shape), scale_exp);
  if (values.size() != t.size()) throw Error(ErrorCode::ShapeMismatch, "value count does not match shape");
  for (std::size_t i = 0; i < values.size(); ++i) t.set_code(i, quantize_to_method(values[i], method, scale_exp));
  return t;
}

QuantizedTensor preprocess_weights(std::span<const std::int32_t> weights, std::vector<std::uint32_t> shape,
                                   int scale_exp) {
  QuantizedTensor t(Method::QKeras, std::move(shape), scale_exp);
  if (weights.size() != t.size()) throw Error(ErrorCode::ShapeMismatch, "weight count does not match shape");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::int32_t w = weights[i];
    if (w == 0) {
      throw Error(ErrorCode::ZeroWeightNotRepresentable, "weight at index " + std::to_string(i) + " is zero");
    }
    const std::uint32_t mag = w < 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(w))
                                    : static_cast<std::uint32_t>(w);
    if ((mag & (mag - 1)) != 0 || mag > 128) {
      throw Error(ErrorCode::NotPoTWeight,
                  "weight at index " + std::to_string(i) + " has value " + std::to_string(w));
    }
    t.set_code(i, WeightCode::qkeras(w < 0, std::countr_zero(mag)));
  }
  return t;
}

}  // namespace potacc
