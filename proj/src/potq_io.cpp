//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/potq_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "potacc/error.hpp"

namespace potacc {

namespace {

constexpr char kMagic[4] = {'P', 'O', 'T', 'Q'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::InvalidInput, "truncated POTQ data");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_potq(const QuantizedTensor& tensor) {
  if (tensor.shape().size() > 255) throw Error(ErrorCode::InvalidInput, "POTQ rank exceeds 255");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kPotqVersion);
  out.push_back(static_cast<std::uint8_t>(tensor.method()));
  out.push_back(static_cast<std::uint8_t>(tensor.shape().size()));
  for (std::uint32_t d : tensor.shape()) put_u32(out, d);
  out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(tensor.scale_exp())));
  out.insert(out.end(), tensor.packed().begin(), tensor.packed().end());
  return out;
}

QuantizedTensor decode_potq(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error(ErrorCode::InvalidInput, "bad POTQ magic");
  if (const auto version = r.u8(); version != kPotqVersion) {
    throw Error(ErrorCode::InvalidInput, "unsupported POTQ version " + std::to_string(version));
  }
  const auto method_id = r.u8();
  if (method_id > static_cast<std::uint8_t>(Method::Apot)) {
    throw Error(ErrorCode::InvalidInput, "POTQ method id " + std::to_string(method_id) + " is not a PoT method");
  }
  const auto rank = r.u8();
  std::vector<std::uint32_t> shape(rank);
  for (auto& d : shape) d = r.u32();
  const auto scale_exp = static_cast<std::int8_t>(r.u8());

  QuantizedTensor t(static_cast<Method>(method_id), std::move(shape), scale_exp);
  const std::size_t payload = (t.size() + 1) / 2;
  if (r.remaining() != payload) {
    throw Error(ErrorCode::InvalidInput, "POTQ payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                                             std::to_string(payload));
  }
  const auto data = r.take(payload);
  std::copy(data.begin(), data.end(), t.packed_mut().begin());
  return t;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_potq(const std::filesystem::path& path, const QuantizedTensor& tensor) {
  write_bytes(path, encode_potq(tensor));
}

QuantizedTensor read_potq(const std::filesystem::path& path) { return decode_potq(read_bytes(path)); }

std::vector<float> read_f32_file(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() % 4 != 0) throw Error(ErrorCode::InvalidInput, path.string() + " is not a float32 file");
  std::vector<float> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

void write_f32_file(const std::filesystem::path& path, std::span<const float> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 4);
  for (float v : values) put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  write_bytes(path, bytes);
}

std::vector<std::int8_t> read_i8_file(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {reinterpret_cast<const std::int8_t*>(bytes.data()),
          reinterpret_cast<const std::int8_t*>(bytes.data()) + bytes.size()};
}

void write_i8_file(const std::filesystem::path& path, std::span<const std::int8_t> values) {
  write_bytes(path, {reinterpret_cast<const std::uint8_t*>(values.data()), values.size()});
}

}  // namespace potacc
